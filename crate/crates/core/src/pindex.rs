//! Scaling exponent `p_e` from `e_max(L) ∝ L^(p_e - 1)`.
//!
//! Instances at the same size are reduced to a single value (median by
//! default, so rare atypical instances do not move the fit), then
//! `log e_max` is regressed on `log L`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_DISTINCT_SIZES: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyPoint {
    #[serde(rename = "L")]
    pub size: usize,
    /// Free-form instance tag (seed, solution list, ...).
    pub instance: String,
    pub e_max: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FamilySample {
    pub label: String,
    pub points: Vec<FamilyPoint>,
}

impl FamilySample {
    pub fn new(label: impl Into<String>) -> Self {
        Self { label: label.into(), points: Vec::new() }
    }

    pub fn push(&mut self, size: usize, instance: impl Into<String>, e_max: f64) {
        self.points.push(FamilyPoint { size, instance: instance.into(), e_max });
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregate {
    Median,
    Mean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    #[serde(rename = "P_EQ_2")]
    PEq2,
    #[serde(rename = "P_EQ_1")]
    PEq1,
    #[serde(rename = "INTERMEDIATE")]
    Intermediate,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::PEq2 => "P_EQ_2",
            Classification::PEq1 => "P_EQ_1",
            Classification::Intermediate => "INTERMEDIATE",
        })
    }
}

#[derive(Clone, Debug)]
pub struct FitConfig {
    /// Sizes below this are ignored by the fit.
    pub min_size: usize,
    /// `p_e >= upper_band` classifies as `P_EQ_2`.
    pub upper_band: f64,
    /// `p_e <= lower_band` classifies as `P_EQ_1`.
    pub lower_band: f64,
    pub aggregate: Aggregate,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { min_size: 8, upper_band: 1.8, lower_band: 1.2, aggregate: Aggregate::Median }
    }
}

impl FitConfig {
    pub fn classify(&self, p_e: f64) -> Classification {
        if p_e >= self.upper_band {
            Classification::PEq2
        } else if p_e <= self.lower_band {
            Classification::PEq1
        } else {
            Classification::Intermediate
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregatePoint {
    #[serde(rename = "L")]
    pub size: usize,
    pub e_max: f64,
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexEstimate {
    pub p_e: f64,
    pub slope_stderr: f64,
    pub aggregate: Aggregate,
    pub classification: Classification,
    /// Log–log fit `ln e_max = slope ln L + intercept`.
    pub log_fit: LineFit,
    /// Linear fit `e_max = slope L + intercept`, reported alongside.
    pub linear_fit: LineFit,
    pub points: Vec<AggregatePoint>,
}

impl IndexEstimate {
    /// `p_e` inside the plausible window `[0.5, 2.5]`.
    pub fn is_sane(&self) -> bool {
        (0.5..=2.5).contains(&self.p_e)
    }
}

/// Sample median; the mean of the two middle values for even counts.
pub fn median_over_instances(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("median of an empty set".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Ordinary least squares with the standard error of the slope.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = mean(xs);
    let my = mean(ys);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let slope_stderr = if n > 2.0 { (sse / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    LineFit { slope, intercept, slope_stderr }
}

pub fn fit_pe(sample: &FamilySample, config: &FitConfig) -> Result<IndexEstimate> {
    if let Some(p) = sample.points.iter().find(|p| !(p.e_max > 0.0)) {
        return Err(Error::NonPositiveEmax(p.e_max));
    }
    let mut by_size: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for p in sample.points.iter().filter(|p| p.size >= config.min_size) {
        by_size.entry(p.size).or_default().push(p.e_max);
    }
    if by_size.len() < MIN_DISTINCT_SIZES {
        return Err(Error::TooFewSizes { need: MIN_DISTINCT_SIZES, got: by_size.len() });
    }
    let points: Vec<AggregatePoint> = by_size
        .iter()
        .map(|(&size, vals)| AggregatePoint {
            size,
            e_max: match config.aggregate {
                Aggregate::Median => median_over_instances(vals).expect("nonempty"),
                Aggregate::Mean => mean(vals),
            },
            instances: vals.len(),
        })
        .collect();
    let sizes: Vec<f64> = points.iter().map(|p| p.size as f64).collect();
    let values: Vec<f64> = points.iter().map(|p| p.e_max).collect();
    let log_fit = least_squares(
        &sizes.iter().map(|x| x.ln()).collect::<Vec<_>>(),
        &values.iter().map(|y| y.ln()).collect::<Vec<_>>(),
    );
    let linear_fit = least_squares(&sizes, &values);
    let p_e = 1.0 + log_fit.slope;
    Ok(IndexEstimate {
        p_e,
        slope_stderr: log_fit.slope_stderr,
        aggregate: config.aggregate,
        classification: config.classify(p_e),
        log_fit,
        linear_fit,
        points,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub family: String,
    pub p_e: f64,
    pub stderr: f64,
    pub classification: Classification,
    pub aggregate: Aggregate,
    #[serde(rename = "min_L")]
    pub min_size: usize,
    pub linear_fit: LineFit,
    pub points: Vec<AggregatePoint>,
}

impl FitReport {
    pub fn new(family: &str, est: &IndexEstimate, config: &FitConfig) -> Self {
        Self {
            family: family.to_string(),
            p_e: est.p_e,
            stderr: est.slope_stderr,
            classification: est.classification,
            aggregate: est.aggregate,
            min_size: config.min_size,
            linear_fit: est.linear_fit,
            points: est.points.clone(),
        }
    }
}
