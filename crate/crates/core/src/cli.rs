//! Experiment commands behind the `macrosup` binary. Each command writes its
//! artifacts under the output directory and returns a serializable report;
//! `passed` is false when an internal check failed.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{self, MomentCheck};
use crate::catalog;
use crate::error::{Error, Result};
use crate::grover::{k_star, GroverInstance, StepLabel};
use crate::pindex::{fit_pe, FamilySample, FitConfig, FitReport};
use crate::random::derive_seed;
use crate::report::{self, LinePlot, ScanRow, Series};
use crate::statevector::{PauliAxis, PureState};
use crate::vcm::{
    brute_force_max_fluctuation, c_factor, compute_vcm, fluctuation_of, max_fluctuating_operator, BruteForceConfig,
    Vcm, VcmSummary,
};

/// Absolute tolerance for the Hermitian / PSD checks run on every VCM.
pub const STRUCTURE_TOL: f64 = 1e-9;
/// `e_max` of product states, drawn as the reference line in plots.
pub const PRODUCT_EMAX: f64 = 2.0;
pub const SCAN_MIN_QUBITS: usize = 6;
pub const SCAN_MAX_QUBITS: usize = 24;
/// Slack on `⟨M_x⟩` against its leading-order formula.
pub const MEAN_SLACK: f64 = 2.0;
/// Slack per qubit on `⟨(ΔM_x)²⟩` against its leading-order formula.
pub const VARIANCE_SLACK_PER_SITE: f64 = 3.0;
pub const TAIL_ROOT_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub fit: FitConfig,
}

impl RunConfig {
    pub fn new(seed: u64, out_dir: impl Into<PathBuf>) -> Self {
        Self { seed, out_dir: out_dir.into(), fit: FitConfig::default() }
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        fs::create_dir_all(&self.out_dir)?;
        Ok(BufWriter::new(File::create(self.out_dir.join(name))?))
    }

    fn write_text(&self, name: &str, text: &str) -> Result<PathBuf> {
        let mut w = self.create(name)?;
        w.write_all(text.as_bytes())?;
        w.flush()?;
        Ok(self.out_dir.join(name))
    }
}

/// `e_max` of a state after checking the VCM structure.
pub fn checked_vcm(state: &PureState) -> Result<Vcm> {
    let vcm = compute_vcm(state)?;
    vcm.check_structure(STRUCTURE_TOL).map_err(Error::InvalidArgument)?;
    Ok(vcm)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- trace

#[derive(Clone, Debug)]
pub enum SolutionSource {
    Explicit(Vec<usize>),
    Random(usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    #[serde(rename = "L")]
    pub num_qubits: usize,
    pub solutions: Vec<usize>,
    #[serde(rename = "R")]
    pub iterations: usize,
    #[serde(rename = "T_Q")]
    pub total_steps: usize,
    pub rows: usize,
    pub complete: bool,
    pub failure: Option<String>,
    /// Largest deviation from 2 over the initial Hadamard block.
    pub initial_plateau_deviation: f64,
    pub max_ht_drift: f64,
    pub max_e_max: f64,
    pub final_e_max: f64,
    /// `e_max` after the PHASE step of iteration `ceil(R/2)`.
    pub midpoint_e_max: f64,
    pub csv: PathBuf,
    pub svg: PathBuf,
    pub passed: bool,
}

pub fn grover_trace(config: &RunConfig, num_qubits: usize, source: &SolutionSource) -> Result<TraceReport> {
    let inst = match source {
        SolutionSource::Explicit(sols) => GroverInstance::new(num_qubits, sols)?,
        SolutionSource::Random(m) => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[num_qubits as u64, *m as u64]));
            GroverInstance::random(num_qubits, *m, &mut rng)?
        }
    };
    let trace = inst.run_with_trace(|s| Ok(checked_vcm(s)?.e_max()));
    let tag = inst.solutions().iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-");
    let stem = format!("trace_L{num_qubits}_x{tag}");

    let mut w = config.create(&format!("{stem}.csv"))?;
    report::write_trace_csv(&mut w, &trace)?;
    w.flush()?;

    let plot = LinePlot {
        title: format!("e_max along Grover's search, L={num_qubits}, x={tag}"),
        x_label: "step".into(),
        y_label: "e_max".into(),
        series: vec![Series {
            name: format!("x={tag}"),
            points: trace.records.iter().map(|r| (r.step as f64, r.value)).collect(),
        }],
        reference_lines: vec![PRODUCT_EMAX],
    };
    let svg = config.write_text(&format!("{stem}.svg"), &plot.to_svg())?;

    let values: Vec<f64> = trace.records.iter().map(|r| r.value).collect();
    let plateau = values.iter().take(num_qubits + 1).map(|v| (v - PRODUCT_EMAX).abs()).fold(0.0, f64::max);
    let mid_iter = inst.iterations().div_ceil(2);
    // PHASE of iteration j sits at step L + (j-1)(2L+2) + L + 2
    let mid_step = num_qubits + mid_iter.saturating_sub(1) * (2 * num_qubits + 2) + num_qubits + 2;
    let midpoint = trace
        .records
        .iter()
        .find(|r| r.step == mid_step && r.label == StepLabel::Phase)
        .map_or(f64::NAN, |r| r.value);
    let complete = trace.is_complete();
    Ok(TraceReport {
        num_qubits,
        solutions: inst.solutions().to_vec(),
        iterations: inst.iterations(),
        total_steps: inst.total_steps(),
        rows: trace.records.len(),
        complete,
        failure: trace.failure.clone(),
        initial_plateau_deviation: plateau,
        max_ht_drift: trace.max_ht_drift(),
        max_e_max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        final_e_max: values.last().copied().unwrap_or(f64::NAN),
        midpoint_e_max: midpoint,
        csv: config.out_dir.join(format!("{stem}.csv")),
        svg,
        passed: complete && plateau <= STRUCTURE_TOL && trace.max_ht_drift() <= STRUCTURE_TOL,
    })
}

// ---------------------------------------------------------------- scan

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub l_min: usize,
    pub l_max: usize,
    pub fractions: Vec<f64>,
    pub instances: usize,
    pub num_solutions: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { l_min: 8, l_max: 16, fractions: vec![2.0, 3.0, 4.0], instances: 5, num_solutions: 1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub fits: Vec<FitReport>,
    pub csv: PathBuf,
    pub json: PathBuf,
    pub svg: PathBuf,
    pub passed: bool,
}

fn check_scan_range(opts: &ScanOptions) -> Result<()> {
    if opts.l_min < SCAN_MIN_QUBITS {
        return Err(Error::InvalidArgument(format!("--Lmin must be at least {SCAN_MIN_QUBITS}, got {}", opts.l_min)));
    }
    if opts.l_max > SCAN_MAX_QUBITS {
        return Err(Error::InvalidArgument(format!("--Lmax must be at most {SCAN_MAX_QUBITS}, got {}", opts.l_max)));
    }
    if opts.l_min > opts.l_max {
        return Err(Error::InvalidArgument(format!("--Lmin {} exceeds --Lmax {}", opts.l_min, opts.l_max)));
    }
    Ok(())
}

/// One `e_max` per `(L, s, instance)`: the instance is drawn once per
/// `(L, instance)` and probed at `k* = ceil(R/s)` for every `s`.
pub fn scan_rows(config: &RunConfig, opts: &ScanOptions) -> Result<Vec<ScanRow>> {
    check_scan_range(opts)?;
    if opts.instances == 0 {
        return Err(Error::InvalidArgument("--instances must be at least 1".into()));
    }
    for &s in &opts.fractions {
        k_star(1, s)?;
    }
    let mut jobs = Vec::new();
    for l in opts.l_min..=opts.l_max {
        for i in 0..opts.instances {
            let seed = derive_seed(config.seed, &[l as u64, opts.num_solutions as u64, i as u64]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = GroverInstance::random(l, opts.num_solutions, &mut rng)?;
            for &s in &opts.fractions {
                jobs.push((inst.clone(), s, seed));
            }
        }
    }
    jobs.par_iter()
        .map(|(inst, s, seed)| {
            let k = k_star(inst.iterations(), *s)?;
            let vcm = checked_vcm(&inst.closed_form_state(k)?)?;
            Ok(ScanRow {
                num_qubits: inst.num_qubits(),
                divisor: *s,
                k_star: k,
                seed: *seed,
                solutions: inst.solutions().to_vec(),
                e_max: vcm.e_max(),
            })
        })
        .collect()
}

fn fraction_label(s: f64) -> String {
    format!("k*=ceil(R/{})", report::sig12(s))
}

fn median_series(name: String, sample: &FamilySample) -> Series {
    let mut by_size: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for p in &sample.points {
        by_size.entry(p.size).or_default().push(p.e_max);
    }
    let points = by_size
        .into_iter()
        .map(|(l, v)| (l as f64, crate::pindex::median_over_instances(&v).expect("nonempty")))
        .collect();
    Series { name, points }
}

pub fn grover_scan(config: &RunConfig, opts: &ScanOptions) -> Result<ScanReport> {
    let rows = scan_rows(config, opts)?;
    let mut w = config.create("scan.csv")?;
    report::write_scan_csv(&mut w, &rows)?;
    w.flush()?;

    let mut fits = Vec::new();
    let mut series = Vec::new();
    for &s in &opts.fractions {
        let mut sample = FamilySample::new(fraction_label(s));
        for r in rows.iter().filter(|r| r.divisor == s) {
            sample.push(r.num_qubits, r.seed.to_string(), r.e_max);
        }
        let est = fit_pe(&sample, &config.fit)?;
        fits.push(FitReport::new(&sample.label, &est, &config.fit));
        series.push(median_series(sample.label.clone(), &sample));
    }
    let json = config.write_text("fit.json", &to_json(&fits))?;
    let plot = LinePlot {
        title: format!("median e_max at k*, M={}", opts.num_solutions),
        x_label: "L".into(),
        y_label: "e_max".into(),
        series,
        reference_lines: vec![PRODUCT_EMAX],
    };
    let svg = config.write_text("scan.svg", &plot.to_svg())?;
    Ok(ScanReport {
        rows,
        passed: true,
        fits,
        csv: config.out_dir.join("scan.csv"),
        json,
        svg,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogScanReport {
    pub fit: FitReport,
    pub csv: PathBuf,
    pub json: PathBuf,
    pub svg: PathBuf,
    pub passed: bool,
}

/// `e_max` of a catalog family over the scan range, with its fit.
pub fn catalog_family_sample(name: &str, l_min: usize, l_max: usize) -> Result<FamilySample> {
    let entry = catalog::lookup(name)?;
    let sizes: Vec<usize> = (l_min..=l_max).filter(|&l| entry.accepts(l)).collect();
    let values = sizes
        .par_iter()
        .map(|&l| Ok((l, checked_vcm(&entry.build(l)?)?.e_max())))
        .collect::<Result<Vec<_>>>()?;
    let mut sample = FamilySample::new(name);
    for (l, e) in values {
        sample.push(l, name, e);
    }
    Ok(sample)
}

pub fn catalog_scan(config: &RunConfig, name: &str, l_min: usize, l_max: usize) -> Result<CatalogScanReport> {
    check_scan_range(&ScanOptions { l_min, l_max, ..Default::default() })?;
    let sample = catalog_family_sample(name, l_min, l_max)?;
    let mut w = config.create(&format!("scan_{name}.csv"))?;
    writeln!(w, "L,e_max")?;
    for p in &sample.points {
        writeln!(w, "{},{}", p.size, report::sig12(p.e_max))?;
    }
    w.flush()?;
    let est = fit_pe(&sample, &config.fit)?;
    let fit = FitReport::new(name, &est, &config.fit);
    let json = config.write_text(&format!("fit_{name}.json"), &to_json(&fit))?;
    let plot = LinePlot {
        title: format!("e_max of {name}"),
        x_label: "L".into(),
        y_label: "e_max".into(),
        series: vec![median_series(name.to_string(), &sample)],
        reference_lines: vec![PRODUCT_EMAX],
    };
    let svg = config.write_text(&format!("scan_{name}.svg"), &plot.to_svg())?;
    Ok(CatalogScanReport {
        passed: est.is_sane(),
        fit,
        csv: config.out_dir.join(format!("scan_{name}.csv")),
        json,
        svg,
    })
}

// ---------------------------------------------------------------- analyze

#[derive(Clone, Debug)]
pub enum StateSource {
    Catalog { name: String, num_qubits: usize },
    File(PathBuf),
}

#[derive(Clone, Debug, Serialize)]
pub struct SiteCoefficients {
    pub l: usize,
    /// `[re, im]` for x, y, z.
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogComparison {
    pub expected_p: u8,
    pub note: String,
    pub expected_e_max: Option<f64>,
    pub e_max_deviation: Option<f64>,
    pub witness: Option<String>,
    pub witness_fluctuation: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BruteForceReport {
    pub complex_optimum: f64,
    pub hermitian_optimum: f64,
    pub from_eigvec: f64,
    pub from_greedy: Option<f64>,
    /// `e_max · L / C`.
    pub lower_bound: f64,
    /// `e_max · L`.
    pub upper_bound: f64,
    pub within_bounds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    pub source: String,
    #[serde(flatten)]
    pub summary: VcmSummary,
    pub spectral_gap: f64,
    pub min_eigenvalue: f64,
    /// Axis shared by all sites when the top operator is `Σ_l σ_axis(l)`.
    pub uniform_axis: Option<String>,
    pub top_operator: Vec<SiteCoefficients>,
    pub catalog: Option<CatalogComparison>,
    pub brute_force: Option<BruteForceReport>,
    pub vcm_csv: PathBuf,
    pub passed: bool,
}

const COMPARE_TOL: f64 = 1e-8;

fn uniform_axis(coeffs: &crate::vcm::AdditiveOperatorCoeffs) -> Option<PauliAxis> {
    PauliAxis::ALL.into_iter().find(|&axis| {
        let c1 = coeffs.coeff(1, axis);
        c1.norm() > 1e-6
            && (1..=coeffs.num_sites()).all(|l| {
                PauliAxis::ALL.into_iter().all(|b| {
                    let want = if b == axis { c1 } else { num_complex::Complex64::new(0.0, 0.0) };
                    (coeffs.coeff(l, b) - want).norm() < 1e-6
                })
            })
    })
}

pub fn state_analyze(config: &RunConfig, source: &StateSource, brute_force: bool) -> Result<AnalyzeReport> {
    let (label, state, entry) = match source {
        StateSource::Catalog { name, num_qubits } => {
            let entry = catalog::lookup(name)?;
            (format!("{name}_L{num_qubits}"), entry.build(*num_qubits)?, Some(entry))
        }
        StateSource::File(path) => {
            let file = File::open(path)?;
            let state = PureState::read_text(BufReader::new(file))?;
            let stem = path.file_stem().map_or("state".into(), |s| s.to_string_lossy().into_owned());
            (stem, state, None)
        }
    };
    let l = state.num_qubits();
    let vcm = compute_vcm(&state)?;
    let mut passed = vcm.check_structure(STRUCTURE_TOL).is_ok();
    let csv_name = format!("vcm_{label}.csv");
    let mut w = config.create(&csv_name)?;
    vcm.write_csv(&mut w)?;
    w.flush()?;

    let top = max_fluctuating_operator(&vcm);
    let top_operator = (1..=l)
        .map(|site| {
            let c = |a| {
                let v = top.coeff(site, a);
                [v.re, v.im]
            };
            SiteCoefficients { l: site, x: c(PauliAxis::X), y: c(PauliAxis::Y), z: c(PauliAxis::Z) }
        })
        .collect();

    let catalog = match entry {
        Some(e) => {
            let expected = e.expected_emax.map(|f| f(l));
            let deviation = expected.map(|x| (vcm.e_max() - x).abs());
            if deviation.is_some_and(|d| d > COMPARE_TOL) {
                passed = false;
            }
            let witness_fluctuation = e.witness.map(|w| w(l).and_then(|c| fluctuation_of(&state, &c))).transpose()?;
            Some(CatalogComparison {
                expected_p: e.expected_p,
                note: format!("p={} family", e.expected_p),
                expected_e_max: expected,
                e_max_deviation: deviation,
                witness: e.witness_label.map(str::to_string),
                witness_fluctuation,
            })
        }
        None => None,
    };

    let brute_force = if brute_force {
        let complex = brute_force_max_fluctuation(&state, &BruteForceConfig { seed: config.seed, ..Default::default() })?;
        let hermitian = brute_force_max_fluctuation(
            &state,
            &BruteForceConfig { seed: config.seed, hermitian_only: true, ..Default::default() },
        )?;
        let c = c_factor(&top);
        let lower = vcm.e_max() * l as f64 / c;
        let upper = vcm.e_max() * l as f64;
        let within = complex.best >= lower - 1e-4 && complex.best <= upper + 1e-6;
        passed &= within;
        Some(BruteForceReport {
            complex_optimum: complex.best,
            hermitian_optimum: hermitian.best,
            from_eigvec: complex.from_eigvec,
            from_greedy: complex.from_greedy,
            lower_bound: lower,
            upper_bound: upper,
            within_bounds: within,
        })
    } else {
        None
    };

    Ok(AnalyzeReport {
        source: label,
        summary: vcm.summary(),
        spectral_gap: vcm.spectral_gap(),
        min_eigenvalue: vcm.min_eigenvalue(),
        uniform_axis: uniform_axis(&top).map(|a| a.label().to_string()),
        top_operator,
        catalog,
        brute_force,
        vcm_csv: config.out_dir.join(csv_name),
        passed,
    })
}

// ---------------------------------------------------------------- analytic

#[derive(Clone, Debug)]
pub enum KSelection {
    All,
    One(usize),
}

#[derive(Clone, Debug)]
pub struct AnalyticOptions {
    pub num_qubits: usize,
    pub num_solutions: usize,
    pub divisor: Option<f64>,
    pub k: Option<KSelection>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentRow {
    #[serde(flatten)]
    pub check: MomentCheck,
    pub mean_residual: f64,
    pub variance_residual: f64,
    pub within_slack: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyVarianceCheck {
    pub s: f64,
    pub k_star: usize,
    pub formula: f64,
    pub simulated: f64,
    pub ratio: f64,
    pub residual: f64,
    pub within_slack: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    #[serde(rename = "L")]
    pub num_qubits: usize,
    #[serde(rename = "M")]
    pub num_solutions: usize,
    pub solutions: Vec<usize>,
    #[serde(rename = "R")]
    pub iterations: usize,
    pub theta: f64,
    pub mean_slack: f64,
    pub variance_slack: f64,
    pub rows: Vec<MomentRow>,
    pub family_variance: Option<FamilyVarianceCheck>,
    pub max_mean_residual: f64,
    pub max_variance_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailRootReport {
    pub m: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "f_K")]
    pub f_k: f64,
    pub binary_entropy_bits: f64,
    pub passed: bool,
}

pub fn analytic_moments(config: &RunConfig, opts: &AnalyticOptions) -> Result<MomentReport> {
    let l = opts.num_qubits;
    let seed = derive_seed(config.seed, &[l as u64, opts.num_solutions as u64]);
    let inst = GroverInstance::random(l, opts.num_solutions, &mut ChaCha8Rng::seed_from_u64(seed))?;
    let r = inst.iterations();
    let ks: Vec<usize> = match (&opts.k, opts.divisor) {
        (Some(KSelection::All), _) | (None, None) => (0..=r).collect(),
        (Some(KSelection::One(k)), _) => vec![*k],
        (None, Some(s)) => vec![k_star(r, s)?],
    };
    let variance_slack = VARIANCE_SLACK_PER_SITE * l as f64;
    let rows = ks
        .par_iter()
        .map(|&k| {
            let check = analytic::check_moments(&inst, k)?;
            let (mr, vr) = (check.mean_residual(), check.variance_residual());
            Ok(MomentRow {
                check,
                mean_residual: mr,
                variance_residual: vr,
                within_slack: mr <= MEAN_SLACK && vr <= variance_slack,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let family_variance = match opts.divisor {
        Some(s) => {
            let k = k_star(r, s)?;
            let formula = analytic::family_variance_at_kstar(l, s)?;
            let (_, simulated) = analytic::mx_moments(&inst.closed_form_state(k)?);
            let residual = (simulated - formula).abs();
            Some(FamilyVarianceCheck {
                s,
                k_star: k,
                formula,
                simulated,
                ratio: simulated / formula,
                residual,
                within_slack: residual <= variance_slack,
            })
        }
        None => None,
    };
    let max_mean = rows.iter().map(|r| r.mean_residual).fold(0.0, f64::max);
    let max_var = rows.iter().map(|r| r.variance_residual).fold(0.0, f64::max);
    let passed = rows.iter().all(|r| r.within_slack) && family_variance.as_ref().is_none_or(|f| f.within_slack);
    Ok(MomentReport {
        num_qubits: l,
        num_solutions: opts.num_solutions,
        solutions: inst.solutions().to_vec(),
        iterations: r,
        theta: inst.theta(),
        mean_slack: MEAN_SLACK,
        variance_slack,
        rows,
        family_variance,
        max_mean_residual: max_mean,
        max_variance_residual: max_var,
        passed,
    })
}

pub fn analytic_tail_root(m: f64) -> Result<TailRootReport> {
    let k = analytic::solve_k(m)?;
    let f_k = analytic::tail_exponent(m, k);
    Ok(TailRootReport {
        m,
        k,
        f_k,
        binary_entropy_bits: analytic::binary_entropy_bits(k),
        passed: f_k.abs() <= TAIL_ROOT_TOL && k > 0.5 && k < 1.0,
    })
}

// ---------------------------------------------------------------- catalog

#[derive(Clone, Debug, Serialize)]
pub struct CatalogListing {
    pub name: &'static str,
    pub expected_p: u8,
    pub expected_emax: Option<&'static str>,
    pub witness: Option<&'static str>,
    pub even_only: bool,
}

pub fn catalog_list() -> Vec<CatalogListing> {
    catalog::entries()
        .iter()
        .map(|e| CatalogListing {
            name: e.name,
            expected_p: e.expected_p,
            expected_emax: e.expected_emax_label,
            witness: e.witness_label,
            even_only: e.even_only,
        })
        .collect()
}

/// Writes `report` as pretty JSON to `name` under the output directory and
/// returns the text.
pub fn save_report<T: Serialize>(config: &RunConfig, name: &str, report: &T) -> Result<String> {
    let text = to_json(report);
    config.write_text(name, &text)?;
    Ok(text)
}

/// Saves `state` in the amplitude text format.
pub fn save_state(path: &Path, state: &PureState) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    state.write_text(&mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> (tempfile::TempDir, RunConfig) {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::new(7, dir.path());
        (dir, cfg)
    }

    #[test]
    fn trace_l8_rows_and_plateau() {
        let (_d, cfg) = config();
        let r = grover_trace(&cfg, 8, &SolutionSource::Explicit(vec![19])).unwrap();
        assert_eq!(r.rows, 243);
        assert!(r.passed);
        let text = fs::read_to_string(&r.csv).unwrap();
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
        assert_eq!(data.len(), 243);
        assert!(data[..9].iter().all(|l| l.ends_with(",2")), "{:?}", &data[..9]);
    }

    #[test]
    fn scan_rejects_bad_ranges() {
        let (_d, cfg) = config();
        let bad = ScanOptions { l_min: 4, ..Default::default() };
        assert!(scan_rows(&cfg, &bad).is_err());
        let bad = ScanOptions { l_max: 25, ..Default::default() };
        assert!(scan_rows(&cfg, &bad).is_err());
    }

    #[test]
    fn scan_is_deterministic() {
        let opts = ScanOptions { l_min: 6, l_max: 9, fractions: vec![2.0], instances: 2, num_solutions: 1 };
        let (_d, cfg) = config();
        let a = scan_rows(&cfg, &opts).unwrap();
        let b = scan_rows(&cfg, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        let (_d2, other) = (tempfile::tempdir().unwrap(), RunConfig::new(8, "unused"));
        assert_ne!(scan_rows(&other, &opts).unwrap(), a);
    }

    #[test]
    fn ghz_catalog_scan() {
        let (_d, cfg) = config();
        let r = catalog_scan(&cfg, "ghz", 6, 14).unwrap();
        assert!((r.fit.p_e - 2.0).abs() < 1e-3);
        assert!(r.passed);
    }

    #[test]
    fn analyze_catalog_states() {
        let (_d, cfg) = config();
        let r = state_analyze(&cfg, &StateSource::Catalog { name: "ghz".into(), num_qubits: 10 }, false).unwrap();
        assert!((r.summary.e_max - 10.0).abs() < 1e-9);
        assert!((r.summary.c - 1.0).abs() < 1e-9);
        assert_eq!(r.uniform_axis.as_deref(), Some("z"));
        assert!(r.passed);
        let w = state_analyze(&cfg, &StateSource::Catalog { name: "w".into(), num_qubits: 10 }, false).unwrap();
        assert!(w.summary.e_max <= 4.0);
        assert_eq!(w.catalog.unwrap().note, "p=1 family");
    }

    #[test]
    fn analyze_round_trips_through_file() {
        let (d, cfg) = config();
        let inst = GroverInstance::new(10, &[77]).unwrap();
        let state = inst.closed_form_state(k_star(inst.iterations(), 2.0).unwrap()).unwrap();
        let path = d.path().join("psi.txt");
        save_state(&path, &state).unwrap();
        let r = state_analyze(&cfg, &StateSource::File(path), true).unwrap();
        assert!((r.summary.e_max - compute_vcm(&state).unwrap().e_max()).abs() < 1e-9);
        assert!(r.brute_force.unwrap().within_bounds);
        assert!(r.passed);
    }

    #[test]
    fn analytic_examples() {
        let (_d, cfg) = config();
        let opts = AnalyticOptions { num_qubits: 14, num_solutions: 1, divisor: Some(2.0), k: None };
        let r = analytic_moments(&cfg, &opts).unwrap();
        let f = r.family_variance.unwrap();
        // next-order term L/2 on top of L²/4
        assert!((f.ratio - (1.0 + 2.0 / 14.0)).abs() < 0.01, "{}", f.ratio);
        assert!(f.within_slack);
        assert!(r.passed);

        let opts = AnalyticOptions { num_qubits: 12, num_solutions: 1, divisor: None, k: Some(KSelection::All) };
        let r = analytic_moments(&cfg, &opts).unwrap();
        assert_eq!(r.rows.len(), r.iterations + 1);
        assert!(r.max_mean_residual <= 2.0);

        let t = analytic_tail_root(0.5).unwrap();
        assert!((t.k - 0.8900).abs() < 1e-4);
        assert!(t.passed);
        assert!(analytic_tail_root(1.5).is_err());

        let bad = AnalyticOptions { num_qubits: 4, num_solutions: 4, divisor: None, k: None };
        assert!(matches!(analytic_moments(&cfg, &bad), Err(Error::ClassicallyEasy { .. })));
    }

    #[test]
    fn listing_covers_catalog() {
        let l = catalog_list();
        assert_eq!(l.len(), catalog::entries().len());
        assert!(l.iter().any(|e| e.name == "ghz" && e.expected_p == 2));
    }
}
