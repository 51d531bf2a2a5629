//! Closed-form Grover results used to check the simulation: total
//! x-magnetization moments, the half-space solution construction with
//! `M = sqrt(N)`, the tail bound root `K`, and the speedup scales.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grover::GroverInstance;
use crate::statevector::{PauliAxis, PureState};
use crate::vcm::{AdditiveOperatorCoeffs, LocalOperators};

/// Leading coefficients of `⟨M_x⟩ = mean_leading·L + O(1)` and
/// `⟨(ΔM_x)²⟩ = variance_leading·L² + O(L)` for `|ψ_k⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MxMoments {
    pub k: usize,
    pub theta: f64,
    pub mean_leading: f64,
    pub variance_leading: f64,
}

impl MxMoments {
    pub fn mean(&self, l: usize) -> f64 {
        self.mean_leading * l as f64
    }

    pub fn variance(&self, l: usize) -> f64 {
        self.variance_leading * (l * l) as f64
    }
}

pub fn grover_mx_moments(inst: &GroverInstance, k: usize) -> MxMoments {
    moments_at_angle(k, inst.theta())
}

fn moments_at_angle(k: usize, theta: f64) -> MxMoments {
    let half = (2 * k + 1) as f64 * theta / 2.0;
    MxMoments {
        k,
        theta,
        mean_leading: half.cos().powi(2),
        variance_leading: 0.25 * (2.0 * half).sin().powi(2),
    }
}

/// `(1/4) sin²(π/s) L²`.
pub fn family_variance_at_kstar(l: usize, s: f64) -> Result<f64> {
    if !(s >= 1.0) {
        return Err(Error::InvalidArgument(format!("divisor s must be >= 1, got {s}")));
    }
    Ok(0.25 * (std::f64::consts::PI / s).sin().powi(2) * (l * l) as f64)
}

/// Distribution of `M_x = Σ_l σ_x(l)`: entry `j` is `P(M_x = -L + 2j)`.
pub fn mx_distribution(state: &PureState) -> Vec<f64> {
    let l = state.num_qubits();
    let mut rotated = state.clone();
    rotated.hadamard_transform();
    let mut p = vec![0.0; l + 1];
    for (x, a) in rotated.amplitudes().iter().enumerate() {
        // |→⟩ maps to |0⟩, so j counts zero bits
        p[l - x.count_ones() as usize] += a.norm_sqr();
    }
    p
}

/// `(⟨M_x⟩, ⟨(ΔM_x)²⟩)` from the exact distribution.
pub fn mx_moments(state: &PureState) -> (f64, f64) {
    let l = state.num_qubits() as f64;
    let dist = mx_distribution(state);
    let value = |j: usize| -l + 2.0 * j as f64;
    let mean: f64 = dist.iter().enumerate().map(|(j, p)| p * value(j)).sum();
    let second: f64 = dist.iter().enumerate().map(|(j, p)| p * value(j).powi(2)).sum();
    (mean, second - mean * mean)
}

/// `P(M_x >= K L)`.
pub fn mx_tail_probability(state: &PureState, k_bound: f64) -> f64 {
    let l = state.num_qubits() as f64;
    mx_distribution(state)
        .iter()
        .enumerate()
        .filter(|(j, _)| 2.0 * *j as f64 - l >= k_bound * l)
        .map(|(_, p)| p)
        .sum()
}

/// `f(k) = (1-m) ln 2 + k ln k + (1-k) ln(1-k)`, continuous at `k = 1`.
pub fn tail_exponent(m: f64, k: f64) -> f64 {
    let xlogx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    (1.0 - m) * std::f64::consts::LN_2 + xlogx(k) + xlogx(1.0 - k)
}

/// Root `K ∈ (1/2, 1)` of [`tail_exponent`] by bisection. `f(1/2) = -m ln 2 < 0`
/// and `f(1) = (1-m) ln 2 > 0`, so the root exists and is unique (f is
/// increasing on `[1/2, 1]`).
pub fn solve_k(m: f64) -> Result<f64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::InvalidArgument(format!("m must lie in (0, 1), got {m}")));
    }
    let (mut lo, mut hi) = (0.5f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tail_exponent(m, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Binary entropy in bits.
pub fn binary_entropy_bits(k: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    h(k) + h(1.0 - k)
}

/// Solutions `x_j = j` for `j = 1..sqrt(N)/2`, plus the multiples
/// `z · 2 sqrt(N)` for `z = 0..sqrt(N)/2 - 1`, giving `M = sqrt(N)`.
pub fn sqrt_n_solutions(l: usize) -> Result<Vec<usize>> {
    if !l.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("L must be even, got {l}")));
    }
    if l > 20 {
        return Err(Error::InvalidArgument(format!("L must be at most 20, got {l}")));
    }
    let root = 1usize << (l / 2);
    let half = root / 2;
    let mut sols: Vec<usize> = (1..=half).collect();
    sols.extend((0..half).map(|z| z * 2 * root));
    Ok(sols)
}

/// Instance with the split solution set above and its `|β⟩`, close to
/// `(|0…0 →…→⟩ + |→…→ 0…0⟩)/√2`.
pub fn beta_sqrt_n_construction(l: usize) -> Result<(GroverInstance, PureState)> {
    let inst = GroverInstance::new(l, &sqrt_n_solutions(l)?)?;
    let beta = inst.alpha_beta_states().1;
    Ok((inst, beta))
}

/// Contrast instance `x_j = j` for `j = 1..sqrt(N)`, whose `|β⟩` is close to
/// the product state `|0…0 →…→⟩`.
pub fn beta_sqrt_n_contrast(l: usize) -> Result<(GroverInstance, PureState)> {
    if !l.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("L must be even, got {l}")));
    }
    let sols: Vec<usize> = (1..=(1usize << (l / 2))).collect();
    let inst = GroverInstance::new(l, &sols)?;
    let beta = inst.alpha_beta_states().1;
    Ok((inst, beta))
}

/// `M'_x = Σ_{l <= L/2} σ_x(l) + Σ_{l > L/2} 1`, as unit-norm local operators.
pub fn half_chain_mx(l: usize) -> Result<LocalOperators> {
    let signs: Vec<f64> = (1..=l).map(|s| if s <= l / 2 { 1.0 } else { 0.0 }).collect();
    Ok(AdditiveOperatorCoeffs::signed_axis(&signs, PauliAxis::X)?.to_unit_local_operators())
}

/// Classical and quantum step scales `2^((1-m)L)` and its square root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpeedupScales {
    pub classical: f64,
    pub quantum: f64,
}

pub fn speedup_counts(l: usize, m: f64) -> Result<SpeedupScales> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::InvalidArgument(format!("m must lie in [0, 1), got {m}")));
    }
    let classical = ((1.0 - m) * l as f64).exp2();
    Ok(SpeedupScales { classical, quantum: classical.sqrt() })
}

/// One row of a moment-formula comparison.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MomentCheck {
    pub k: usize,
    pub mean_simulated: f64,
    pub mean_formula: f64,
    pub variance_simulated: f64,
    pub variance_formula: f64,
}

impl MomentCheck {
    pub fn mean_residual(&self) -> f64 {
        (self.mean_simulated - self.mean_formula).abs()
    }

    pub fn variance_residual(&self) -> f64 {
        (self.variance_simulated - self.variance_formula).abs()
    }
}

/// Compares `⟨M_x⟩` and `⟨(ΔM_x)²⟩` of the closed-form `|ψ_k⟩` with the
/// leading-order formulas.
pub fn check_moments(inst: &GroverInstance, k: usize) -> Result<MomentCheck> {
    let state = inst.closed_form_state(k)?;
    let (mean, var) = mx_moments(&state);
    let f = grover_mx_moments(inst, k);
    let l = inst.num_qubits();
    Ok(MomentCheck {
        k,
        mean_simulated: mean,
        mean_formula: f.mean(l),
        variance_simulated: var,
        variance_formula: f.variance(l),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grover::k_star;
    use crate::vcm::{compute_vcm, fluctuation_of};

    #[test]
    fn moments_peak_and_vanish() {
        // (2k+1)θ = π/2 exactly
        let m = moments_at_angle(0, std::f64::consts::FRAC_PI_2);
        assert!((m.variance_leading - 0.25).abs() < 1e-15);
        let m = moments_at_angle(0, 1e-6);
        assert!(m.variance_leading < 1e-12);
        let inst = GroverInstance::new(10, &[3]).unwrap();
        for k in 0..=inst.iterations() {
            let v = grover_mx_moments(&inst, k).variance_leading;
            assert!((0.0..=0.25).contains(&v));
        }
    }

    #[test]
    fn simulated_variance_l14() {
        let inst = GroverInstance::new(14, &[9875]).unwrap();
        let k = k_star(inst.iterations(), 2.0).unwrap();
        let c = check_moments(&inst, k).unwrap();
        // M = 1 next-order term: the solution branch adds sin²((2k+1)θ/2) L
        let half = (2 * k + 1) as f64 * inst.theta() / 2.0;
        let refined = c.variance_formula + half.sin().powi(2) * 14.0;
        assert!((c.variance_simulated - refined).abs() < 0.1, "{} vs {refined}", c.variance_simulated);
        assert!(c.variance_residual() <= 3.0 * 14.0);
    }

    #[test]
    fn mx_moments_agree_with_operator_route() {
        let inst = GroverInstance::new(8, &[19]).unwrap();
        let s = inst.closed_form_state(5).unwrap();
        let (mean, var) = mx_moments(&s);
        let direct_mean: f64 = (1..=8).map(|l| s.pauli_expectation(l, PauliAxis::X).unwrap()).sum();
        let direct_var = fluctuation_of(&s, &AdditiveOperatorCoeffs::uniform_axis(8, PauliAxis::X).unwrap()).unwrap();
        assert!((mean - direct_mean).abs() < 1e-10);
        assert!((var - direct_var).abs() < 1e-10);
    }

    #[test]
    fn family_variance_examples() {
        assert!((family_variance_at_kstar(10, 2.0).unwrap() - 25.0).abs() < 1e-12);
        assert!(family_variance_at_kstar(10, 1.0).unwrap().abs() < 1e-12);
        assert!((family_variance_at_kstar(12, 3.0).unwrap() - 27.0).abs() < 1e-12);
        assert!(family_variance_at_kstar(12, 0.5).is_err());

        let inst = GroverInstance::new(12, &[1332]).unwrap();
        let k = k_star(inst.iterations(), 3.0).unwrap();
        let (_, var) = mx_moments(&inst.closed_form_state(k).unwrap());
        assert!((var - 27.0).abs() <= 12.0, "{var}");
    }

    #[test]
    fn solve_k_half() {
        let k = solve_k(0.5).unwrap();
        assert!((k - 0.8900).abs() < 1e-3, "{k}");
        assert!((binary_entropy_bits(k) - 0.5).abs() < 1e-9);
        for m in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let k = solve_k(m).unwrap();
            assert!(tail_exponent(m, k).abs() <= 1e-10);
            assert!(k > 0.5 && k < 1.0);
        }
        assert!(solve_k(0.0).is_err());
        assert!(solve_k(1.0).is_err());
    }

    #[test]
    fn solve_k_limits() {
        // f(1/2) = -m ln 2, so small m pushes the root to 1/2 and m near 1 pushes it to 1
        assert!(solve_k(1e-6).unwrap() < 0.51);
        assert!(solve_k(1.0 - 1e-6).unwrap() > 0.99);
        assert!((tail_exponent(0.3, 0.5) + 0.3 * std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn sqrt_n_construction() {
        let sols = sqrt_n_solutions(10).unwrap();
        assert_eq!(sols.len(), 32);
        assert_eq!(&sols[..3], &[1, 2, 3]);
        assert_eq!(sols[16], 0);
        assert_eq!(sols[17], 64);
        assert!(sols.iter().all(|&x| x < 1024));
        assert!(sqrt_n_solutions(9).is_err());

        // ⟨M_x⟩/L approaches 1/2 with an O(1) offset
        for l in [8, 10, 12, 14, 16] {
            let (_, beta) = beta_sqrt_n_construction(l).unwrap();
            let (mean, _) = mx_moments(&beta);
            let offset = mean - l as f64 / 2.0;
            assert!((-1.5..=0.0).contains(&offset), "L={l} ⟨M_x⟩={mean}");
        }
    }

    #[test]
    fn half_chain_operator_fluctuates_macroscopically() {
        let mut values = Vec::new();
        for l in [8, 10, 12, 14, 16] {
            let (_, beta) = beta_sqrt_n_construction(l).unwrap();
            let op = half_chain_mx(l).unwrap();
            assert_eq!(op.scale, 1.0);
            assert_eq!(op.coeffs.identity_offsets()[l - 1], 1.0);
            let f = fluctuation_of(&beta, &op.coeffs).unwrap();
            // the branches differ by about L/2 in M'_x, so f is near L²/16
            let ratio = f / (l * l) as f64;
            assert!((0.0625..0.08).contains(&ratio), "L={l}: {ratio}");
            values.push(f);
        }
        assert!(values[4] / values[0] > 3.0, "{values:?}");
    }

    #[test]
    fn contrast_instance_is_product_like() {
        let (_, beta) = beta_sqrt_n_contrast(10).unwrap();
        let e = compute_vcm(&beta).unwrap().e_max();
        assert!(e < 3.0, "{e}");
        let (_, beta) = beta_sqrt_n_construction(10).unwrap();
        assert!(compute_vcm(&beta).unwrap().e_max() > 3.0);
    }

    #[test]
    fn moment_slack_holds_for_every_k() {
        for (l, x) in [(10, 700), (12, 1), (14, 12000)] {
            let inst = GroverInstance::new(l, &[x]).unwrap();
            for k in 0..=inst.iterations() {
                let c = check_moments(&inst, k).unwrap();
                assert!(c.mean_residual() <= 2.0, "L={l} k={k}: {}", c.mean_residual());
                assert!(c.variance_residual() <= 3.0 * l as f64, "L={l} k={k}: {}", c.variance_residual());
            }
        }
    }

    #[test]
    fn tail_above_k_shrinks_with_size() {
        let k = solve_k(0.5).unwrap();
        let tails: Vec<f64> = [8, 10, 12, 14]
            .iter()
            .map(|&l| mx_tail_probability(&beta_sqrt_n_construction(l).unwrap().1, k))
            .collect();
        assert!(tails.windows(2).all(|w| w[1] < w[0]), "{tails:?}");
        let dist = mx_distribution(&beta_sqrt_n_construction(10).unwrap().1);
        assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn speedup_examples() {
        let s = speedup_counts(10, 0.0).unwrap();
        assert_eq!((s.classical, s.quantum), (1024.0, 32.0));
        let s = speedup_counts(16, 0.5).unwrap();
        assert_eq!((s.classical, s.quantum), (256.0, 16.0));
        assert!(speedup_counts(10, 1.0).is_err());
        for l in 4..=20 {
            let r = GroverInstance::new(l, &[1]).unwrap().iterations() as f64;
            let approx = crate::grover::asymptotic_iterations(l, 1).ceil();
            assert!((r - approx).abs() <= 1.0, "L={l}");
        }
    }
}
