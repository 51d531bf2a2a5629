//! Grover search: gate-by-gate trajectory and the closed-form rotated states.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::statevector::{PureState, MAX_QUBITS};

/// Search problem over `L` qubits with a fixed solution set.
#[derive(Clone, Debug, PartialEq)]
pub struct GroverInstance {
    num_qubits: usize,
    solutions: Vec<usize>,
    theta: f64,
    iterations: usize,
}

impl GroverInstance {
    /// Validates the solution set and derives the rotation angle and the
    /// iteration count `R = ceil(arccos(sqrt(M/N)) / θ)`.
    pub fn new(num_qubits: usize, solutions: &[usize]) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount(num_qubits));
        }
        let n = 1usize << num_qubits;
        if solutions.is_empty() {
            return Err(Error::EmptySolutions);
        }
        let mut sorted = solutions.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateSolution(w[0]));
            }
        }
        if let Some(&x) = sorted.iter().find(|&&x| x >= n) {
            return Err(Error::BasisIndex { index: x, num_qubits });
        }
        let m = sorted.len();
        if 4 * m >= n {
            return Err(Error::ClassicallyEasy { m, n });
        }
        let ratio = m as f64 / n as f64;
        let theta = 2.0 * ratio.sqrt().asin();
        let iterations = (ratio.sqrt().acos() / theta).ceil() as usize;
        Ok(Self { num_qubits, solutions: sorted, theta, iterations })
    }

    /// Draws `m` distinct solutions uniformly without replacement.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, m: usize, rng: &mut R) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount(num_qubits));
        }
        let n = 1usize << num_qubits;
        if m == 0 {
            return Err(Error::EmptySolutions);
        }
        if 4 * m >= n {
            return Err(Error::ClassicallyEasy { m, n });
        }
        let picks = sample(rng, n, m).into_vec();
        Self::new(num_qubits, &picks)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn solutions(&self) -> &[usize] {
        &self.solutions
    }

    pub fn num_solutions(&self) -> usize {
        self.solutions.len()
    }

    pub fn search_space(&self) -> usize {
        1 << self.num_qubits
    }

    /// Rotation angle θ with `cos(θ/2) = sqrt((N-M)/N)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Number of Grover iterations `R`.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Schedule length `T_Q = L + (2L + 2) R`.
    pub fn total_steps(&self) -> usize {
        self.num_qubits + (2 * self.num_qubits + 2) * self.iterations
    }

    /// Angle `(2k+1)θ/2` of the state after `k` iterations.
    pub fn angle(&self, k: usize) -> f64 {
        (2 * k + 1) as f64 * self.theta / 2.0
    }

    /// `|⟨β|ψ_R⟩|²`.
    pub fn success_probability(&self) -> f64 {
        self.angle(self.iterations).sin().powi(2)
    }

    /// `(|α⟩, |β⟩)`: uniform over non-solutions and over solutions.
    pub fn alpha_beta_states(&self) -> (PureState, PureState) {
        let n = self.search_space();
        let m = self.solutions.len();
        let a = Complex64::new(1.0 / ((n - m) as f64).sqrt(), 0.0);
        let b = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
        let mut alpha = vec![a; n];
        let mut beta = vec![Complex64::new(0.0, 0.0); n];
        for &x in &self.solutions {
            alpha[x] = Complex64::new(0.0, 0.0);
            beta[x] = b;
        }
        (
            PureState::from_amplitudes(self.num_qubits, alpha).expect("normalized by construction"),
            PureState::from_amplitudes(self.num_qubits, beta).expect("normalized by construction"),
        )
    }

    /// `cos((2k+1)θ/2)|α⟩ + sin((2k+1)θ/2)|β⟩`, for `0 <= k <= R`.
    pub fn closed_form_state(&self, k: usize) -> Result<PureState> {
        if k > self.iterations {
            return Err(Error::Iteration { k, r: self.iterations });
        }
        let n = self.search_space();
        let m = self.solutions.len();
        let phi = self.angle(k);
        let a = phi.cos() / ((n - m) as f64).sqrt();
        let b = phi.sin() / (m as f64).sqrt();
        let mut amps = vec![Complex64::new(a, 0.0); n];
        for &x in &self.solutions {
            amps[x] = Complex64::new(b, 0.0);
        }
        PureState::from_unnormalized(self.num_qubits, amps)
    }

    /// One iteration: oracle, Hadamard transform, phase shift, Hadamard transform.
    pub fn iterate(&self, state: &mut PureState) -> Result<()> {
        self.check_state(state)?;
        state.apply_oracle(&self.solutions)?;
        state.hadamard_transform();
        state.apply_phase_shift();
        state.hadamard_transform();
        Ok(())
    }

    /// `|ψ_k⟩` reached through the gate sequence.
    pub fn gate_state(&self, k: usize) -> Result<PureState> {
        let mut s = PureState::basis_state(self.num_qubits, 0)?;
        s.hadamard_transform();
        for _ in 0..k {
            self.iterate(&mut s)?;
        }
        Ok(s)
    }

    fn check_state(&self, state: &PureState) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::InvalidArgument(format!(
                "state has {} qubits, instance has {}",
                state.num_qubits(),
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// Runs the full schedule, calling `probe` on the state after every step
    /// (step 0 is the initial `|0…0⟩`). A probe error stops the run and
    /// returns the partial trace with `failure` set.
    pub fn run_with_trace<F>(&self, mut probe: F) -> StepTrace
    where
        F: FnMut(&PureState) -> Result<f64>,
    {
        let mut trace = StepTrace { instance: self.clone(), records: Vec::new(), failure: None };
        let mut state = PureState::basis_state(self.num_qubits, 0).expect("valid instance");
        let mut step = 0usize;

        let mut record = |state: &PureState, label: StepLabel, trace: &mut StepTrace, step: &mut usize| -> bool {
            match probe(state) {
                Ok(value) => {
                    trace.records.push(StepRecord { step: *step, label, value });
                    *step += 1;
                    true
                }
                Err(e) => {
                    trace.failure = Some(Error::Probe { step: *step, msg: e.to_string() }.to_string());
                    false
                }
            }
        };

        if !record(&state, StepLabel::Init, &mut trace, &mut step) {
            return trace;
        }
        for site in 1..=self.num_qubits {
            state.apply_hadamard(site).expect("site in range");
            if !record(&state, StepLabel::Ht, &mut trace, &mut step) {
                return trace;
            }
        }
        for _ in 0..self.iterations {
            state.apply_oracle(&self.solutions).expect("validated solutions");
            if !record(&state, StepLabel::Oracle, &mut trace, &mut step) {
                return trace;
            }
            for site in 1..=self.num_qubits {
                state.apply_hadamard(site).expect("site in range");
                if !record(&state, StepLabel::Ht, &mut trace, &mut step) {
                    return trace;
                }
            }
            state.apply_phase_shift();
            if !record(&state, StepLabel::Phase, &mut trace, &mut step) {
                return trace;
            }
            for site in 1..=self.num_qubits {
                state.apply_hadamard(site).expect("site in range");
                if !record(&state, StepLabel::Ht, &mut trace, &mut step) {
                    return trace;
                }
            }
        }
        trace
    }
}

/// Probe step `k* = ceil(R / s)`.
pub fn k_star(iterations: usize, divisor: f64) -> Result<usize> {
    if !(divisor >= 1.0) || !divisor.is_finite() {
        return Err(Error::InvalidArgument(format!("divisor s must be >= 1, got {divisor}")));
    }
    let q = iterations as f64 / divisor;
    // guard against representation error for exact quotients
    let r = q.round();
    Ok(if (q - r).abs() < 1e-12 { r as usize } else { q.ceil() as usize })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepLabel {
    Init,
    Ht,
    Oracle,
    Phase,
}

impl StepLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            StepLabel::Init => "INIT",
            StepLabel::Ht => "HT",
            StepLabel::Oracle => "ORACLE",
            StepLabel::Phase => "PHASE",
        }
    }
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub label: StepLabel,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct StepTrace {
    pub instance: GroverInstance,
    pub records: Vec<StepRecord>,
    pub failure: Option<String>,
}

impl StepTrace {
    /// A trace is complete when no probe failed and every step was recorded.
    pub fn is_complete(&self) -> bool {
        self.failure.is_none() && self.records.len() == self.instance.total_steps() + 1
    }

    /// Largest absolute change of the probed value across any HT step.
    pub fn max_ht_drift(&self) -> f64 {
        self.records
            .windows(2)
            .filter(|w| w[1].label == StepLabel::Ht)
            .map(|w| (w[1].value - w[0].value).abs())
            .fold(0.0, f64::max)
    }
}

/// Angle helper used by reports: `(π/4) sqrt(N/M)`.
pub fn asymptotic_iterations(num_qubits: usize, m: usize) -> f64 {
    PI / 4.0 * ((1usize << num_qubits) as f64 / m as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn build_instance_l8() {
        let g = GroverInstance::new(8, &[19]).unwrap();
        assert_eq!(g.search_space(), 256);
        assert!(((g.theta() / 2.0).sin() - 1.0 / 16.0).abs() < 1e-15);
        // arccos(1/16) / (2 asin(1/16)) = 12.058..
        let expected = ((1.0f64 / 16.0).acos() / (2.0 * (1.0f64 / 16.0).asin())).ceil() as usize;
        assert_eq!(expected, 13);
        assert_eq!(g.iterations(), 13);
        assert_eq!(g.total_steps(), 242);
    }

    #[test]
    fn build_instance_errors() {
        assert!(matches!(GroverInstance::new(2, &[3]), Err(Error::ClassicallyEasy { m: 1, n: 4 })));
        assert!(matches!(GroverInstance::new(6, &[3, 3]), Err(Error::DuplicateSolution(3))));
        assert!(matches!(GroverInstance::new(6, &[]), Err(Error::EmptySolutions)));
        assert!(matches!(GroverInstance::new(6, &[64]), Err(Error::BasisIndex { .. })));
    }

    #[test]
    fn alpha_beta_examples() {
        let g = GroverInstance::new(3, &[0]).unwrap();
        let (a, b) = g.alpha_beta_states();
        assert_eq!(b.probability(0), 1.0);
        assert!(a.probability(0) == 0.0);
        assert!(a.inner(&b).norm() < 1e-15);

        let g = GroverInstance::new(8, &[19]).unwrap();
        let (a, b) = g.alpha_beta_states();
        assert!(a.inner(&b).norm() < 1e-12);
        let mut psi0 = PureState::basis_state(8, 0).unwrap();
        psi0.hadamard_transform();
        let h = g.theta() / 2.0;
        let amps: Vec<Complex64> =
            a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x * h.cos() + y * h.sin()).collect();
        let combo = PureState::from_amplitudes(8, amps).unwrap();
        assert!(combo.fidelity(&psi0) >= 1.0 - 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let g = GroverInstance::new(8, &[19]).unwrap();
        let mut psi0 = PureState::basis_state(8, 0).unwrap();
        psi0.hadamard_transform();
        assert!(g.closed_form_state(0).unwrap().fidelity(&psi0) >= 1.0 - 1e-12);
        assert!(g.closed_form_state(13).unwrap().probability(19) >= 0.5);
        assert!(matches!(g.closed_form_state(14), Err(Error::Iteration { k: 14, r: 13 })));

        let g = GroverInstance::new(14, &[9875]).unwrap();
        let r = g.iterations();
        assert!(g.closed_form_state(r).unwrap().probability(9875) > 0.99);
    }

    #[test]
    fn single_iteration_rotates_by_theta() {
        let g = GroverInstance::new(6, &[11]).unwrap();
        let s = g.gate_state(1).unwrap();
        assert!((s.amplitude(11).re - (1.5 * g.theta()).sin()).abs() < 1e-10);
    }

    #[test]
    fn gate_path_matches_closed_form_l10() {
        let g = GroverInstance::new(10, &[700]).unwrap();
        let mut s = g.gate_state(0).unwrap();
        for k in 0..=g.iterations() {
            if k > 0 {
                g.iterate(&mut s).unwrap();
            }
            let f = s.fidelity(&g.closed_form_state(k).unwrap());
            assert!(f >= 1.0 - 1e-10, "k={k} fidelity {f}");
        }
    }

    #[test]
    fn success_probability_l12() {
        let g = GroverInstance::new(12, &[1234]).unwrap();
        let s = g.gate_state(g.iterations()).unwrap();
        assert!(s.probability(1234) >= 0.5);
        assert!((s.probability(1234) - g.success_probability()).abs() < 1e-10);
    }

    #[test]
    fn k_star_examples() {
        assert_eq!(k_star(13, 2.0).unwrap(), 7);
        assert_eq!(k_star(13, 4.0).unwrap(), 4);
        assert_eq!(k_star(13, 1.0).unwrap(), 13);
        assert_eq!(k_star(12, 3.0).unwrap(), 4);
        assert!(k_star(13, 0.5).is_err());
    }

    #[test]
    fn trace_length_and_labels() {
        let g = GroverInstance::new(4, &[5]).unwrap();
        let trace = g.run_with_trace(|s| Ok(s.norm_sqr()));
        assert!(trace.is_complete());
        assert_eq!(trace.records.len(), g.total_steps() + 1);
        assert_eq!(trace.records[0].label, StepLabel::Init);
        assert_eq!(trace.records[5].label, StepLabel::Oracle);
        assert_eq!(trace.records[10].label, StepLabel::Phase);
        for r in &trace.records {
            assert!((r.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn probe_failure_truncates_trace() {
        let g = GroverInstance::new(4, &[5]).unwrap();
        let mut calls = 0;
        let trace = g.run_with_trace(|_| {
            calls += 1;
            if calls > 6 {
                Err(Error::InvalidArgument("boom".into()))
            } else {
                Ok(0.0)
            }
        });
        assert!(!trace.is_complete());
        assert_eq!(trace.records.len(), 6);
        assert!(trace.failure.unwrap().contains("step 6"));
    }

    #[test]
    fn random_instances_are_seeded() {
        let a = GroverInstance::random(10, 2, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = GroverInstance::random(10, 2, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num_solutions(), 2);
    }
}
