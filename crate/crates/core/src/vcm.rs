//! Variance–covariance matrix of Pauli correlators, its top eigenpair, and the
//! additive operators built from it.
//!
//! Rows and columns are indexed by `(site, axis)` pairs in site-major order:
//! `3 * (l - 1) + axis`. Entries are connected correlators
//! `⟨σ_α(l) σ_α'(l')⟩ - ⟨σ_α(l)⟩⟨σ_α'(l')⟩`, with exact Pauli algebra on
//! coinciding sites, so the matrix is Hermitian and complex only inside the
//! 3x3 diagonal blocks.
//!
//! `e_max · L` is the largest fluctuation `⟨ΔA'† ΔA'⟩` over coefficient
//! tables with `Σ |c|² = L`; dividing the top eigenvector by `sqrt(C)` with
//! `C = max_l Σ_α |c_lα|²` gives a table that is feasible site by site.

use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, norm_sqr, CMatrix};
use crate::statevector::{PauliAxis, PureState, NORM_TOLERANCE};

/// Top eigenvalues closer than this are reported as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[inline]
pub fn vcm_index(site: usize, axis: PauliAxis) -> usize {
    3 * (site - 1) + axis.index()
}

#[derive(Clone, Debug)]
pub struct Vcm {
    num_qubits: usize,
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    top_eigvec: Vec<Complex64>,
}

impl Vcm {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn entry(&self, site: usize, axis: PauliAxis, site2: usize, axis2: PauliAxis) -> Complex64 {
        self.matrix.get(vcm_index(site, axis), vcm_index(site2, axis2))
    }

    /// Descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn e_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// Gap between the two largest eigenvalues (infinite for a 1x1 matrix).
    pub fn spectral_gap(&self) -> f64 {
        self.eigenvalues.get(1).map_or(f64::INFINITY, |e| self.eigenvalues[0] - e)
    }

    pub fn is_degenerate(&self) -> bool {
        self.spectral_gap() < DEGENERACY_GAP
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Top eigenvector scaled to `Σ |c|² = L`, largest-magnitude entry real positive.
    pub fn top_eigvec(&self) -> &[Complex64] {
        &self.top_eigvec
    }

    pub fn quadratic_form(&self, coeffs: &AdditiveOperatorCoeffs) -> f64 {
        self.matrix.quadratic_form(&coeffs.flat())
    }

    /// Checks hermiticity, positive semidefiniteness and the trace window
    /// `[2L, 3L]`, returning a description of the first violation.
    pub fn check_structure(&self, tol: f64) -> std::result::Result<(), String> {
        let l = self.num_qubits as f64;
        let herm = self.matrix.hermiticity_error();
        if herm > tol {
            return Err(format!("hermiticity error {herm:e}"));
        }
        if self.min_eigenvalue() < -tol {
            return Err(format!("negative eigenvalue {:e}", self.min_eigenvalue()));
        }
        let tr = self.trace();
        if tr < 2.0 * l - tol || tr > 3.0 * l + tol {
            return Err(format!("trace {tr} outside [{}, {}]", 2.0 * l, 3.0 * l));
        }
        Ok(())
    }

    /// CSV with header `l,alpha,lp,alphap,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "l,alpha,lp,alphap,re,im")?;
        for l in 1..=self.num_qubits {
            for a in PauliAxis::ALL {
                for lp in 1..=self.num_qubits {
                    for b in PauliAxis::ALL {
                        let v = self.entry(l, a, lp, b);
                        writeln!(w, "{l},{a},{lp},{b},{},{}", crate::report::sig12(v.re), crate::report::sig12(v.im))?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn summary(&self) -> VcmSummary {
        let top = max_fluctuating_operator(self);
        VcmSummary {
            num_qubits: self.num_qubits,
            e_max: self.e_max(),
            trace: self.trace(),
            degenerate: self.is_degenerate(),
            c: c_factor(&top),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VcmSummary {
    #[serde(rename = "L")]
    pub num_qubits: usize,
    pub e_max: f64,
    pub trace: f64,
    pub degenerate: bool,
    #[serde(rename = "C")]
    pub c: f64,
}

/// Builds the VCM of a normalized pure state and diagonalizes it.
pub fn compute_vcm(state: &PureState) -> Result<Vcm> {
    let n = state.norm_sqr();
    if (n - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(n));
    }
    let l = state.num_qubits();

    let bloch: Vec<[f64; 3]> = (1..=l)
        .map(|site| {
            let rho = state.site_density(site).expect("site in range");
            // ρ[i][j] = Σ ψ_i ψ_j*: ⟨σ_x⟩ = 2 Re ρ10, ⟨σ_y⟩ = 2 Im ρ10, ⟨σ_z⟩ = ρ00 - ρ11
            [2.0 * rho[1][0].re, 2.0 * rho[1][0].im, rho[0][0].re - rho[1][1].re]
        })
        .collect();

    let pairs: Vec<(usize, usize)> = (1..=l).flat_map(|a| (a + 1..=l).map(move |b| (a, b))).collect();
    let cross: Vec<[[f64; 3]; 3]> = pairs
        .par_iter()
        .map(|&(a, b)| pair_correlators(&state.pair_density(a, b).expect("distinct sites")))
        .collect();

    let dim = 3 * l;
    let mut m = CMatrix::zeros(dim);
    for site in 1..=l {
        let r = bloch[site - 1];
        for a in 0..3 {
            for b in 0..3 {
                // σ_a σ_b = δ_ab + i ε_abc σ_c
                let mut v = Complex64::new(if a == b { 1.0 } else { 0.0 }, 0.0);
                if a != b {
                    let c = 3 - a - b;
                    let sign = if (a + 1) % 3 == b { 1.0 } else { -1.0 };
                    v += Complex64::new(0.0, sign * r[c]);
                }
                v -= r[a] * r[b];
                m.set(3 * (site - 1) + a, 3 * (site - 1) + b, v);
            }
        }
    }
    for (&(s1, s2), corr) in pairs.iter().zip(&cross) {
        let (r1, r2) = (bloch[s1 - 1], bloch[s2 - 1]);
        for a in 0..3 {
            for b in 0..3 {
                let v = Complex64::new(corr[a][b] - r1[a] * r2[b], 0.0);
                m.set(3 * (s1 - 1) + a, 3 * (s2 - 1) + b, v);
                m.set(3 * (s2 - 1) + b, 3 * (s1 - 1) + a, v);
            }
        }
    }

    let eig = hermitian_eigen(&m);
    let mut top = eig.vectors[0].clone();
    let scale = (l as f64 / norm_sqr(&top)).sqrt();
    top.iter_mut().for_each(|c| *c *= scale);
    fix_phase(&mut top);
    Ok(Vcm { num_qubits: l, matrix: m, eigenvalues: eig.values, top_eigvec: top })
}

/// `⟨σ_a ⊗ σ_b⟩` for all axis pairs from a two-site density matrix.
fn pair_correlators(rho: &[[Complex64; 4]; 4]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for a in PauliAxis::ALL {
        let pa = a.matrix();
        for b in PauliAxis::ALL {
            let pb = b.matrix();
            let mut acc = ZERO;
            for i in 0..4 {
                for j in 0..4 {
                    let o = pa[j >> 1][i >> 1] * pb[j & 1][i & 1];
                    if o != ZERO {
                        acc += rho[i][j] * o;
                    }
                }
            }
            out[a.index()][b.index()] = acc.re;
        }
    }
    out
}

/// Rotates the global phase so the first largest-magnitude entry is real positive.
fn fix_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v.iter().position(|c| c.norm() >= max * (1.0 - 1e-9)).expect("max exists");
    let phase = v[pivot].conj() / v[pivot].norm();
    v.iter_mut().for_each(|c| *c *= phase);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Normalization {
    /// `Σ_{l,α} |c_lα|² = L`.
    SumL,
    /// `Σ_α |c_lα|² <= 1` on every site.
    PerSite,
}

/// Coefficient table `c_lα` of `ΔA = Σ_l Σ_α c_lα Δσ_α(l)`, plus identity
/// offsets `β(l)` recorded when local operators are rebuilt.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditiveOperatorCoeffs {
    coeffs: Vec<[Complex64; 3]>,
    normalization: Normalization,
    identity_offsets: Vec<f64>,
}

const NORMALIZATION_TOL: f64 = 1e-10;

impl AdditiveOperatorCoeffs {
    pub fn new(coeffs: Vec<[Complex64; 3]>, normalization: Normalization) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("no sites".into()));
        }
        let out = Self { identity_offsets: vec![0.0; coeffs.len()], coeffs, normalization };
        out.check_normalization()?;
        Ok(out)
    }

    /// Site-major flat vector of length `3L`.
    pub fn from_flat(flat: &[Complex64], normalization: Normalization) -> Result<Self> {
        if !flat.len().is_multiple_of(3) {
            return Err(Error::InvalidArgument(format!("length {} is not a multiple of 3", flat.len())));
        }
        Self::new(flat.chunks(3).map(|c| [c[0], c[1], c[2]]).collect(), normalization)
    }

    /// Unit weight on one axis at every site, with per-site signs.
    pub fn signed_axis(signs: &[f64], axis: PauliAxis) -> Result<Self> {
        let coeffs = signs
            .iter()
            .map(|&s| {
                let mut c = [ZERO; 3];
                c[axis.index()] = Complex64::new(s, 0.0);
                c
            })
            .collect();
        Self::new(coeffs, Normalization::PerSite)
    }

    /// `Σ_l σ_axis(l)` with unit weight per site (satisfies both normalizations).
    pub fn uniform_axis(num_sites: usize, axis: PauliAxis) -> Result<Self> {
        Self::signed_axis(&vec![1.0; num_sites], axis)
    }

    fn check_normalization(&self) -> Result<()> {
        match self.normalization {
            Normalization::SumL => {
                let total = self.total_weight();
                let l = self.num_sites() as f64;
                if (total - l).abs() > NORMALIZATION_TOL * l.max(1.0) {
                    return Err(Error::InvalidArgument(format!("sum of weights {total} != L = {l}")));
                }
            }
            Normalization::PerSite => {
                if let Some(l) = (1..=self.num_sites()).find(|&l| self.site_weight(l) > 1.0 + NORMALIZATION_TOL) {
                    return Err(Error::InvalidArgument(format!(
                        "site {l} weight {} exceeds 1",
                        self.site_weight(l)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn num_sites(&self) -> usize {
        self.coeffs.len()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn coeff(&self, site: usize, axis: PauliAxis) -> Complex64 {
        self.coeffs[site - 1][axis.index()]
    }

    pub fn sites(&self) -> &[[Complex64; 3]] {
        &self.coeffs
    }

    pub fn identity_offsets(&self) -> &[f64] {
        &self.identity_offsets
    }

    /// `Σ_α |c_lα|²`.
    pub fn site_weight(&self, site: usize) -> f64 {
        self.coeffs[site - 1].iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn total_weight(&self) -> f64 {
        (1..=self.num_sites()).map(|l| self.site_weight(l)).sum()
    }

    pub fn flat(&self) -> Vec<Complex64> {
        self.coeffs.iter().flatten().copied().collect()
    }

    /// Divides by `sqrt(C)` so that every site weight is at most one.
    pub fn per_site_renormalized(&self) -> Self {
        let c = c_factor(self);
        let s = if c > 0.0 { 1.0 / c.sqrt() } else { 1.0 };
        Self {
            coeffs: self.coeffs.iter().map(|row| row.map(|x| x * s)).collect(),
            normalization: Normalization::PerSite,
            identity_offsets: vec![0.0; self.num_sites()],
        }
    }

    /// Rebuilds unit-norm local operators `a(l) = s Σ_α c_lα σ_α + β(l) 1`,
    /// taking the largest common scale `s` so that the offsets `β(l) >= 0`
    /// are as small as possible. The norm counts each Pauli coefficient and
    /// the identity coefficient with unit weight. The rebuilt operator
    /// fluctuates exactly `s²` times as much as the input.
    pub fn to_unit_local_operators(&self) -> LocalOperators {
        let max_w = (1..=self.num_sites()).map(|l| self.site_weight(l)).fold(0.0, f64::max);
        let scale = if max_w > 0.0 { 1.0 / max_w.sqrt() } else { 1.0 };
        let coeffs: Vec<[Complex64; 3]> = self.coeffs.iter().map(|row| row.map(|x| x * scale)).collect();
        let identity_offsets = coeffs
            .iter()
            .map(|row| (1.0 - row.iter().map(|c| c.norm_sqr()).sum::<f64>()).max(0.0).sqrt())
            .collect();
        LocalOperators {
            scale,
            coeffs: Self { coeffs, normalization: Normalization::PerSite, identity_offsets },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperators {
    pub scale: f64,
    pub coeffs: AdditiveOperatorCoeffs,
}

impl LocalOperators {
    /// `s² Σ_α |c_lα|² + β(l)²`, which is one on every site.
    pub fn site_norm_sqr(&self, site: usize) -> f64 {
        self.coeffs.site_weight(site) + self.coeffs.identity_offsets[site - 1].powi(2)
    }
}

/// Top eigenvector as a `SumL` coefficient table.
pub fn max_fluctuating_operator(vcm: &Vcm) -> AdditiveOperatorCoeffs {
    AdditiveOperatorCoeffs::from_flat(&vcm.top_eigvec, Normalization::SumL).expect("eigenvector scaled to L")
}

/// `C = max_l Σ_α |c_lα|²`.
pub fn c_factor(coeffs: &AdditiveOperatorCoeffs) -> f64 {
    (1..=coeffs.num_sites()).map(|l| coeffs.site_weight(l)).fold(0.0, f64::max)
}

/// Applies `ΔA = Σ c_lα (σ_α(l) - ⟨σ_α(l)⟩)` to the state and returns `‖ΔA ψ‖²`.
pub fn fluctuation_of(state: &PureState, coeffs: &AdditiveOperatorCoeffs) -> Result<f64> {
    if coeffs.num_sites() != state.num_qubits() {
        return Err(Error::InvalidArgument(format!(
            "{} coefficient sites for a {}-qubit state",
            coeffs.num_sites(),
            state.num_qubits()
        )));
    }
    let mut acc = vec![ZERO; state.dim()];
    for site in 1..=state.num_qubits() {
        for axis in PauliAxis::ALL {
            let c = coeffs.coeff(site, axis);
            if c == ZERO {
                continue;
            }
            let mut phi = state.clone();
            phi.apply_pauli(site, axis)?;
            let mean = state.inner(&phi);
            for ((out, p), s) in acc.iter_mut().zip(phi.amplitudes()).zip(state.amplitudes()) {
                *out += c * (p - mean * s);
            }
        }
    }
    Ok(norm_sqr(&acc))
}

/// Largest register size accepted by the brute-force search.
pub const BRUTE_FORCE_MAX_QUBITS: usize = 12;

#[derive(Clone, Debug)]
pub struct BruteForceConfig {
    /// Total number of starts (eigenvector and greedy starts included).
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Restrict to real coefficients, i.e. Hermitian local operators.
    pub hermitian_only: bool,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        Self { restarts: 32, iterations: 500, seed: 0, hermitian_only: false }
    }
}

#[derive(Clone, Debug)]
pub struct BruteForceResult {
    pub best: f64,
    pub best_coeffs: AdditiveOperatorCoeffs,
    /// Value reached from the renormalized top eigenvector.
    pub from_eigvec: f64,
    /// Value reached from the site-by-site greedy construction.
    pub from_greedy: Option<f64>,
    pub starts: usize,
}

/// Maximizes `⟨ΔA† ΔA⟩` over per-site normalized coefficient tables by
/// projected gradient ascent on the fluctuation vectors `Δσ_α(l)|ψ⟩`.
///
/// The Gram matrix of those vectors is formed by applying each Pauli to the
/// state; it does not go through [`compute_vcm`].
#[derive(Clone, Debug)]
pub struct FluctuationSearch {
    num_sites: usize,
    gram: CMatrix,
}

impl FluctuationSearch {
    pub fn new(state: &PureState, hermitian_only: bool) -> Result<Self> {
        let l = state.num_qubits();
        if l > BRUTE_FORCE_MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "brute-force search supports at most {BRUTE_FORCE_MAX_QUBITS} qubits, got {l}"
            )));
        }
        let vectors: Vec<Vec<Complex64>> = (1..=l)
            .flat_map(|site| PauliAxis::ALL.map(|a| (site, a)))
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&(site, axis)| {
                let mut phi = state.clone();
                phi.apply_pauli(site, axis).expect("site in range");
                let mean = state.inner(&phi);
                phi.amplitudes().iter().zip(state.amplitudes()).map(|(p, s)| p - mean * s).collect()
            })
            .collect();
        let dim = 3 * l;
        let mut gram = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let mut v: Complex64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a.conj() * b).sum();
                if hermitian_only {
                    v = Complex64::new(v.re, 0.0);
                }
                gram.set(i, j, v);
                gram.set(j, i, v.conj());
            }
        }
        Ok(Self { num_sites: l, gram })
    }

    pub fn objective(&self, c: &[Complex64]) -> f64 {
        self.gram.quadratic_form(c)
    }

    /// Ascends from `start`, projecting each site onto the unit ball.
    pub fn ascend<R: Rng>(&self, start: &[Complex64], iterations: usize, rng: &mut R, real: bool) -> (f64, Vec<Complex64>) {
        let mut c = start.to_vec();
        project(&mut c);
        let mut f = self.objective(&c);
        let mut eta = 4.0;
        let mut stalled = 0;
        for _ in 0..iterations {
            let mut grad = self.gram.mul_vec(&c);
            if norm_sqr(&grad) < 1e-24 {
                // stationary point with no gradient: kick it
                for x in c.iter_mut() {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
                    *x += Complex64::new(re, im) * 0.1;
                }
                project(&mut c);
                f = self.objective(&c);
                grad = self.gram.mul_vec(&c);
            }
            let mut cand: Vec<Complex64> = c.iter().zip(&grad).map(|(x, g)| x + g * eta).collect();
            project(&mut cand);
            let fc = self.objective(&cand);
            if fc > f {
                let gain = fc - f;
                c = cand;
                f = fc;
                if gain <= 1e-13 * f.max(1.0) {
                    stalled += 1;
                    if stalled >= 3 {
                        break;
                    }
                } else {
                    stalled = 0;
                }
            } else {
                eta *= 0.5;
                if eta < 1e-6 {
                    break;
                }
            }
        }
        (f, c)
    }

    /// Builds a table site by site: each new site takes the top eigenvector
    /// of its own block, with the phase chosen so the cross term with the
    /// sites already placed is non-negative. Each site adds at least its
    /// block's top eigenvalue, which is at least one.
    pub fn greedy_start(&self, real: bool) -> Vec<Complex64> {
        let mut c = vec![ZERO; 3 * self.num_sites];
        for site in 0..self.num_sites {
            let block = CMatrix::from_fn(3, |i, j| self.gram.get(3 * site + i, 3 * site + j));
            let mut u = hermitian_eigen(&block).vectors[0].clone();
            if real {
                // real symmetric block: eigenvector is real up to a global phase
                fix_phase(&mut u);
                u.iter_mut().for_each(|x| *x = Complex64::new(x.re, 0.0));
            }
            let mut cross = ZERO;
            for i in 0..3 * site {
                for (k, uk) in u.iter().enumerate() {
                    cross += c[i].conj() * self.gram.get(i, 3 * site + k) * uk;
                }
            }
            let phase = if cross.norm() > 0.0 {
                if real {
                    Complex64::new(cross.re.signum(), 0.0)
                } else {
                    cross.conj() / cross.norm()
                }
            } else {
                Complex64::new(1.0, 0.0)
            };
            for k in 0..3 {
                c[3 * site + k] = u[k] * phase;
            }
        }
        c
    }

    /// Multi-start maximization. `eigvec_start` is the per-site renormalized
    /// top eigenvector of the matching VCM.
    pub fn maximize(&self, eigvec_start: &[Complex64], config: &BruteForceConfig) -> Result<BruteForceResult> {
        if config.restarts == 0 {
            return Err(Error::InvalidArgument("brute-force budget must be at least 1".into()));
        }
        let real = config.hermitian_only;
        let dim = 3 * self.num_sites;
        let mut starts: Vec<Vec<Complex64>> = vec![if real {
            eigvec_start.iter().map(|x| Complex64::new(x.re, 0.0)).collect()
        } else {
            eigvec_start.to_vec()
        }];
        if config.restarts >= 2 {
            starts.push(self.greedy_start(real));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        while starts.len() < config.restarts {
            let v: Vec<Complex64> = (0..dim)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
                    Complex64::new(re, im)
                })
                .collect();
            let mut v = v;
            for site in v.chunks_mut(3) {
                let n = norm_sqr(site).sqrt();
                if n > 0.0 {
                    site.iter_mut().for_each(|x| *x /= n);
                }
            }
            starts.push(v);
        }
        let results: Vec<(f64, Vec<Complex64>)> = starts
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(i as u64 + 1)));
                self.ascend(s, config.iterations, &mut rng, real)
            })
            .collect();
        let best_idx = results
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
            .map(|(i, _)| i)
            .expect("at least one start");
        let (best, coeffs) = results[best_idx].clone();
        Ok(BruteForceResult {
            best,
            best_coeffs: AdditiveOperatorCoeffs::from_flat(&coeffs, Normalization::PerSite)?,
            from_eigvec: results[0].0,
            from_greedy: results.get(1).map(|r| r.0),
            starts: results.len(),
        })
    }
}

fn project(c: &mut [Complex64]) {
    for site in c.chunks_mut(3) {
        let n = norm_sqr(site);
        if n > 1.0 {
            let s = 1.0 / n.sqrt();
            site.iter_mut().for_each(|x| *x *= s);
        }
    }
}

/// Best per-site-normalized fluctuation found, seeded with the renormalized
/// top VCM eigenvector. At most 12 qubits.
pub fn brute_force_max_fluctuation(state: &PureState, config: &BruteForceConfig) -> Result<BruteForceResult> {
    let search = FluctuationSearch::new(state, config.hermitian_only)?;
    let vcm = compute_vcm(state)?;
    let start = max_fluctuating_operator(&vcm).per_site_renormalized().flat();
    search.maximize(&start, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn product_state_emax_is_two() {
        let s = PureState::basis_state(5, 0b10110).unwrap();
        let v = compute_vcm(&s).unwrap();
        assert!((v.e_max() - 2.0).abs() < 1e-9);
        assert!((v.trace() - 10.0).abs() < 1e-12);
        assert!(v.is_degenerate());
        v.check_structure(1e-9).unwrap();
    }

    #[test]
    fn ghz_emax_and_operator() {
        for l in 3..=10 {
            let v = compute_vcm(&catalog::ghz(l).unwrap()).unwrap();
            assert!((v.e_max() - l as f64).abs() < 1e-9, "L={l}");
        }
        let v = compute_vcm(&catalog::ghz(6).unwrap()).unwrap();
        let top = max_fluctuating_operator(&v);
        for site in 1..=6 {
            assert!((top.coeff(site, PauliAxis::Z).norm_sqr() - 1.0).abs() < 1e-9);
            assert!(top.coeff(site, PauliAxis::X).norm() < 1e-9);
        }
        assert!((top.coeff(1, PauliAxis::Z) - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        assert!((c_factor(&top) - 1.0).abs() < 1e-9);
        assert!((v.quadratic_form(&top) - 36.0).abs() < 1e-8);
    }

    #[test]
    fn w_state_emax_is_order_one() {
        let v = compute_vcm(&catalog::w_state(8).unwrap()).unwrap();
        assert!(v.e_max() <= 4.0, "{}", v.e_max());
        v.check_structure(1e-9).unwrap();
    }

    #[test]
    fn entries_match_operator_route() {
        let s = catalog::domain_wall(5).unwrap();
        let v = compute_vcm(&s).unwrap();
        for l in 1..=5 {
            for a in PauliAxis::ALL {
                for lp in 1..=5 {
                    for b in PauliAxis::ALL {
                        let direct = s.pauli_pair_expectation(l, a, lp, b).unwrap()
                            - s.pauli_expectation(l, a).unwrap() * s.pauli_expectation(lp, b).unwrap();
                        assert!((v.entry(l, a, lp, b) - direct).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn fluctuation_examples() {
        let z8 = AdditiveOperatorCoeffs::uniform_axis(8, PauliAxis::Z).unwrap();
        let f = fluctuation_of(&catalog::ghz(8).unwrap(), &z8).unwrap();
        assert!((f - 64.0).abs() < 1e-9);

        let z10 = AdditiveOperatorCoeffs::uniform_axis(10, PauliAxis::Z).unwrap();
        let f = fluctuation_of(&catalog::domain_wall(10).unwrap(), &z10).unwrap();
        assert!((f - 80.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn fluctuation_of_top_eigvec_is_emax_times_l() {
        for s in [catalog::w_state(6).unwrap(), catalog::domain_wall(7).unwrap()] {
            let v = compute_vcm(&s).unwrap();
            let top = max_fluctuating_operator(&v);
            let f = fluctuation_of(&s, &top).unwrap();
            let want = v.e_max() * s.num_qubits() as f64;
            assert!((f - want).abs() <= 1e-8 * want.max(1.0));
        }
    }

    #[test]
    fn c_factor_extremes() {
        let mut coeffs = vec![[ZERO; 3]; 5];
        coeffs[2][0] = Complex64::new(5f64.sqrt(), 0.0);
        let c = AdditiveOperatorCoeffs::new(coeffs, Normalization::SumL).unwrap();
        assert!((c_factor(&c) - 5.0).abs() < 1e-12);
        let r = c.per_site_renormalized();
        assert!((r.site_weight(3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalization_is_checked() {
        let coeffs = vec![[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), ZERO]];
        assert!(AdditiveOperatorCoeffs::new(coeffs.clone(), Normalization::PerSite).is_err());
        assert!(AdditiveOperatorCoeffs::new(coeffs, Normalization::SumL).is_err());
        assert!(AdditiveOperatorCoeffs::from_flat(&[ZERO; 4], Normalization::PerSite).is_err());
    }

    #[test]
    fn unit_local_operators() {
        // weights 1/4 and 1/16 on alternate sites
        let signs: Vec<f64> = (1..=6).map(|l| if l % 2 == 0 { 0.5 } else { 0.25 }).collect();
        let c = AdditiveOperatorCoeffs::signed_axis(&signs, PauliAxis::X).unwrap();
        let rebuilt = c.to_unit_local_operators();
        assert!((rebuilt.scale - 2.0).abs() < 1e-12);
        for l in 1..=6 {
            assert!((rebuilt.site_norm_sqr(l) - 1.0).abs() < 1e-12);
        }
        assert_eq!(rebuilt.coeffs.identity_offsets()[1], 0.0);
        assert!((rebuilt.coeffs.identity_offsets()[0] - 0.75f64.sqrt()).abs() < 1e-12);

        let s = catalog::ghz(6).unwrap();
        let f0 = fluctuation_of(&s, &c).unwrap();
        let f1 = fluctuation_of(&s, &rebuilt.coeffs).unwrap();
        assert!((f1 - 4.0 * f0).abs() < 1e-9);
    }

    #[test]
    fn brute_force_examples() {
        let cfg = BruteForceConfig { restarts: 8, ..Default::default() };
        let r = brute_force_max_fluctuation(&catalog::ghz(6).unwrap(), &cfg).unwrap();
        assert!((r.best - 36.0).abs() < 1e-6, "{}", r.best);

        let s = crate::random::product_state(6, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let r = brute_force_max_fluctuation(&s, &cfg).unwrap();
        assert!((r.best - 12.0).abs() < 1e-6, "{}", r.best);

        let zero = PureState::basis_state(6, 0).unwrap();
        let search = FluctuationSearch::new(&zero, false).unwrap();
        let start = AdditiveOperatorCoeffs::uniform_axis(6, PauliAxis::Z).unwrap().flat();
        assert_eq!(search.objective(&start), 0.0);
        let (f, _) = search.ascend(&start, 500, &mut ChaCha8Rng::seed_from_u64(1), false);
        assert!((f - 12.0).abs() < 1e-6, "{f}");

        let bad = BruteForceConfig { restarts: 0, ..Default::default() };
        assert!(brute_force_max_fluctuation(&zero, &bad).is_err());
        assert!(FluctuationSearch::new(&PureState::basis_state(13, 0).unwrap(), false).is_err());
    }

    #[test]
    fn greedy_start_reaches_l() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for l in 3..=6 {
            let s = crate::random::haar_state(l, &mut rng).unwrap();
            for real in [false, true] {
                let search = FluctuationSearch::new(&s, real).unwrap();
                let g = search.greedy_start(real);
                assert!(search.objective(&g) >= l as f64 - 1e-9);
            }
        }
    }
}
