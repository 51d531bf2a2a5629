//! Dense pure-state register over `L` qubits.
//!
//! Basis index `x` encodes site `l` (1-based) as bit `L - l`, so site 1 is the
//! most significant bit and `|x⟩` prints as the binary string of `x`.

use std::fmt;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MIN_QUBITS: usize = 1;
pub const MAX_QUBITS: usize = 24;

/// Tolerance used when validating that an externally supplied state is normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    /// Position in `ALL` (0, 1, 2).
    pub fn index(self) -> usize {
        match self {
            PauliAxis::X => 0,
            PauliAxis::Y => 1,
            PauliAxis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            PauliAxis::X => "x",
            PauliAxis::Y => "y",
            PauliAxis::Z => "z",
        }
    }

    /// 2x2 matrix in the computational basis, `m[row][col]`.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let one = Complex64::new(1.0, 0.0);
        match self {
            PauliAxis::X => [[ZERO, one], [one, ZERO]],
            PauliAxis::Y => [[ZERO, -I], [I, ZERO]],
            PauliAxis::Z => [[one, ZERO], [ZERO, -one]],
        }
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_qubits(num_qubits: usize) -> Result<()> {
    if (MIN_QUBITS..=MAX_QUBITS).contains(&num_qubits) {
        Ok(())
    } else {
        Err(Error::QubitCount(num_qubits))
    }
}

impl PureState {
    /// Computational basis ket `|x⟩`.
    pub fn basis_state(num_qubits: usize, x: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let dim = 1usize << num_qubits;
        if x >= dim {
            return Err(Error::BasisIndex { index: x, num_qubits });
        }
        let mut amps = vec![ZERO; dim];
        amps[x] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Wraps an amplitude vector, rejecting wrong lengths and non-unit norms.
    pub fn from_amplitudes(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubits(num_qubits)?;
        if amps.len() != 1usize << num_qubits {
            return Err(Error::Length { len: amps.len(), num_qubits });
        }
        let state = Self { num_qubits, amps };
        let n = state.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(n));
        }
        Ok(state)
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn from_unnormalized(num_qubits: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        check_qubits(num_qubits)?;
        if amps.len() != 1usize << num_qubits {
            return Err(Error::Length { len: amps.len(), num_qubits });
        }
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        let s = 1.0 / n.sqrt();
        amps.iter_mut().for_each(|a| *a *= s);
        Ok(Self { num_qubits, amps })
    }

    /// Equal-weight superposition of the given basis kets.
    pub fn uniform_over(num_qubits: usize, indices: &[usize]) -> Result<Self> {
        check_qubits(num_qubits)?;
        let dim = 1usize << num_qubits;
        if indices.is_empty() {
            return Err(Error::InvalidArgument("empty support".into()));
        }
        let mut amps = vec![ZERO; dim];
        for &x in indices {
            if x >= dim {
                return Err(Error::BasisIndex { index: x, num_qubits });
            }
            if amps[x] != ZERO {
                return Err(Error::DuplicateSolution(x));
            }
            amps[x] = Complex64::new(1.0, 0.0);
        }
        Self::from_unnormalized(num_qubits, amps)
    }

    /// Tensor product of single-qubit states, site 1 first.
    pub fn product(sites: &[[Complex64; 2]]) -> Result<Self> {
        let num_qubits = sites.len();
        check_qubits(num_qubits)?;
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for q in sites {
            let n = (q[0].norm_sqr() + q[1].norm_sqr()).sqrt();
            if !(n > 0.0) {
                return Err(Error::NotNormalized(0.0));
            }
            let (a, b) = (q[0] / n, q[1] / n);
            amps = amps.iter().flat_map(|&c| [c * a, c * b]).collect();
        }
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, x: usize) -> Complex64 {
        self.amps[x]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability(&self, x: usize) -> f64 {
        self.amps[x].norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        debug_assert_eq!(self.num_qubits, other.num_qubits);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub(crate) fn site_mask(&self, site: usize) -> Result<usize> {
        if site == 0 || site > self.num_qubits {
            return Err(Error::Site { site, num_qubits: self.num_qubits });
        }
        Ok(1usize << (self.num_qubits - site))
    }

    /// Bit value of `site` in basis index `x`.
    pub fn site_bit(&self, x: usize, site: usize) -> Result<u8> {
        let m = self.site_mask(site)?;
        Ok(u8::from(x & m != 0))
    }

    /// Applies a 2x2 matrix `u[row][col]` to one site.
    pub fn apply_single_qubit(&mut self, site: usize, u: [[Complex64; 2]; 2]) -> Result<()> {
        let m = self.site_mask(site)?;
        for x0 in 0..self.amps.len() {
            if x0 & m != 0 {
                continue;
            }
            let x1 = x0 | m;
            let (a0, a1) = (self.amps[x0], self.amps[x1]);
            self.amps[x0] = u[0][0] * a0 + u[0][1] * a1;
            self.amps[x1] = u[1][0] * a0 + u[1][1] * a1;
        }
        Ok(())
    }

    pub fn apply_hadamard(&mut self, site: usize) -> Result<()> {
        let m = self.site_mask(site)?;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for x0 in 0..self.amps.len() {
            if x0 & m != 0 {
                continue;
            }
            let x1 = x0 | m;
            let (a0, a1) = (self.amps[x0], self.amps[x1]);
            self.amps[x0] = (a0 + a1) * h;
            self.amps[x1] = (a0 - a1) * h;
        }
        Ok(())
    }

    /// Hadamard on sites `1..=L` in order.
    pub fn hadamard_transform(&mut self) {
        for site in 1..=self.num_qubits {
            self.apply_hadamard(site).expect("site in range");
        }
    }

    pub fn apply_pauli(&mut self, site: usize, axis: PauliAxis) -> Result<()> {
        let m = self.site_mask(site)?;
        for x0 in 0..self.amps.len() {
            if x0 & m != 0 {
                continue;
            }
            let x1 = x0 | m;
            let (a0, a1) = (self.amps[x0], self.amps[x1]);
            match axis {
                PauliAxis::X => {
                    self.amps[x0] = a1;
                    self.amps[x1] = a0;
                }
                PauliAxis::Y => {
                    self.amps[x0] = -I * a1;
                    self.amps[x1] = I * a0;
                }
                PauliAxis::Z => self.amps[x1] = -a1,
            }
        }
        Ok(())
    }

    /// Negates the amplitude of every solution index.
    pub fn apply_oracle(&mut self, solutions: &[usize]) -> Result<()> {
        if solutions.is_empty() {
            return Err(Error::EmptySolutions);
        }
        if let Some(&x) = solutions.iter().find(|&&x| x >= self.amps.len()) {
            return Err(Error::BasisIndex { index: x, num_qubits: self.num_qubits });
        }
        for &x in solutions {
            self.amps[x] = -self.amps[x];
        }
        Ok(())
    }

    /// Conditional phase shift: `|0⟩ ↦ |0⟩`, `|x⟩ ↦ -|x⟩` for `x > 0`.
    pub fn apply_phase_shift(&mut self) {
        for a in self.amps.iter_mut().skip(1) {
            *a = -*a;
        }
    }

    /// Single-site reduced density matrix, `rho[i][j] = Σ_r ψ(r,i) ψ(r,j)*`.
    pub fn site_density(&self, site: usize) -> Result<[[Complex64; 2]; 2]> {
        let m = self.site_mask(site)?;
        let mut rho = [[ZERO; 2]; 2];
        for x0 in 0..self.amps.len() {
            if x0 & m != 0 {
                continue;
            }
            let a = [self.amps[x0], self.amps[x0 | m]];
            for i in 0..2 {
                for j in 0..2 {
                    rho[i][j] += a[i] * a[j].conj();
                }
            }
        }
        Ok(rho)
    }

    /// Two-site reduced density matrix for `site_a != site_b`, local index
    /// `2 * bit(site_a) + bit(site_b)`.
    pub fn pair_density(&self, site_a: usize, site_b: usize) -> Result<[[Complex64; 4]; 4]> {
        let ma = self.site_mask(site_a)?;
        let mb = self.site_mask(site_b)?;
        if ma == mb {
            return Err(Error::InvalidArgument(format!("pair density needs distinct sites, got {site_a} twice")));
        }
        let (lo, hi) = if ma < mb { (ma, mb) } else { (mb, ma) };
        let (plo, phi) = (lo.trailing_zeros(), hi.trailing_zeros());
        let mut rho = [[ZERO; 4]; 4];
        for r in 0..(self.amps.len() >> 2) {
            // insert zero bits at the two site positions
            let x = insert_zero(insert_zero(r, plo), phi);
            let a = [self.amps[x], self.amps[x | mb], self.amps[x | ma], self.amps[x | ma | mb]];
            for i in 0..4 {
                rho[i][i].re += a[i].norm_sqr();
                for j in i + 1..4 {
                    rho[i][j] += a[i] * a[j].conj();
                }
            }
        }
        for i in 0..4 {
            for j in 0..i {
                rho[i][j] = rho[j][i].conj();
            }
        }
        Ok(rho)
    }

    /// `⟨ψ|σ_α(l)|ψ⟩`.
    pub fn pauli_expectation(&self, site: usize, axis: PauliAxis) -> Result<f64> {
        let rho = self.site_density(site)?;
        let p = axis.matrix();
        let mut acc = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                acc += rho[i][j] * p[j][i];
            }
        }
        Ok(acc.re)
    }

    /// `⟨ψ|σ_α(l) σ_α'(l')|ψ⟩`, evaluated by applying both operators to a copy
    /// of the state. Same-site products follow the exact Pauli algebra.
    pub fn pauli_pair_expectation(
        &self,
        site: usize,
        axis: PauliAxis,
        site2: usize,
        axis2: PauliAxis,
    ) -> Result<Complex64> {
        self.site_mask(site)?;
        let mut phi = self.clone();
        phi.apply_pauli(site2, axis2)?;
        phi.apply_pauli(site, axis)?;
        Ok(self.inner(&phi))
    }

    /// Writes the plain-text amplitude dump: `L=<n>` then `index re im` per line.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "L={}", self.num_qubits)?;
        for (x, a) in self.amps.iter().enumerate() {
            writeln!(w, "{x} {:?} {:?}", a.re, a.im)?;
        }
        Ok(())
    }

    /// Parses the amplitude dump written by [`PureState::write_text`].
    /// Indices may appear in any order; missing indices are zero.
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(s) if s.trim().is_empty() => None,
            other => Some((i + 1, other)),
        });
        let (n0, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty file".into() })?;
        let header = header?;
        let num_qubits: usize = header
            .trim()
            .strip_prefix("L=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse { line: n0, msg: format!("expected `L=<n>`, got `{header}`") })?;
        check_qubits(num_qubits).map_err(|e| Error::Parse { line: n0, msg: e.to_string() })?;
        let dim = 1usize << num_qubits;
        let mut amps = vec![ZERO; dim];
        let mut seen = vec![false; dim];
        for (n, line) in lines {
            let line = line?;
            let parse_err = |msg: String| Error::Parse { line: n, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(parse_err(format!("expected `index re im`, got `{line}`")));
            }
            let x: usize = fields[0].parse().map_err(|_| parse_err(format!("bad index `{}`", fields[0])))?;
            let re: f64 = fields[1].parse().map_err(|_| parse_err(format!("bad real part `{}`", fields[1])))?;
            let im: f64 = fields[2].parse().map_err(|_| parse_err(format!("bad imaginary part `{}`", fields[2])))?;
            if x >= dim {
                return Err(parse_err(format!("index {x} out of range for L={num_qubits}")));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(parse_err(format!("index {x} listed twice")));
            }
            amps[x] = Complex64::new(re, im);
        }
        Self::from_amplitudes(num_qubits, amps)
    }
}

/// Inserts a zero bit at position `pos` of `r`.
#[inline]
fn insert_zero(r: usize, pos: u32) -> usize {
    let low = r & ((1usize << pos) - 1);
    ((r >> pos) << (pos + 1)) | low
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ghz(l: usize) -> PureState {
        PureState::uniform_over(l, &[0, (1 << l) - 1]).unwrap()
    }

    #[test]
    fn basis_state_examples() {
        let s = PureState::basis_state(3, 0).unwrap();
        assert_eq!(s.amplitude(0), Complex64::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| *a == ZERO));

        let s = PureState::basis_state(2, 3).unwrap();
        assert_eq!(s.probability(3), 1.0);

        // 19 = 00010011
        let s = PureState::basis_state(8, 19).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        let bits = [0, 0, 0, 1, 0, 0, 1, 1];
        for (l, b) in (1..=8).zip(bits) {
            let z = s.pauli_expectation(l, PauliAxis::Z).unwrap();
            assert_eq!(z, if b == 1 { -1.0 } else { 1.0 }, "site {l}");
        }
        assert!(matches!(PureState::basis_state(3, 8), Err(Error::BasisIndex { .. })));
    }

    #[test]
    fn hadamard_examples() {
        let mut s = PureState::basis_state(1, 0).unwrap();
        s.apply_hadamard(1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0).re - h).abs() < 1e-15 && (s.amplitude(1).re - h).abs() < 1e-15);

        let mut s = PureState::basis_state(3, 0).unwrap();
        s.hadamard_transform();
        for a in s.amplitudes() {
            assert!((a.re - 8f64.sqrt().recip()).abs() < 1e-15 && a.im == 0.0);
        }
        assert!(matches!(s.apply_hadamard(4), Err(Error::Site { .. })));
        assert!(matches!(s.apply_hadamard(0), Err(Error::Site { .. })));
    }

    #[test]
    fn hadamard_transform_inverts_itself() {
        let mut s = PureState::basis_state(8, 0).unwrap();
        s.hadamard_transform();
        s.hadamard_transform();
        assert!((s.probability(0) - 1.0).abs() < 1e-12);

        let g = ghz(5);
        let mut t = g.clone();
        t.hadamard_transform();
        t.hadamard_transform();
        assert!(t.fidelity(&g) > 1.0 - 1e-11);
    }

    #[test]
    fn oracle_and_phase_shift() {
        let mut s = PureState::basis_state(8, 19).unwrap();
        s.apply_oracle(&[19]).unwrap();
        assert_eq!(s.amplitude(19), Complex64::new(-1.0, 0.0));

        let mut s = PureState::basis_state(8, 20).unwrap();
        s.apply_oracle(&[19]).unwrap();
        assert_eq!(s.amplitude(20), Complex64::new(1.0, 0.0));

        assert!(matches!(s.apply_oracle(&[]), Err(Error::EmptySolutions)));
        assert!(matches!(s.apply_oracle(&[256]), Err(Error::BasisIndex { .. })));

        let mut s = PureState::basis_state(3, 0).unwrap();
        s.apply_phase_shift();
        assert_eq!(s.amplitude(0), Complex64::new(1.0, 0.0));
        let mut s = PureState::basis_state(3, 5).unwrap();
        s.apply_phase_shift();
        assert_eq!(s.amplitude(5), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn expectation_examples() {
        let mut plus = PureState::basis_state(4, 0).unwrap();
        plus.hadamard_transform();
        let zero = PureState::basis_state(4, 0).unwrap();
        for l in 1..=4 {
            assert!((plus.pauli_expectation(l, PauliAxis::X).unwrap() - 1.0).abs() < 1e-14);
            assert!((zero.pauli_expectation(l, PauliAxis::Z).unwrap() - 1.0).abs() < 1e-14);
            assert!(zero.pauli_expectation(l, PauliAxis::X).unwrap().abs() < 1e-14);
            assert!(ghz(4).pauli_expectation(l, PauliAxis::Z).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn pair_expectation_examples() {
        let s = ghz(4);
        for a in PauliAxis::ALL {
            let v = s.pauli_pair_expectation(2, a, 2, a).unwrap();
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
        let zz = s.pauli_pair_expectation(1, PauliAxis::Z, 2, PauliAxis::Z).unwrap();
        assert!((zz - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let xx = s.pauli_pair_expectation(1, PauliAxis::X, 2, PauliAxis::X).unwrap();
        assert!(xx.norm() < 1e-14);

        let zero = PureState::basis_state(3, 0).unwrap();
        let xy = zero.pauli_pair_expectation(2, PauliAxis::X, 2, PauliAxis::Y).unwrap();
        assert!((xy - I).norm() < 1e-14);
    }

    #[test]
    fn pair_density_matches_operator_route() {
        let amps: Vec<Complex64> = (0..32)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let s = PureState::from_unnormalized(5, amps).unwrap();
        for (l1, l2) in [(1, 2), (2, 5), (4, 1), (3, 4)] {
            let rho = s.pair_density(l1, l2).unwrap();
            for a in PauliAxis::ALL {
                for b in PauliAxis::ALL {
                    let (pa, pb) = (a.matrix(), b.matrix());
                    let mut acc = ZERO;
                    for i in 0..4 {
                        for j in 0..4 {
                            acc += rho[i][j] * pa[j >> 1][i >> 1] * pb[j & 1][i & 1];
                        }
                    }
                    let direct = s.pauli_pair_expectation(l1, a, l2, b).unwrap();
                    assert!((acc - direct).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn text_round_trip_and_errors() {
        let s = ghz(3);
        let mut buf = Vec::new();
        s.write_text(&mut buf).unwrap();
        let back = PureState::read_text(buf.as_slice()).unwrap();
        assert_eq!(back, s);

        let err = PureState::read_text("L=2\n0 1 0\n1 x 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = PureState::read_text("N=2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = PureState::read_text("L=2\n0 1 0\n0 1 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = PureState::read_text("L=2\n0 0.5 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::NotNormalized(_)));
    }
}
