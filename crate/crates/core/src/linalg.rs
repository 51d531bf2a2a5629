//! Small dense complex Hermitian matrices and a cyclic Jacobi eigensolver.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-major square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ZERO; n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `v† A v`, real part (imaginary part vanishes for Hermitian `A`).
    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        let av = self.mul_vec(v);
        v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
    }

    fn off_diagonal_norm_sqr(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j).norm_sqr();
                }
            }
        }
        s
    }

    fn frobenius_sqr(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<Complex64>>,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi diagonalization. The matrix is symmetrized as `(A + A†)/2`
/// before rotating.
pub fn hermitian_eigen(a: &CMatrix) -> HermitianEigen {
    let n = a.n;
    let mut m = CMatrix::from_fn(n, |i, j| (a.get(i, j) + a.get(j, i).conj()) * 0.5);
    let mut v = CMatrix::from_fn(n, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { ZERO });

    let scale = m.frobenius_sqr().max(f64::MIN_POSITIVE);
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && m.off_diagonal_norm_sqr() > 1e-30 * scale {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(j, j).re.total_cmp(&m.get(i, i).re));
    let values = order.iter().map(|&k| m.get(k, k).re).collect();
    let vectors = order.iter().map(|&k| (0..n).map(|i| v.get(i, k)).collect()).collect();
    HermitianEigen { values, vectors, sweeps }
}

/// One Jacobi rotation zeroing entry (p, q): a phase on column q makes the
/// pivot real, then a real plane rotation annihilates it.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m.get(p, q);
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = m.get(p, p).re;
    let aqq = m.get(q, q).re;
    if mag < 1e-300 || mag <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m.set(p, q, ZERO);
        m.set(q, p, ZERO);
        return;
    }
    let phase = apq / mag; // e^{iφ}
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J = D R with D = diag(.., 1 @p, e^{-iφ} @q, ..)
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let n = m.n;
    for k in 0..n {
        let (akp, akq) = (m.get(k, p), m.get(k, q));
        m.set(k, p, akp * jpp + akq * jqp);
        m.set(k, q, akp * jpq + akq * jqq);
    }
    for k in 0..n {
        let (apk, aqk) = (m.get(p, k), m.get(q, k));
        m.set(p, k, jpp.conj() * apk + jqp.conj() * aqk);
        m.set(q, k, jpq.conj() * apk + jqq.conj() * aqk);
    }
    m.set(p, q, ZERO);
    m.set(q, p, ZERO);
    m.set(p, p, Complex64::new(m.get(p, p).re, 0.0));
    m.set(q, q, Complex64::new(m.get(q, q).re, 0.0));

    for k in 0..n {
        let (vkp, vkq) = (v.get(k, p), v.get(k, q));
        v.set(k, p, vkp * jpp + vkq * jqp);
        v.set(k, q, vkp * jpq + vkq * jqq);
    }
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(a: &CMatrix, e: &HermitianEigen) -> f64 {
        let mut worst = 0.0f64;
        for (lam, vec) in e.values.iter().zip(&e.vectors) {
            let av = a.mul_vec(vec);
            for (x, y) in av.iter().zip(vec) {
                worst = worst.max((x - y * lam).norm());
            }
        }
        worst
    }

    #[test]
    fn product_state_block() {
        // single-qubit |0⟩ block: eigenvalues {2, 0, 0}
        let a = CMatrix::from_fn(3, |i, j| match (i, j) {
            (0, 0) | (1, 1) => c(1.0, 0.0),
            (0, 1) => c(0.0, 1.0),
            (1, 0) => c(0.0, -1.0),
            _ => ZERO,
        });
        let e = hermitian_eigen(&a);
        assert!((e.values[0] - 2.0).abs() < 1e-14);
        assert!(e.values[1].abs() < 1e-14 && e.values[2].abs() < 1e-14);
        assert!(residual(&a, &e) < 1e-13);
    }

    #[test]
    fn all_ones_matrix() {
        let a = CMatrix::from_fn(6, |_, _| c(1.0, 0.0));
        let e = hermitian_eigen(&a);
        assert!((e.values[0] - 6.0).abs() < 1e-12);
        for v in &e.vectors[0] {
            assert!((v.norm() - 6f64.sqrt().recip()).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_input_is_immediate() {
        let a = CMatrix::from_fn(4, |i, j| if i == j { c(i as f64, 0.0) } else { ZERO });
        let e = hermitian_eigen(&a);
        assert_eq!(e.sweeps, 0);
        assert_eq!(e.values, vec![3.0, 2.0, 1.0, 0.0]);
    }

    proptest! {
        #[test]
        fn matches_nalgebra_and_is_orthonormal(
            n in 1usize..12,
            seed in proptest::collection::vec(-1.0f64..1.0, 288),
        ) {
            let a = CMatrix::from_fn(n, |i, j| {
                let (lo, hi) = (i.min(j), i.max(j));
                let k = 2 * (lo * 12 + hi);
                let re = seed[k];
                let im = if i == j { 0.0 } else if i < j { seed[k + 1] } else { -seed[k + 1] };
                c(re, im)
            });
            let e = hermitian_eigen(&a);
            prop_assert!(residual(&a, &e) < 1e-11);
            for i in 0..n {
                for j in 0..n {
                    let d: Complex64 = e.vectors[i].iter().zip(&e.vectors[j]).map(|(x, y)| x.conj() * y).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((d - c(want, 0.0)).norm() < 1e-11);
                }
            }
            let na = DMatrix::from_fn(n, n, |i, j| a.get(i, j));
            let mut reference: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
            reference.sort_by(|x, y| y.total_cmp(x));
            for (x, y) in e.values.iter().zip(&reference) {
                prop_assert!((x - y).abs() < 1e-10 * (1.0 + y.abs()));
            }
        }
    }
}
