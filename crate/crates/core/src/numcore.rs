//! Dense complex linear algebra at the sizes this crate works with (a few
//! dozen rows at most): Hermitian eigendecomposition by cyclic Jacobi
//! rotations, PSD square roots, singular values and numerical rank.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Relative tolerance of the Hermiticity pre-check in [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-8;
/// Eigenvalues above `-PSD_CLAMP` are treated as round-off and clamped to zero.
pub const PSD_CLAMP: f64 = 1e-10;
/// Default relative cut-off for [`numerical_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

const JACOBI_SWEEPS: usize = 100;
// Eigenvalues of magnitude below this fraction of max(1, |H|_F) are at the
// eigensolver's noise floor and are zeroed before taking square roots.
const EIGEN_FLOOR: f64 = 1e-12;

/// `<a|b>`, conjugate-linear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Returns `v / |v|`, or `None` for the zero vector.
pub fn normalized(v: &[C64]) -> Option<Vec<C64>> {
    let n = norm(v);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(v.iter().map(|z| z / n).collect())
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.len());
        Self::from_fn(rows, cols, |i, j| columns[j][i])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// `|u><v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: C64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// `self += s |u><u|`
    pub fn add_projector(&mut self, s: f64, u: &[C64]) {
        assert!(self.is_square() && self.rows == u.len());
        let n = self.rows;
        for (i, &ui) in u.iter().enumerate() {
            let ui = ui * s;
            for (j, uj) in u.iter().enumerate() {
                self.data[i * n + j] += ui * uj.conj();
            }
        }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|self - self†|_F`
    pub fn hermitian_residual(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `<u| self |v>`
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        inner(u, &self.mul_vec(v))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(ONE, rhs);
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(-ONE, rhs);
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigendecomposition `H = V diag(values) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `V f(diag) V†`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * fv[k] * v[(j, k)].conj()).sum())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| x)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEig> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch { expected: h.rows(), found: h.cols() });
    }
    let scale = h.frobenius_norm();
    if !scale.is_finite() {
        return Err(Error::InvalidInput("matrix entries must be finite".into()));
    }
    let residual = h.hermitian_residual();
    if residual > HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian { residual });
    }

    let n = h.rows();
    // Symmetrize so rotations act on an exactly Hermitian matrix.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (h[(i, j)] + h[(j, i)].conj()));
    let mut v = ComplexMatrix::identity(n);
    let target = 1e-15 * scale;

    let off_norm = |a: &ComplexMatrix| {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    };

    let mut converged = off_norm(&a) <= target;
    let mut sweep = 0;
    while !converged {
        if sweep == JACOBI_SWEEPS {
            return Err(Error::NoConvergence { what: "Jacobi eigensolver", iterations: sweep });
        }
        sweep += 1;
        for p in 0..n {
            for q in p + 1..n {
                let b = a[(p, q)];
                let babs = b.norm();
                if babs == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Phase e^{-i phi} on q makes the (p, q) entry real; a real
                // rotation then diagonalizes the 2x2 block.
                let phase = (b / babs).conj();
                let theta = 0.5 * (2.0 * babs).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                // Columns of the 2x2 unitary: (c, s e^{-i phi}), (-s, c e^{-i phi}).
                let u00 = C64::new(c, 0.0);
                let u10 = phase * s;
                let u01 = C64::new(-s, 0.0);
                let u11 = phase * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u00 + akq * u10;
                    a[(k, q)] = akp * u01 + akq * u11;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u00.conj() * apk + u10.conj() * aqk;
                    a[(q, k)] = u01.conj() * apk + u11.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u00 + vkq * u10;
                    v[(k, q)] = vkp * u01 + vkq * u11;
                }
            }
        }
        converged = off_norm(&a) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEig { values, vectors })
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(h)?.max())
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn psd_sqrt(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    psd_sqrt_with_clamp(h, PSD_CLAMP)
}

/// [`psd_sqrt`] with a caller-chosen clamp for slightly negative eigenvalues.
pub fn psd_sqrt_with_clamp(h: &ComplexMatrix, clamp: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    let min = eig.min();
    if min < -clamp {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let floor = EIGEN_FLOOR * h.frobenius_norm().max(1.0);
    Ok(eig.map_spectrum(|x| if x <= floor { 0.0 } else { x.sqrt() }))
}

/// Singular values in descending order (one-sided Jacobi on the columns).
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut cols = m.columns();
    let k = cols.len();
    // Columns this small are round-off; rotating them against each other never settles.
    let negligible = (f64::EPSILON * m.frobenius_norm()).powi(2);
    let mut sweep = 0;
    loop {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&cols[p], &cols[q]);
                let gabs = gamma.norm();
                if gabs == 0.0 || alpha.min(beta) <= negligible || gabs <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotate the phase of column q so <a_p|a_q> is real, then
                // apply the real rotation that orthogonalizes the pair.
                let phase = (gamma / gabs).conj();
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..cols[p].len() {
                    let ap = cols[p][i];
                    let aq = cols[q][i] * phase;
                    cols[p][i] = ap * c - aq * s;
                    cols[q][i] = ap * s + aq * c;
                }
            }
        }
        if !rotated {
            break;
        }
        sweep += 1;
        if sweep == JACOBI_SWEEPS {
            return Err(Error::NoConvergence { what: "one-sided Jacobi SVD", iterations: sweep });
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv.truncate(m.rows().min(m.cols()));
    Ok(sv)
}

/// Number of singular values above `rel_tol` times the largest one.
pub fn numerical_rank(m: &ComplexMatrix, rel_tol: f64) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let sv = match singular_values(m) {
        Ok(sv) => sv,
        // Fall back to the spectrum of M†M; slightly less sharp for tiny values.
        Err(_) => match hermitian_eig(&(&m.adjoint() * m)) {
            Ok(eig) => {
                let mut sv: Vec<f64> = eig.values.iter().rev().map(|x| x.max(0.0).sqrt()).collect();
                sv.truncate(m.rows().min(m.cols()));
                sv
            }
            Err(_) => return m.rows().min(m.cols()),
        },
    };
    let largest = sv.first().copied().unwrap_or(0.0);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * largest).count()
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm())).unwrap();
        let pv = a[(pivot, col)];
        if pv.norm() <= f64::EPSILON * scale || pv.norm() == 0.0 {
            return Err(Error::Singular);
        }
        if pivot != col {
            for k in 0..n {
                let t = a[(col, k)];
                a[(col, k)] = a[(pivot, k)];
                a[(pivot, k)] = t;
                let t = inv[(col, k)];
                inv[(col, k)] = inv[(pivot, k)];
                inv[(pivot, k)] = t;
            }
        }
        let pinv = ONE / a[(col, col)];
        for k in 0..n {
            a[(col, k)] *= pinv;
            inv[(col, k)] *= pinv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[(r, col)];
            if f == ZERO {
                continue;
            }
            for k in 0..n {
                let ack = a[(col, k)];
                let ick = inv[(col, k)];
                a[(r, k)] -= f * ack;
                inv[(r, k)] -= f * ick;
            }
        }
    }
    Ok(inv)
}

/// Lower-triangular Cholesky factor of a Hermitian positive definite matrix,
/// or `None` if a pivot is not strictly positive.
pub fn cholesky(h: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = h.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = h[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = h[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

pub fn is_positive_definite(h: &ComplexMatrix) -> bool {
    cholesky(h).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = hermitian_eig(&ComplexMatrix::identity(3)).unwrap();
        for v in eig.values {
            assert_close(v, 1.0, 1e-15);
        }
    }

    #[test]
    fn diagonal_eigenpairs_are_standard_basis() {
        let h = ComplexMatrix::diagonal(&[1.5, 0.2]);
        let eig = hermitian_eig(&h).unwrap();
        assert_close(eig.values[0], 0.2, 1e-15);
        assert_close(eig.values[1], 1.5, 1e-15);
        assert_close(eig.vectors[(1, 0)].norm(), 1.0, 1e-15);
        assert_close(eig.vectors[(0, 1)].norm(), 1.0, 1e-15);
    }

    #[test]
    fn two_by_two_closed_form() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 0.70711], &[0.70711, 1.0]]);
        let eig = hermitian_eig(&h).unwrap();
        assert_close(eig.values[0], 0.29289, 1e-12);
        assert_close(eig.values[1], 1.70711, 1e-12);
    }

    #[test]
    fn complex_off_diagonal() {
        // [[2, i],[-i, 2]] has eigenvalues 1 and 3.
        let mut h = ComplexMatrix::identity(2).scale_real(2.0);
        h[(0, 1)] = C64::new(0.0, 1.0);
        h[(1, 0)] = C64::new(0.0, -1.0);
        let eig = hermitian_eig(&h).unwrap();
        assert_close(eig.values[0], 1.0, 1e-14);
        assert_close(eig.values[1], 3.0, 1e-14);
        assert!((&eig.reconstruct() - &h).frobenius_norm() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(hermitian_eig(&h), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn psd_sqrt_examples() {
        let r = psd_sqrt(&ComplexMatrix::identity(2)).unwrap();
        assert!((&r - &ComplexMatrix::identity(2)).frobenius_norm() < 1e-14);

        let r = psd_sqrt(&ComplexMatrix::diagonal(&[4.0, 9.0])).unwrap();
        assert!((&r - &ComplexMatrix::diagonal(&[2.0, 3.0])).frobenius_norm() < 1e-14);

        let v = normalized(&[C64::new(1.0, 0.5), C64::new(-0.3, 0.2), C64::new(0.0, 1.0)]).unwrap();
        let p = ComplexMatrix::outer(&v, &v);
        let r = psd_sqrt(&p).unwrap();
        assert!((&r - &p).frobenius_norm() < 1e-12);
    }

    #[test]
    fn psd_sqrt_rejects_negative() {
        let h = ComplexMatrix::diagonal(&[1.0, -1e-6]);
        assert!(matches!(psd_sqrt(&h), Err(Error::NotPsd { .. })));
        // Round-off sized negatives are clamped.
        let h = ComplexMatrix::diagonal(&[1.0, -1e-12]);
        let r = psd_sqrt(&h).unwrap();
        assert_eq!(r[(1, 1)], ZERO);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&ComplexMatrix::identity(4), DEFAULT_RANK_TOL), 4);
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(3, 3), DEFAULT_RANK_TOL), 0);

        let m = ComplexMatrix::from_real_rows(&[&[1.0, 1.0, 0.3], &[2.0, 2.0, -1.0], &[0.5, 0.5, 4.0]]);
        assert_eq!(numerical_rank(&m, DEFAULT_RANK_TOL), 2);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random::unit_vector(&mut rng, 5);
        let b = random::unit_vector(&mut rng, 5);
        let c: Vec<C64> = a.iter().zip(&b).map(|(x, y)| (x + y) / std::f64::consts::SQRT_2).collect();
        let m = ComplexMatrix::from_columns(&[a, b, c]);
        assert_eq!(numerical_rank(&m, DEFAULT_RANK_TOL), 2);
    }

    #[test]
    fn inverse_and_cholesky() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random::unitary(&mut rng, 4);
        let inv = inverse(&u).unwrap();
        assert!((&inv - &u.adjoint()).frobenius_norm() < 1e-12);
        assert!(matches!(inverse(&ComplexMatrix::zeros(2, 2)), Err(Error::Singular)));

        let h = random::psd_matrix(&mut rng, 4);
        let h = &h + &ComplexMatrix::identity(4);
        let l = cholesky(&h).unwrap();
        assert!((&(&l * &l.adjoint()) - &h).frobenius_norm() < 1e-12);
        assert!(!is_positive_definite(&ComplexMatrix::diagonal(&[1.0, 0.0])));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn eig_reconstructs(seed in any::<u64>(), n in 1usize..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random::hermitian_matrix(&mut rng, n);
            let eig = hermitian_eig(&h).unwrap();
            let scale = h.frobenius_norm().max(1.0);
            prop_assert!((&eig.reconstruct() - &h).frobenius_norm() <= 1e-9 * scale);
            let v = &eig.vectors;
            prop_assert!((&(&v.adjoint() * v) - &ComplexMatrix::identity(n)).frobenius_norm() <= 1e-9);
            prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn rank_is_unitarily_invariant(seed in any::<u64>(), n in 2usize..=6, k in 1usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = k.min(n);
            // n x n matrix of rank k
            let cols: Vec<Vec<C64>> = (0..k).map(|_| random::unit_vector(&mut rng, n)).collect();
            let basis = ComplexMatrix::from_columns(&cols);
            let mix = random::gaussian_matrix(&mut rng, k, n);
            let m = &basis * &mix;
            let u = random::unitary(&mut rng, n);
            let w = random::unitary(&mut rng, n);
            let r = numerical_rank(&m, 1e-10);
            prop_assert_eq!(r, k);
            prop_assert_eq!(numerical_rank(&(&u * &m), 1e-10), r);
            prop_assert_eq!(numerical_rank(&(&(&u * &m) * &w), 1e-10), r);
        }
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for i in 0..1000 {
            let n = 1 + i % 8;
            let h = random::psd_matrix(&mut rng, n);
            let r = psd_sqrt(&h).unwrap();
            let scale = h.frobenius_norm().max(1.0);
            assert!((&(&r * &r) - &h).frobenius_norm() <= 1e-8 * scale);
            assert!(r.hermitian_residual() <= 1e-12 * scale);
        }
    }
}
