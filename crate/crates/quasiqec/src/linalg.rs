//! Dense complex-matrix helpers shared by every module.
//!
//! The only decompositions used anywhere in the crate are the Hermitian
//! eigendecomposition and the SVD, both taken from `nalgebra` on
//! `DMatrix<Complex64>`. Matrices serialize to JSON as
//! `{rows, cols, re, im}` with row-major flattening.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Complex number from real and imaginary parts.
#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Real number as a complex scalar.
#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

/// Largest absolute entry (max-norm).
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

pub fn is_unitary(m: &CMat, tol: f64) -> bool {
    m.is_square() && max_abs(&(m.adjoint() * m - identity(m.nrows()))) <= tol
}

/// Hermitian idempotent within `tol`.
pub fn is_projector(m: &CMat, tol: f64) -> bool {
    is_hermitian(m, tol) && max_abs(&(m * m - m)) <= tol
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns.
pub fn herm_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    assert!(m.is_square(), "herm_eigen: non-square matrix");
    let se = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let vals: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut vecs = zeros(n, n);
    for (j, &k) in order.iter().enumerate() {
        vecs.set_column(j, &se.eigenvectors.column(k));
    }
    (vals, vecs)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMat) -> f64 {
    let (vals, _) = herm_eigen(m);
    vals.iter().map(|x| x.abs()).sum()
}

/// Trace distance (1/2)‖A − B‖₁ for Hermitian A, B.
pub fn trace_distance(a: &CMat, b: &CMat) -> f64 {
    0.5 * trace_norm_hermitian(&(a - b))
}

/// PSD square root via the Hermitian eigendecomposition.
/// Slightly negative eigenvalues (numerical noise) are clipped to zero.
pub fn sqrtm_psd(m: &CMat) -> CMat {
    let (vals, vecs) = herm_eigen(m);
    let d = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&x| cr(x.max(0.0).sqrt())),
    ));
    &vecs * d * vecs.adjoint()
}

/// Inverse square root of a Hermitian positive-definite matrix.
pub fn inv_sqrtm_pd(m: &CMat) -> CMat {
    let (vals, vecs) = herm_eigen(m);
    assert!(
        vals.iter().all(|&x| x > 0.0),
        "inv_sqrtm_pd: matrix is not positive definite"
    );
    let d = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&x| cr(1.0 / x.sqrt())),
    ));
    &vecs * d * vecs.adjoint()
}

/// Uhlmann fidelity F(A,B) = ‖√A √B‖₁² of PSD matrices.
///
/// Eigenvalues of √A·B·√A below 1e−13 of the largest one are treated as
/// exact zeros; the square root would otherwise amplify O(ε) eigensolver
/// noise on rank-deficient inputs to O(√ε).
pub fn fidelity(a: &CMat, b: &CMat) -> f64 {
    let sa = sqrtm_psd(a);
    let m = &sa * b * &sa;
    let (vals, _) = herm_eigen(&m);
    let cut = 1e-13 * vals[0].max(0.0);
    let s: f64 = vals
        .iter()
        .filter(|&&x| x > cut)
        .map(|&x| x.sqrt())
        .sum();
    s * s
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Partial trace over the second (right) tensor factor of a
/// `(da·db) × (da·db)` matrix with row-major factor ordering.
pub fn partial_trace_right(m: &CMat, da: usize, db: usize) -> CMat {
    assert_eq!(m.nrows(), da * db);
    CMat::from_fn(da, da, |i, j| {
        (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
    })
}

/// Partial trace over the first (left) tensor factor.
pub fn partial_trace_left(m: &CMat, da: usize, db: usize) -> CMat {
    assert_eq!(m.nrows(), da * db);
    CMat::from_fn(db, db, |i, j| {
        (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()
    })
}

/// Matrix exponential of a Hermitian `h` times `i·s`: exp(i·s·h).
pub fn exp_i_hermitian(h: &CMat, s: f64) -> CMat {
    let (vals, vecs) = herm_eigen(h);
    let d = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&x| (I * cr(s * x)).exp()),
    ));
    &vecs * d * vecs.adjoint()
}

/// Row-major JSON form of a complex matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&CMat> for MatrixJson {
    fn from(m: &CMat) -> Self {
        let (rows, cols) = (m.nrows(), m.ncols());
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        MatrixJson { rows, cols, re, im }
    }
}

impl From<&MatrixJson> for CMat {
    fn from(j: &MatrixJson) -> Self {
        CMat::from_fn(j.rows, j.cols, |i, k| {
            c(j.re[i * j.cols + k], j.im[i * j.cols + k])
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dense(rows: usize, cols: usize, entries: &[(f64, f64)]) -> CMat {
        CMat::from_fn(rows, cols, |i, j| {
            let (re, im) = entries[i * cols + j];
            c(re, im)
        })
    }

    #[test]
    fn herm_eigen_reconstructs() {
        let m = dense(2, 2, &[(2.0, 0.0), (0.0, 1.0), (0.0, -1.0), (3.0, 0.0)]);
        let (vals, vecs) = herm_eigen(&m);
        let d = CMat::from_diagonal(&CVec::from_iterator(2, vals.iter().map(|&x| cr(x))));
        let rec = &vecs * d * vecs.adjoint();
        assert!(max_abs(&(rec - &m)) < 1e-12);
        assert!(vals[0] >= vals[1]);
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states_is_one() {
        let p0 = dense(2, 2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let p1 = dense(2, 2, &[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        assert_abs_diff_eq!(trace_distance(&p0, &p1), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fidelity(&p0, &p1), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fidelity(&p0, &p0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_traces_complement() {
        let a = dense(2, 2, &[(1.0, 0.0), (0.2, 0.1), (0.2, -0.1), (0.5, 0.0)]);
        let b = dense(2, 2, &[(0.7, 0.0), (0.0, 0.3), (0.0, -0.3), (0.9, 0.0)]);
        let k = kron(&a, &b);
        let tr_b = partial_trace_right(&k, 2, 2);
        let tr_a = partial_trace_left(&k, 2, 2);
        assert!(max_abs(&(tr_b - &a * trace(&b))) < 1e-13);
        assert!(max_abs(&(tr_a - &b * trace(&a))) < 1e-13);
    }

    #[test]
    fn json_roundtrip() {
        let m = dense(2, 3, &[(1.0, 2.0); 6]);
        let j = MatrixJson::from(&m);
        let back = CMat::from(&j);
        assert!(max_abs(&(back - m)) == 0.0);
    }
}
