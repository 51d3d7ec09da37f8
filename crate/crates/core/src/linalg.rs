//! Small dense Hermitian helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues below this are treated as zero (rank decisions, entropy clipping).
pub const EIGEN_FLOOR: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending, eigenvectors as columns.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `-Σ λ log₂ λ` over a spectrum; non-positive entries contribute nothing.
pub fn entropy_bits(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = eigh(m);
    let diag = CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&l| c(f(l), 0.0)),
    ));
    &vectors * diag * vectors.adjoint()
}

pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    hermitian_map(m, |l| l.max(0.0).sqrt())
}

/// Projector onto eigenvectors whose eigenvalue exceeds `floor`.
pub fn support_projector(m: &CMatrix, floor: f64) -> CMatrix {
    hermitian_map(m, |l| if l > floor { 1.0 } else { 0.0 })
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |r, col| {
        a[(r / br, col / bc)] * b[(r % br, col % bc)]
    })
}

/// Trace over the second factor of a `d1 ⊗ d2` operator.
pub fn partial_trace_second(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d1, d1, |i, j| {
        (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()
    })
}

/// Trace over the first factor of a `d1 ⊗ d2` operator.
pub fn partial_trace_first(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d2, d2, |i, j| {
        (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum()
    })
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Inverse square root of a positive-definite Hermitian matrix.
pub fn inv_sqrt(m: &CMatrix) -> Option<CMatrix> {
    let (values, _) = eigh(m);
    if values.first().is_none_or(|&l| l <= 1e-14) {
        return None;
    }
    Some(hermitian_map(m, |l| 1.0 / l.sqrt()))
}
