//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// `|v⟩⟨v|`
pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.dotc(b)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn largest_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)
        .last()
        .copied()
        .unwrap_or(f64::NEG_INFINITY)
}

/// Schatten 1-norm of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|e| e.abs()).sum()
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.trace()
}

/// Largest entrywise deviation of `m` from `m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// `m^{⊗ power}`; `power = 0` yields the 1×1 identity.
pub fn tensor_power(m: &CMatrix, power: u32) -> CMatrix {
    let mut acc = identity(1);
    for _ in 0..power {
        acc = acc.kronecker(m);
    }
    acc
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
