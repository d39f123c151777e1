//! Small dense helpers for 2×2 and 4×4 complex matrices.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn pauli_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn pauli_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn pauli_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

/// Pauli matrices indexed x, y, z.
pub fn paulis() -> [Mat2; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// `exp(-i δ σ_x) = cos δ I - i sin δ σ_x`.
pub fn x_rotation(delta: f64) -> Mat2 {
    let c = C64::new(delta.cos(), 0.0);
    let s = C64::new(0.0, -delta.sin());
    Mat2::new(c, s, s, c)
}

/// `exp(-i δ₁ σ_x) ⊗ exp(-i δ₂ σ_x)`, qubit 1 being the most significant bit.
pub fn local_x_rotations(delta1: f64, delta2: f64) -> Mat4 {
    kron(&x_rotation(delta1), &x_rotation(delta2))
}

/// Eigenvalues of a Hermitian 4×4 matrix, sorted ascending.
pub fn hermitian_eigenvalues(m: &Mat4) -> [f64; 4] {
    let eig = m.symmetric_eigen();
    let mut out = [0.0; 4];
    for (o, v) in out.iter_mut().zip(eig.eigenvalues.iter()) {
        *o = *v;
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// `(m + m†) / 2`.
pub fn hermitize(m: &Mat4) -> Mat4 {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
