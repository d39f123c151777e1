//! Concurrence, entanglement of formation and von Neumann entropy of
//! two-qubit density matrices. Logarithms are base 2 throughout.

use nalgebra::Matrix4;

use crate::error::{Error, Result};
use crate::linalg::{kron, pauli_y, Mat4, C64};
use crate::state::TwoQubitDensity;

/// Eigenvalues below this are reported as a positivity error; anything between
/// it and zero is round-off and clamped.
pub const HARD_NEGATIVE_THRESHOLD: f64 = -1e-8;
/// Eigenvalues of unit-trace matrices are only resolved to about this level;
/// smaller ones are zeroed before `√ρ` amplifies them to ~1e-7.
const EIGEN_RESOLUTION: f64 = 1e-14;

fn clamp_eigenvalue(value: f64, context: &'static str) -> Result<f64> {
    if value < HARD_NEGATIVE_THRESHOLD {
        return Err(Error::NumericalPositivity { context, value });
    }
    Ok(value.max(0.0))
}

fn resolve(value: f64) -> f64 {
    if value < EIGEN_RESOLUTION {
        0.0
    } else {
        value
    }
}

/// `(σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y)`, conjugation taken in the computational basis.
pub fn spin_flip(rho: &TwoQubitDensity) -> Mat4 {
    let yy = kron(&pauli_y(), &pauli_y());
    yy * rho.matrix().map(|z| z.conj()) * yy
}

/// Wootters concurrence `max(λ₁ - λ₂ - λ₃ - λ₄, 0)`.
///
/// The `λᵢ` are square roots of the spectrum of `ρρ̃`. Since
/// `√ρ ρ̃ √ρ = B B†` with `B = √ρ (σ_y⊗σ_y) √ρ*`, they are the singular values
/// of `B`, which an SVD resolves to absolute round-off. Taking square roots of
/// eigenvalues instead turns 1e-16 noise into 1e-8 errors in `C`.
pub fn concurrence(rho: &TwoQubitDensity) -> Result<f64> {
    let eig = rho.matrix().symmetric_eigen();
    let mut sqrt_diag = Matrix4::<C64>::zeros();
    for i in 0..4 {
        let v = resolve(clamp_eigenvalue(eig.eigenvalues[i], "density matrix")?);
        sqrt_diag[(i, i)] = C64::new(v.sqrt(), 0.0);
    }
    let vecs = &eig.eigenvectors;
    let sqrt_rho = vecs * sqrt_diag * vecs.adjoint();
    let yy = kron(&pauli_y(), &pauli_y());
    let b = sqrt_rho * yy * sqrt_rho.map(|z| z.conj());
    let mut lambdas: [f64; 4] = b.singular_values().into();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Binary entropy with `0 log 0 = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// `h((1 + √(1 - C²))/2)`.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt()))
}

pub fn entanglement_of_formation(rho: &TwoQubitDensity) -> Result<f64> {
    concurrence(rho).map(eof_from_concurrence)
}

/// `-Tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &TwoQubitDensity) -> Result<f64> {
    let s = rho.eigenvalues().iter().try_fold(0.0, |acc, &v| {
        let p = clamp_eigenvalue(v, "density matrix")?;
        Ok::<_, Error>(if p > 0.0 { acc - p * p.log2() } else { acc })
    })?;
    // a pure state's top eigenvalue can round to 1 + 1e-16
    Ok(s.max(0.0))
}
