//! State containers for the two-qubit ⊗ rotator system.
//!
//! A [`CompositeState`] stores `4N` amplitudes with the rotator index varying
//! fastest: amplitude `(ab, n)` lives at `ab * N + (n + N/2)`, where `ab` is
//! the two-qubit label `0b00..=0b11` (qubit 1 on the high bit) and
//! `n ∈ {-N/2, …, N/2-1}` is the signed momentum level. Tracing out the
//! rotator is then a reduction over contiguous rows.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermitize, Mat4, C64, ZERO};

pub const NORM_TOLERANCE: f64 = 1e-10;
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

/// Which rotator basis the amplitudes of a [`CompositeState`] are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Momentum,
    Angle,
}

/// Two-qubit pure state in the computational basis `|00⟩, |01⟩, |10⟩, |11⟩`.
pub type QubitPairVector = [C64; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    amplitudes: Vec<C64>,
    n_levels: usize,
    representation: Representation,
}

impl CompositeState {
    /// Wraps raw amplitudes, checking the length and the unit norm.
    pub fn from_amplitudes(
        amplitudes: Vec<C64>,
        n_levels: usize,
        representation: Representation,
    ) -> Result<Self> {
        check_levels(n_levels)?;
        if amplitudes.len() != 4 * n_levels {
            return Err(Error::DimensionMismatch {
                expected: 4 * n_levels,
                got: amplitudes.len(),
            });
        }
        let state = Self {
            amplitudes,
            n_levels,
            representation,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidDimension(format!(
                "composite state has squared norm {norm}, expected 1"
            )));
        }
        Ok(state)
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub(crate) fn set_representation(&mut self, repr: Representation) {
        self.representation = repr;
    }

    /// Amplitude of qubit label `ab` and rotator index `index` (0-based storage
    /// index; momentum level `index - N/2` in momentum representation).
    pub fn amplitude(&self, ab: usize, index: usize) -> C64 {
        self.amplitudes[ab * self.n_levels + index]
    }

    /// The row of rotator amplitudes attached to qubit label `ab`.
    pub fn row(&self, ab: usize) -> &[C64] {
        &self.amplitudes[ab * self.n_levels..(ab + 1) * self.n_levels]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

pub(crate) fn check_levels(n_levels: usize) -> Result<()> {
    if n_levels < 2 || !n_levels.is_power_of_two() {
        return Err(Error::InvalidDimension(format!(
            "number of rotator levels must be a power of two >= 2, got {n_levels}"
        )));
    }
    Ok(())
}

/// Reduced two-qubit density matrix in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitDensity(Mat4);

impl TwoQubitDensity {
    /// Validates Hermiticity, unit trace and positivity up to round-off.
    pub fn new(matrix: Mat4) -> Result<Self> {
        let herm_dev = matrix
            .iter()
            .zip(matrix.adjoint().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if herm_dev > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (max deviation {herm_dev:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        let rho = Self(hermitize(&matrix));
        let min_eig = rho.eigenvalues()[0];
        if min_eig < -POSITIVITY_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(rho)
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_matrix_unchecked(matrix: Mat4) -> Self {
        Self(matrix)
    }

    pub fn pure(psi: &QubitPairVector) -> Self {
        let v = nalgebra::Vector4::from_column_slice(psi);
        Self(v * v.adjoint())
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat4::identity() * C64::new(0.25, 0.0))
    }

    /// The Bell-diagonal dephased state with `1/2` on the `|00⟩,|11⟩`
    /// populations and `D/2` on their coherences.
    pub fn dephased_bell(coherence: f64) -> Self {
        let mut m = Mat4::zeros();
        m[(0, 0)] = C64::new(0.5, 0.0);
        m[(3, 3)] = C64::new(0.5, 0.0);
        m[(0, 3)] = C64::new(0.5 * coherence, 0.0);
        m[(3, 0)] = C64::new(0.5 * coherence, 0.0);
        Self(m)
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat4 {
        self.0
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.0)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `2|ρ_{00,11}|`, the Bell coherence.
    pub fn bell_coherence(&self) -> f64 {
        2.0 * self.0[(0, 3)].norm()
    }

    /// `U ρ U†`.
    pub fn conjugated(&self, u: &Mat4) -> Self {
        Self(u * self.0 * u.adjoint())
    }
}

/// Run parameters of the two-qubit ⊗ kicked rotator model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Classical chaos parameter `K = kT`.
    pub chaos: f64,
    /// Number of rotator levels `N`; `ħ_eff = T = 2π/N`.
    pub n_levels: usize,
    /// Qubit–rotator coupling `ε`.
    pub epsilon: f64,
    /// Per-kick rotation angle of qubit 1, `δ₁ = ω₁T`.
    pub delta1: f64,
    /// Per-kick rotation angle of qubit 2, `δ₂ = ω₂T`.
    pub delta2: f64,
    pub seed: u64,
}

impl ModelParams {
    pub fn new(chaos: f64, n_levels: usize) -> Result<Self> {
        check_levels(n_levels)?;
        if !(chaos >= 0.0) || !chaos.is_finite() {
            return Err(Error::InvalidParameter {
                name: "K",
                reason: format!("must be finite and non-negative, got {chaos}"),
            });
        }
        Ok(Self {
            chaos,
            n_levels,
            epsilon: 0.0,
            delta1: 0.0,
            delta2: 0.0,
            seed: 0,
        })
    }

    pub fn with_coupling(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_rotations(mut self, delta1: f64, delta2: f64) -> Self {
        self.delta1 = delta1;
        self.delta2 = delta2;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Kick period `T = 2π/N`, which doubles as `ħ_eff`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.n_levels as f64
    }

    pub fn hbar_eff(&self) -> f64 {
        self.period()
    }

    /// Quantum kick strength `k = K/T = K N / 2π`.
    pub fn kick_strength(&self) -> f64 {
        self.chaos * self.n_levels as f64 / (2.0 * PI)
    }
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn bell_phi_plus() -> QubitPairVector {
    let a = C64::new(FRAC_1_SQRT_2, 0.0);
    [a, ZERO, ZERO, a]
}

/// Random normalized rotator state `Σ c_n |n⟩` in the momentum basis.
///
/// Entries are independent standard complex Gaussians, normalized; the
/// sequence is fully determined by `seed`.
pub fn random_env_state(n_levels: usize, seed: u64) -> Result<Vec<C64>> {
    if n_levels < 2 {
        return Err(Error::InvalidDimension(format!(
            "rotator needs at least 2 levels, got {n_levels}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c: Vec<C64> = (0..n_levels)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        })
        .collect();
    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    c.iter_mut().for_each(|z| *z /= norm);
    Ok(c)
}

/// Momentum eigenstate `|n⟩` with signed level `n ∈ [-N/2, N/2)`.
pub fn momentum_eigenstate(n_levels: usize, level: i64) -> Result<Vec<C64>> {
    check_levels(n_levels)?;
    let half = (n_levels / 2) as i64;
    if level < -half || level >= half {
        return Err(Error::InvalidParameter {
            name: "level",
            reason: format!("{level} outside [-{half}, {half})"),
        });
    }
    let mut v = vec![ZERO; n_levels];
    v[(level + half) as usize] = C64::new(1.0, 0.0);
    Ok(v)
}

/// Product state `|qubits⟩ ⊗ |env⟩` in the momentum representation.
pub fn tensor_initial(qubits: &[C64], env: &[C64]) -> Result<CompositeState> {
    if qubits.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: qubits.len(),
        });
    }
    let n = env.len();
    check_levels(n)?;
    let mut amplitudes = Vec::with_capacity(4 * n);
    for q in qubits {
        amplitudes.extend(env.iter().map(|e| q * e));
    }
    CompositeState::from_amplitudes(amplitudes, n, Representation::Momentum)
}

/// Traces out the rotator: `ρ_{ab,cd} = Σ_n ψ_{ab,n} ψ*_{cd,n}`.
///
/// The trace runs over whatever basis the rotator rows are in, so the result
/// does not depend on the representation flag.
pub fn partial_trace_env(state: &CompositeState) -> TwoQubitDensity {
    let mut m = Mat4::zeros();
    for ab in 0..4 {
        let row_ab = state.row(ab);
        for cd in ab..4 {
            let row_cd = state.row(cd);
            let s: C64 = row_ab
                .iter()
                .zip(row_cd)
                .map(|(x, y)| x * y.conj())
                .sum();
            m[(ab, cd)] = s;
            m[(cd, ab)] = s.conj();
        }
        m[(ab, ab)].im = 0.0;
    }
    TwoQubitDensity::from_matrix_unchecked(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn random_composite(n: usize, seed: u64) -> CompositeState {
        let raw = random_env_state(4 * n, seed).unwrap();
        CompositeState::from_amplitudes(raw, n, Representation::Momentum).unwrap()
    }

    #[test]
    fn bell_amplitudes() {
        let b = bell_phi_plus();
        assert!((b[0].re - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(b[1], ZERO);
        assert_eq!(b[2], ZERO);
        assert_eq!(b[0], b[3]);
    }

    #[test]
    fn env_state_is_deterministic_and_normalized() {
        let a = random_env_state(8, 42).unwrap();
        let b = random_env_state(8, 42).unwrap();
        assert_eq!(a, b);
        let c = random_env_state(8, 43).unwrap();
        assert_ne!(a, c);
        for seed in 0..20 {
            let v = random_env_state(64, seed).unwrap();
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn env_state_rejects_tiny_dimension() {
        assert!(matches!(
            random_env_state(1, 0),
            Err(Error::InvalidDimension(_))
        ));
    }

    #[test]
    fn env_momentum_distribution_is_uniform_on_average() {
        // Mean of |c_n|² over 100 seeds vs 1/N, within 5 standard errors per level.
        let n = 1 << 10;
        let seeds = 100;
        let mut sum = vec![0.0; n];
        let mut sum_sq = vec![0.0; n];
        for seed in 0..seeds {
            let v = random_env_state(n, 1000 + seed).unwrap();
            for (i, z) in v.iter().enumerate() {
                let p = z.norm_sqr();
                sum[i] += p;
                sum_sq[i] += p * p;
            }
        }
        let expected = 1.0 / n as f64;
        for i in 0..n {
            let mean = sum[i] / seeds as f64;
            let var = (sum_sq[i] / seeds as f64 - mean * mean).max(0.0);
            let se = (var / (seeds as f64 - 1.0)).sqrt();
            assert!(
                (mean - expected).abs() <= 5.0 * se,
                "level {i}: mean {mean} vs {expected} (se {se})"
            );
        }
    }

    #[test]
    fn tensor_with_momentum_eigenstate() {
        let env = momentum_eigenstate(8, 0).unwrap();
        let s = tensor_initial(&bell_phi_plus(), &env).unwrap();
        let a = 1.0 / 2f64.sqrt();
        for ab in 0..4 {
            for i in 0..8 {
                let expected = if (ab == 0 || ab == 3) && i == 4 { a } else { 0.0 };
                assert!((s.amplitude(ab, i).re - expected).abs() < 1e-15);
                assert_eq!(s.amplitude(ab, i).im, 0.0);
            }
        }
        let rho = partial_trace_env(&s);
        let bell = TwoQubitDensity::pure(&bell_phi_plus());
        assert!(max_abs_diff(rho.matrix(), bell.matrix()) < 1e-15);
    }

    #[test]
    fn tensor_rejects_bad_dimensions() {
        let env = random_env_state(8, 1).unwrap();
        assert!(matches!(
            tensor_initial(&[ZERO; 3], &env),
            Err(Error::DimensionMismatch { .. })
        ));
        let env6 = random_env_state(6, 1).unwrap();
        assert!(tensor_initial(&bell_phi_plus(), &env6).is_err());
    }

    #[test]
    fn bell_times_env_traces_to_bell_projector() {
        let bell = TwoQubitDensity::pure(&bell_phi_plus());
        for seed in 0..5 {
            let env = random_env_state(32, seed).unwrap();
            let s = tensor_initial(&bell_phi_plus(), &env).unwrap();
            let rho = partial_trace_env(&s);
            assert!(max_abs_diff(rho.matrix(), bell.matrix()) < 1e-14);
        }
    }

    #[test]
    fn partial_trace_matches_dense_outer_product() {
        let n = 8;
        let s = random_composite(n, 7);
        let psi = s.amplitudes();
        let dim = 4 * n;
        // full 32×32 projector, then sum the rotator diagonal blocks
        let full: Vec<C64> = (0..dim * dim)
            .map(|k| psi[k / dim] * psi[k % dim].conj())
            .collect();
        let mut oracle = Mat4::zeros();
        for ab in 0..4 {
            for cd in 0..4 {
                for i in 0..n {
                    oracle[(ab, cd)] += full[(ab * n + i) * dim + cd * n + i];
                }
            }
        }
        let rho = partial_trace_env(&s);
        assert!(max_abs_diff(rho.matrix(), &oracle) < 1e-12);
    }

    #[test]
    fn partial_trace_ignores_rotator_unitaries() {
        let n = 16;
        let s = random_composite(n, 3);
        let phases = random_env_state(n, 99).unwrap();
        let mut amps = s.amplitudes().to_vec();
        for ab in 0..4 {
            for i in 0..n {
                let phase = C64::from_polar(1.0, phases[i].arg());
                amps[ab * n + i] *= phase;
            }
        }
        let rotated = CompositeState::from_amplitudes(amps, n, Representation::Momentum).unwrap();
        let a = partial_trace_env(&s);
        let b = partial_trace_env(&rotated);
        assert!(max_abs_diff(a.matrix(), b.matrix()) <= 1e-12);
    }

    #[test]
    fn partial_trace_is_valid_density() {
        for seed in 0..10 {
            let rho = partial_trace_env(&random_composite(16, seed));
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
            TwoQubitDensity::new(*rho.matrix()).unwrap();
        }
    }

    #[test]
    fn composite_state_invariants() {
        assert!(CompositeState::from_amplitudes(vec![ZERO; 24], 6, Representation::Momentum).is_err());
        assert!(CompositeState::from_amplitudes(vec![ZERO; 32], 8, Representation::Momentum).is_err());
        assert!(matches!(
            CompositeState::from_amplitudes(vec![ZERO; 31], 8, Representation::Momentum),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn density_validation() {
        assert!(TwoQubitDensity::new(Mat4::identity()).is_err());
        let mut m = *TwoQubitDensity::maximally_mixed().matrix();
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(TwoQubitDensity::new(m).is_err());
        let mut neg = Mat4::zeros();
        neg[(0, 0)] = C64::new(1.5, 0.0);
        neg[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(TwoQubitDensity::new(neg).is_err());
        TwoQubitDensity::new(*TwoQubitDensity::dephased_bell(0.3).matrix()).unwrap();
    }

    #[test]
    fn semiclassical_scaling() {
        let p = ModelParams::new(2.0 * PI, 4).unwrap();
        assert!((p.period() - PI / 2.0).abs() < 1e-15);
        assert!((p.kick_strength() - 4.0).abs() < 1e-12);
        let half = ModelParams::new(1.0, 512).unwrap();
        let full = ModelParams::new(1.0, 1024).unwrap();
        assert!((half.hbar_eff() - 2.0 * full.hbar_eff()).abs() < 1e-15);
    }
}
