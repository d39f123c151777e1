//! Markovian random phase-kick channel.
//!
//! Each kick rotates both qubits about `z` through the same random angle:
//! `R(θ) = diag(e^{-iε s cos θ})` with `s = (+2, 0, 0, -2)`, θ uniform. After
//! the local `σ_x` rotations, averaging over θ multiplies each coherence
//! `(ab, cd)` by `J₀(ε |s_ab - s_cd|)`.

use std::f64::consts::LN_2;

use crate::bessel::bessel_j;
use crate::entanglement::{binary_entropy, eof_from_concurrence};
use crate::error::Result;
use crate::floquet::{TimeSeriesRecord, SIGMA_Z_SUM};
use crate::linalg::{kron, local_x_rotations, paulis, Mat2, Mat4, C64};
use crate::state::TwoQubitDensity;

/// The 4×4 diagonal unitary `R(θ)` for coupling `ε`.
pub fn rotation_r(theta: f64, epsilon: f64) -> Mat4 {
    let c = theta.cos();
    Mat4::from_diagonal(&nalgebra::Vector4::from_fn(|ab, _| {
        C64::from_polar(1.0, -epsilon * SIGMA_Z_SUM[ab] * c)
    }))
}

/// θ-averaged coherence multipliers `J₀(ε |s_ab - s_cd|)`.
pub fn dephasing_factors(epsilon: f64) -> [[f64; 4]; 4] {
    let j0_2 = bessel_j(0, 2.0 * epsilon);
    let j0_4 = bessel_j(0, 4.0 * epsilon);
    let mut f = [[1.0; 4]; 4];
    for (a, row) in f.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = match (SIGMA_Z_SUM[a] - SIGMA_Z_SUM[b]).abs() as u32 {
                0 => 1.0,
                2 => j0_2,
                _ => j0_4,
            };
        }
    }
    f
}

/// One kick of the phase-kick channel with precomputed factors.
#[derive(Debug, Clone, Copy)]
pub struct PhaseKickChannel {
    pub epsilon: f64,
    pub delta1: f64,
    pub delta2: f64,
    rotation: Mat4,
    factors: [[f64; 4]; 4],
}

impl PhaseKickChannel {
    pub fn new(epsilon: f64, delta1: f64, delta2: f64) -> Self {
        Self {
            epsilon,
            delta1,
            delta2,
            rotation: local_x_rotations(delta1, delta2),
            factors: dephasing_factors(epsilon),
        }
    }

    pub fn apply(&self, rho: &TwoQubitDensity) -> TwoQubitDensity {
        let mut m = self.rotation * rho.matrix() * self.rotation.adjoint();
        for a in 0..4 {
            for b in 0..4 {
                m[(a, b)] *= self.factors[a][b];
            }
        }
        TwoQubitDensity::from_matrix_unchecked(m)
    }

    /// Iterates the channel, measuring at `t = 0` and every `measure_every`
    /// kicks up to `t_max`.
    pub fn evolve_record(
        &self,
        initial: &TwoQubitDensity,
        t_max: usize,
        measure_every: usize,
    ) -> Result<Vec<TimeSeriesRecord>> {
        let every = measure_every.max(1);
        let mut rho = *initial;
        let mut out = vec![TimeSeriesRecord::measure(0, &rho)?];
        for t in 1..=t_max {
            rho = self.apply(&rho);
            if t % every == 0 {
                out.push(TimeSeriesRecord::measure(t, &rho)?);
            }
        }
        Ok(out)
    }
}

/// Exact θ-average of `R(θ) U ρ U† R(θ)†` with `U` the local `σ_x` rotations.
pub fn apply_channel_exact(
    rho: &TwoQubitDensity,
    epsilon: f64,
    delta1: f64,
    delta2: f64,
) -> TwoQubitDensity {
    PhaseKickChannel::new(epsilon, delta1, delta2).apply(rho)
}

/// Two-qubit Bloch expansion
/// `ρ = I/4 + Σ αᵢ σᵢ⊗I + Σ βⱼ I⊗σⱼ + Σ γᵢⱼ σᵢ⊗σⱼ`, indices x, y, z.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochCoordinates {
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    pub gamma: [[f64; 3]; 3],
}

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

impl BlochCoordinates {
    /// `αᵢ = Tr(ρ σᵢ⊗I)/4`, and likewise for β and γ.
    pub fn from_density(rho: &TwoQubitDensity) -> Self {
        let s = paulis();
        let id = Mat2::identity();
        let coeff = |op: Mat4| (rho.matrix() * op).trace().re / 4.0;
        let mut b = Self::default();
        for i in 0..3 {
            b.alpha[i] = coeff(kron(&s[i], &id));
            b.beta[i] = coeff(kron(&id, &s[i]));
            for j in 0..3 {
                b.gamma[i][j] = coeff(kron(&s[i], &s[j]));
            }
        }
        b
    }

    pub fn to_density(&self) -> TwoQubitDensity {
        let s = paulis();
        let id = Mat2::identity();
        let r = |x: f64| C64::new(x, 0.0);
        let mut m = Mat4::identity() * r(0.25);
        for i in 0..3 {
            m += kron(&s[i], &id) * r(self.alpha[i]);
            m += kron(&id, &s[i]) * r(self.beta[i]);
            for j in 0..3 {
                m += kron(&s[i], &s[j]) * r(self.gamma[i][j]);
            }
        }
        TwoQubitDensity::from_matrix_unchecked(m)
    }

    /// Coordinates of `|φ⁺⟩⟨φ⁺|`: `γ_xx = γ_zz = -γ_yy = 1/4`.
    pub fn bell() -> Self {
        let mut b = Self::default();
        b.gamma[X][X] = 0.25;
        b.gamma[Y][Y] = -0.25;
        b.gamma[Z][Z] = 0.25;
        b
    }

    pub fn to_vector(&self) -> [f64; 15] {
        let mut v = [0.0; 15];
        v[..3].copy_from_slice(&self.alpha);
        v[3..6].copy_from_slice(&self.beta);
        for i in 0..3 {
            v[6 + 3 * i..9 + 3 * i].copy_from_slice(&self.gamma[i]);
        }
        v
    }

    pub fn from_vector(v: &[f64; 15]) -> Self {
        let mut b = Self::default();
        b.alpha.copy_from_slice(&v[..3]);
        b.beta.copy_from_slice(&v[3..6]);
        for i in 0..3 {
            b.gamma[i].copy_from_slice(&v[6 + 3 * i..9 + 3 * i]);
        }
        b
    }
}

/// One kick of the phase-kick channel in the Bloch representation, to second
/// order in ε and first order in δ₁, δ₂.
pub fn bloch_step(b: &BlochCoordinates, epsilon: f64, delta1: f64, delta2: f64) -> BlochCoordinates {
    let e2 = epsilon * epsilon;
    let (d1, d2) = (2.0 * delta1, 2.0 * delta2);
    let [ax, ay, az] = b.alpha;
    let [bx, by, bz] = b.beta;
    let g = &b.gamma;
    let mut n = BlochCoordinates::default();

    n.alpha = [ax * (1.0 - e2), ay * (1.0 - e2) - d1 * az, az + d1 * ay];
    n.beta = [bx * (1.0 - e2), by * (1.0 - e2) - d2 * bz, bz + d2 * by];

    // single-flip components (xz, zx, yz, zy) decay like α_x: J₀(2ε) ≈ 1 - ε²
    n.gamma[X][X] = g[X][X] * (1.0 - 2.0 * e2) + 2.0 * e2 * g[Y][Y];
    n.gamma[Y][Y] = g[Y][Y] * (1.0 - 2.0 * e2) + 2.0 * e2 * g[X][X] - d1 * g[Z][Y] - d2 * g[Y][Z];
    n.gamma[Z][Z] = g[Z][Z] + d1 * g[Y][Z] + d2 * g[Z][Y];
    n.gamma[X][Y] = g[X][Y] * (1.0 - 2.0 * e2) - 2.0 * e2 * g[Y][X] - d2 * g[X][Z];
    n.gamma[Y][X] = g[Y][X] * (1.0 - 2.0 * e2) - 2.0 * e2 * g[X][Y] - d1 * g[Z][X];
    n.gamma[X][Z] = g[X][Z] * (1.0 - e2) + d2 * g[X][Y];
    n.gamma[Z][X] = g[Z][X] * (1.0 - e2) + d1 * g[Y][X];
    n.gamma[Y][Z] = g[Y][Z] * (1.0 - e2) - d1 * g[Z][Z] + d2 * g[Y][Y];
    n.gamma[Z][Y] = g[Z][Y] * (1.0 - e2) + d1 * g[Y][Y] - d2 * g[Z][Z];
    n
}

/// The γ components that stay populated when starting from `|φ⁺⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellFamily {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub yz: f64,
    pub zy: f64,
}

impl BellFamily {
    pub fn bell() -> Self {
        Self {
            xx: 0.25,
            yy: -0.25,
            zz: 0.25,
            yz: 0.0,
            zy: 0.0,
        }
    }

    pub fn to_bloch(&self) -> BlochCoordinates {
        let mut b = BlochCoordinates::default();
        b.gamma[X][X] = self.xx;
        b.gamma[Y][Y] = self.yy;
        b.gamma[Z][Z] = self.zz;
        b.gamma[Y][Z] = self.yz;
        b.gamma[Z][Y] = self.zy;
        b
    }

    pub fn from_bloch(b: &BlochCoordinates) -> Self {
        Self {
            xx: b.gamma[X][X],
            yy: b.gamma[Y][Y],
            zz: b.gamma[Z][Z],
            yz: b.gamma[Y][Z],
            zy: b.gamma[Z][Y],
        }
    }
}

/// [`bloch_step`] restricted to the Bell-invariant family.
pub fn bell_reduced_step(g: &BellFamily, epsilon: f64, delta1: f64, delta2: f64) -> BellFamily {
    let e2 = epsilon * epsilon;
    let (d1, d2) = (2.0 * delta1, 2.0 * delta2);
    BellFamily {
        xx: g.xx * (1.0 - 2.0 * e2) + 2.0 * e2 * g.yy,
        yy: g.yy * (1.0 - 2.0 * e2) + 2.0 * e2 * g.xx - d1 * g.zy - d2 * g.yz,
        zz: g.zz + d1 * g.yz + d2 * g.zy,
        yz: g.yz * (1.0 - e2) - d1 * g.zz + d2 * g.yy,
        zy: g.zy * (1.0 - e2) + d1 * g.yy - d2 * g.zz,
    }
}

/// Closed-form short-time estimates for a Bell input with `δᵢ ≪ ε ≪ 1`,
/// valid while `ε²t ≪ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticEstimates {
    /// `max(0, 1 - 4ε²t/ln 2)`.
    pub e12: f64,
    /// `1 - 4ε²t/ln 2` without clamping.
    pub e12_raw: f64,
    /// `(2ε²t/ln 2)(1 - ln(2ε²t))`, zero at `t = 0`.
    pub s12: f64,
    /// `D_t = 1 - 4ε²t`.
    pub coherence: f64,
}

pub fn analytic_estimates(epsilon: f64, t: f64) -> AnalyticEstimates {
    let x = epsilon * epsilon * t;
    let e12_raw = 1.0 - 4.0 * x / LN_2;
    let s12 = if x > 0.0 {
        2.0 * x / LN_2 * (1.0 - (2.0 * x).ln())
    } else {
        0.0
    };
    AnalyticEstimates {
        e12: e12_raw.max(0.0),
        e12_raw,
        s12,
        coherence: 1.0 - 4.0 * x,
    }
}

/// `E₁₂` and `S₁₂` of the dephased Bell state with coherence `D`.
pub fn dephased_bell_measures(coherence: f64) -> (f64, f64) {
    let d = coherence.abs().min(1.0);
    (eof_from_concurrence(d), binary_entropy(0.5 * (1.0 + d)))
}
