//! Phase kicks with two-step angle memory.
//!
//! Successive kick angles follow the chain
//! `p(θ̄|θ) = p_c δ(θ̄ - θ - shift_t) + p_nc/2π`, `p_c = √|J₂(K)|`, which
//! reproduces the lag-1 and lag-2 angular correlations of the standard map.
//! The shift is `-(π/2)(-1)^t` for `J₂ > 0` and `+π/2` for `J₂ < 0`, with `t`
//! the absolute index of the earlier kick (first kick is `t = 0`).

use std::f64::consts::{FRAC_PI_2, LN_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bessel::bessel_j;
use crate::chirikov::wrap_angle;
use crate::error::{Error, Result};
use crate::floquet::{TimeSeriesRecord, SIGMA_Z_SUM};
use crate::linalg::{hermitize, local_x_rotations, Mat4, C64};
use crate::state::{QubitPairVector, TwoQubitDensity};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatedPhaseDistribution {
    pub j2: f64,
    pub p_c: f64,
    pub p_nc: f64,
}

impl CorrelatedPhaseDistribution {
    pub fn new(j2: f64) -> Result<Self> {
        if !(j2.abs() <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "j2",
                reason: format!("|J2| must be at most 1, got {j2}"),
            });
        }
        let p_c = j2.abs().sqrt();
        Ok(Self {
            j2,
            p_c,
            p_nc: 1.0 - p_c,
        })
    }

    /// Distribution for the standard map at chaos parameter `K`.
    pub fn from_chaos(chaos: f64) -> Result<Self> {
        Self::new(bessel_j(2, chaos))
    }

    pub fn memoryless() -> Self {
        Self {
            j2: 0.0,
            p_c: 0.0,
            p_nc: 1.0,
        }
    }

    /// Angle increment of the correlated branch after kick `t`.
    pub fn shift(&self, t: usize) -> f64 {
        if self.j2 > 0.0 {
            if t % 2 == 0 {
                -FRAC_PI_2
            } else {
                FRAC_PI_2
            }
        } else {
            FRAC_PI_2
        }
    }

    /// Discretised transition probability between angles `2πi/m` and
    /// `2πj/m` after kick `t`; requires `m % 4 == 0` so the shift lands on
    /// the grid.
    pub fn grid_transition(&self, m: usize, t: usize, from: usize, to: usize) -> f64 {
        let target = (from as isize + grid_offset(self.shift(t), m)).rem_euclid(m as isize) as usize;
        let jump = if to == target { self.p_c } else { 0.0 };
        jump + self.p_nc / m as f64
    }
}

fn grid_offset(shift: f64, m: usize) -> isize {
    (shift / TAU * m as f64).round() as isize
}

/// Draws the angle of kick `t + 1` given the angle `theta` of kick `t`.
pub fn sample_next_angle<R: Rng + ?Sized>(
    theta: f64,
    t: usize,
    dist: &CorrelatedPhaseDistribution,
    rng: &mut R,
) -> f64 {
    let u: f64 = rng.random();
    if u < dist.p_c {
        wrap_angle(theta + dist.shift(t))
    } else {
        rng.random::<f64>() * TAU
    }
}

/// Exact average of `R(θ̄)R(θ) ρ R(θ)†R(θ̄)†` over the joint law of two
/// consecutive angles, `δ₁ = δ₂ = 0`.
///
/// Coherence `(a, b)` picks up `exp(-iεΔs(cos θ + cos θ̄))`. On the correlated
/// branch `cos θ + cos(θ ∓ π/2) = √2 cos(θ ∓ π/4)`, which averages to
/// `J₀(√2 εΔs)`; independent angles give `J₀(εΔs)²`.
pub fn two_kick_map_exact(rho: &TwoQubitDensity, epsilon: f64, j2: f64) -> Result<TwoQubitDensity> {
    let dist = CorrelatedPhaseDistribution::new(j2)?;
    let mut m = *rho.matrix();
    for a in 0..4 {
        for b in 0..4 {
            let ds = (SIGMA_Z_SUM[a] - SIGMA_Z_SUM[b]).abs();
            if ds == 0.0 {
                continue;
            }
            let correlated = bessel_j(0, 2f64.sqrt() * epsilon * ds);
            let independent = bessel_j(0, epsilon * ds).powi(2);
            m[(a, b)] *= dist.p_c * correlated + dist.p_nc * independent;
        }
    }
    Ok(TwoQubitDensity::from_matrix_unchecked(m))
}

/// `e^{-iε(s_a - s_b) cos θ}`, the elementwise action of `R(θ)`.
fn kick_phase_matrix(theta: f64, epsilon: f64) -> Mat4 {
    let c = theta.cos();
    Mat4::from_fn(|a, b| C64::from_polar(1.0, -epsilon * (SIGMA_Z_SUM[a] - SIGMA_Z_SUM[b]) * c))
}

pub const DEFAULT_GRID: usize = 512;

/// Exact evolution of `ρ₁₂` under the full angle chain, iterated kick by
/// kick.
///
/// Keeps the joint quantity `W(θ) = E[ρ_t ; θ_{t-1} = θ]` on an angle grid.
/// One kick maps `W'(θ') = K_{θ'}[p_c W(θ' - shift) + p_nc ρ_t / 2π]` with
/// `K_θ[X] = R(θ) U X U† R(θ)†`. The grid average is exact up to the
/// aliasing of `e^{ia cos θ}` harmonics, which is negligible at 512 points
/// for `ε ≲ 1`.
#[derive(Debug, Clone)]
pub struct ChainPropagator {
    dist: CorrelatedPhaseDistribution,
    rotation: Mat4,
    phases: Vec<Mat4>,
    weights: Vec<Mat4>,
    rho: Mat4,
    kicks: usize,
}

impl ChainPropagator {
    pub fn new(
        initial: &TwoQubitDensity,
        epsilon: f64,
        delta1: f64,
        delta2: f64,
        dist: CorrelatedPhaseDistribution,
        grid: usize,
    ) -> Result<Self> {
        if grid < 8 || grid % 4 != 0 {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("need a multiple of 4 of at least 8, got {grid}"),
            });
        }
        let phases = (0..grid)
            .map(|j| kick_phase_matrix(TAU * j as f64 / grid as f64, epsilon))
            .collect();
        Ok(Self {
            dist,
            rotation: local_x_rotations(delta1, delta2),
            phases,
            weights: vec![Mat4::zeros(); grid],
            rho: *initial.matrix(),
            kicks: 0,
        })
    }

    pub fn kicks(&self) -> usize {
        self.kicks
    }

    pub fn density(&self) -> TwoQubitDensity {
        TwoQubitDensity::from_matrix_unchecked(hermitize(&self.rho))
    }

    pub fn step(&mut self) {
        let m = self.weights.len();
        let uniform = self.rho / C64::new(m as f64, 0.0);
        let previous = std::mem::take(&mut self.weights);
        let first = self.kicks == 0;
        let offset = if first { 0 } else { grid_offset(self.dist.shift(self.kicks - 1), m) };
        let (p_c, p_nc) = (self.dist.p_c, self.dist.p_nc);
        let u = self.rotation;
        let u_adj = u.adjoint();
        self.weights = (0..m)
            .map(|j| {
                let src = (j as isize - offset).rem_euclid(m as isize) as usize;
                let mixed = if first {
                    uniform
                } else {
                    previous[src] * C64::new(p_c, 0.0) + uniform * C64::new(p_nc, 0.0)
                };
                (u * mixed * u_adj).component_mul(&self.phases[j])
            })
            .collect();
        self.rho = self.weights.iter().sum();
        self.kicks += 1;
    }

    /// Steps to `t_max`, measuring at `t = 0` and every `measure_every` kicks.
    pub fn evolve_record(&mut self, t_max: usize, measure_every: usize) -> Result<Vec<TimeSeriesRecord>> {
        let every = measure_every.max(1);
        let mut out = vec![TimeSeriesRecord::measure(self.kicks, &self.density())?];
        while self.kicks < t_max {
            self.step();
            if self.kicks % every == 0 {
                out.push(TimeSeriesRecord::measure(self.kicks, &self.density())?);
            }
        }
        Ok(out)
    }
}

const TRAJECTORY_CHUNKS: usize = 64;

/// Quantum-trajectory unravelling of the correlated phase-kick model.
///
/// Each trajectory draws its own angle chain and evolves a pure state by
/// `ψ ← R(θ_t) U ψ`. Records hold `E₁₂`, `S₁₂` of the projector average at
/// every kick `0..=steps`. Trajectories are split into a fixed set of chunks
/// with independent ChaCha streams and reduced in chunk order, so the output
/// depends only on the arguments.
#[allow(clippy::too_many_arguments)]
pub fn trajectory_evolve(
    initial: &QubitPairVector,
    steps: usize,
    epsilon: f64,
    delta1: f64,
    delta2: f64,
    dist: &CorrelatedPhaseDistribution,
    trajectories: usize,
    seed: u64,
) -> Result<Vec<TimeSeriesRecord>> {
    if trajectories == 0 {
        return Err(Error::InvalidParameter {
            name: "trajectories",
            reason: "need at least one trajectory".into(),
        });
    }
    let norm: f64 = initial.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let psi0 = nalgebra::Vector4::from_fn(|i, _| initial[i] / norm);
    let u = local_x_rotations(delta1, delta2);
    let chunks = TRAJECTORY_CHUNKS.min(trajectories);
    let sums: Vec<Vec<Mat4>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let count = trajectories / chunks + usize::from(chunk < trajectories % chunks);
            let mut acc = vec![Mat4::zeros(); steps + 1];
            for _ in 0..count {
                let mut psi = psi0;
                acc[0] += psi * psi.adjoint();
                let mut theta = rng.random::<f64>() * TAU;
                for (t, slot) in acc.iter_mut().enumerate().skip(1) {
                    if t > 1 {
                        theta = sample_next_angle(theta, t - 2, dist, &mut rng);
                    }
                    let c = theta.cos();
                    psi = u * psi;
                    for (ab, amp) in psi.iter_mut().enumerate() {
                        *amp *= C64::from_polar(1.0, -epsilon * SIGMA_Z_SUM[ab] * c);
                    }
                    *slot += psi * psi.adjoint();
                }
            }
            acc
        })
        .collect();
    let scale = C64::new(1.0 / trajectories as f64, 0.0);
    (0..=steps)
        .map(|t| {
            let total: Mat4 = sums.iter().map(|s| s[t]).sum();
            let m = hermitize(&(total * scale));
            let tr = m.trace().re;
            let rho = TwoQubitDensity::from_matrix_unchecked(m / C64::new(tr, 0.0));
            TimeSeriesRecord::measure(t, &rho)
        })
        .collect()
}

/// `Γ(K) = (4ε²/ln 2)(1 + 2J₂(K))`.
pub fn gamma_estimate(chaos: f64, epsilon: f64) -> f64 {
    4.0 * epsilon * epsilon / LN_2 * (1.0 + 2.0 * bessel_j(2, chaos))
}

/// Least-squares slope of `-ln E₁₂` against `t` over records with
/// `window.0 ≤ t ≤ window.1`.
pub fn fit_gamma(series: &[TimeSeriesRecord], window: (usize, usize)) -> Result<f64> {
    let points: Vec<(f64, f64)> = series
        .iter()
        .filter(|r| (window.0..=window.1).contains(&r.t))
        .map(|r| {
            if r.e12 > 0.0 {
                Ok((r.t as f64, -r.e12.ln()))
            } else {
                Err(Error::FitDomain(format!("E12 = {} at t = {}", r.e12, r.t)))
            }
        })
        .collect::<Result<_>>()?;
    least_squares_slope(&points)
}

pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::FitDomain(format!("need two points in the window, got {}", points.len())));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::FitDomain("all window points share one time".into()));
    }
    Ok(sxy / sxx)
}

/// `ln(E_a / E_b) / (b - a)`.
pub fn two_point_rate(series: &[TimeSeriesRecord], a: usize, b: usize) -> Result<f64> {
    let find = |t: usize| {
        series
            .iter()
            .find(|r| r.t == t)
            .ok_or_else(|| Error::FitDomain(format!("no record at t = {t}")))
    };
    let (ea, eb) = (find(a)?.e12, find(b)?.e12);
    if ea <= 0.0 || eb <= 0.0 || a == b {
        return Err(Error::FitDomain(format!("E({a}) = {ea}, E({b}) = {eb}")));
    }
    Ok((ea / eb).ln() / (b as f64 - a as f64))
}
