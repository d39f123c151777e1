//! Classical Chirikov standard map on the torus and Monte Carlo estimates of
//! its angular correlations.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub use crate::bessel::{bessel_j, find_j2_zero_near};

/// Point of the torus `0 ≤ θ < 2π`, `-π ≤ p < π` (rescaled momentum `p = Tn`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub theta: f64,
    pub p: f64,
}

pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π
    if r >= TAU {
        0.0
    } else {
        r
    }
}

pub fn wrap_momentum(x: f64) -> f64 {
    wrap_angle(x + PI) - PI
}

impl ClassicalState {
    pub fn new(theta: f64, p: f64) -> Self {
        Self {
            theta: wrap_angle(theta),
            p: wrap_momentum(p),
        }
    }
}

/// `p̄ = p + K sin θ`, `θ̄ = θ + p̄`.
pub fn forward_step(s: ClassicalState, chaos: f64) -> ClassicalState {
    let p = s.p + chaos * s.theta.sin();
    ClassicalState::new(s.theta + p, p)
}

/// `θ_prev = θ - p`, `p_prev = p - K sin(θ - p)`.
pub fn inverse_step(s: ClassicalState, chaos: f64) -> ClassicalState {
    let theta = s.theta - s.p;
    ClassicalState::new(theta, s.p - chaos * theta.sin())
}

/// Distance on the torus, accounting for wrap-around in both coordinates.
pub fn torus_distance(a: ClassicalState, b: ClassicalState) -> f64 {
    let d = |x: f64| {
        let r = x.rem_euclid(TAU);
        r.min(TAU - r)
    };
    d(a.theta - b.theta).hypot(d(a.p - b.p))
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub standard_error: f64,
}

pub const MIN_SAMPLES: usize = 10_000;
const CHUNK: usize = 1 << 16;

/// `⟨cos θ(0) cos θ(lag)⟩` over uniform initial points on the torus, for
/// `lag ∈ {1, 2}`.
///
/// Samples are drawn in fixed-size chunks, each with its own ChaCha stream
/// derived from `seed`, and reduced in chunk order, so the result depends only
/// on `(seed, n_samples)`.
pub fn correlation_mc(chaos: f64, lag: usize, n_samples: usize, seed: u64) -> Result<Estimate> {
    if !(1..=2).contains(&lag) {
        return Err(Error::UnsupportedLag(lag));
    }
    correlation_mc_any_lag(chaos, lag, n_samples, seed)
}

/// Same estimator for arbitrary lag. Correlations beyond lag 2 are weak for
/// `K ≫ 1`; this is exploratory only.
pub fn correlation_mc_any_lag(
    chaos: f64,
    lag: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Estimate> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            reason: format!("need at least {MIN_SAMPLES}, got {n_samples}"),
        });
    }
    let n_chunks = n_samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let count = CHUNK.min(n_samples - chunk * CHUNK);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                let start = ClassicalState::new(
                    rng.random::<f64>() * TAU,
                    rng.random::<f64>() * TAU - PI,
                );
                let mut s = start;
                for _ in 0..lag {
                    s = forward_step(s, chaos);
                }
                let x = start.theta.cos() * s.theta.cos();
                sum += x;
                sum_sq += x * x;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = n_samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok(Estimate {
        value: mean,
        standard_error: (var / n).sqrt(),
    })
}
