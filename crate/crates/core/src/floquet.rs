//! One-kick evolution of the composite system by split steps.
//!
//! Per kick, in order: the qubit rotations `exp(-iδ₁σ_x⁽¹⁾) exp(-iδ₂σ_x⁽²⁾)`,
//! the free rotation `exp(-iTn²/2)` in momentum space, and the
//! qubit-conditioned kick `exp[-i(k + ε(σ_z⁽¹⁾+σ_z⁽²⁾)) cos θ]` in angle space.
//!
//! Angle grid `θ_j = 2πj/N`; the momentum → angle transform has kernel
//! `exp(+inθ_j)/√N` with signed `n = i - N/2`, which is `(-1)^j` times an
//! unnormalized inverse FFT of the stored row.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::entanglement::{entanglement_of_formation, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{local_x_rotations, Mat4, C64};
use crate::state::{check_levels, partial_trace_env, CompositeState, ModelParams, Representation, TwoQubitDensity};

/// `σ_z⁽¹⁾ + σ_z⁽²⁾` eigenvalue of each computational label `00, 01, 10, 11`.
pub const SIGMA_Z_SUM: [f64; 4] = [2.0, 0.0, 0.0, -2.0];

/// Index into the three distinct kick tables (`s = +2, 0, -2`) for each label.
const KICK_TABLE_OF_LABEL: [usize; 4] = [0, 1, 1, 2];

/// `K` and `N` with the coupling and qubit rotations off; `T = 2π/N`,
/// `k = K/T`.
pub fn semiclassical_params(chaos: f64, n_levels: usize) -> Result<ModelParams> {
    if !(chaos > 0.0) {
        return Err(Error::InvalidParameter {
            name: "K",
            reason: format!("must be positive, got {chaos}"),
        });
    }
    ModelParams::new(chaos, n_levels)
}

/// One measurement of the reduced two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub t: usize,
    /// Entanglement of formation between the qubits.
    pub e12: f64,
    /// Von Neumann entropy (bits) of the two-qubit state.
    pub s12: f64,
    /// `2|ρ_{00,11}|`.
    pub coherence: f64,
}

impl TimeSeriesRecord {
    pub fn measure(t: usize, rho: &TwoQubitDensity) -> Result<Self> {
        Ok(Self {
            t,
            e12: entanglement_of_formation(rho)?,
            s12: von_neumann_entropy(rho)?,
            coherence: rho.bell_coherence(),
        })
    }
}

/// Precomputed tables for the one-kick unitary. Immutable once built and
/// shareable across threads.
#[derive(Clone)]
pub struct FloquetOperator {
    params: ModelParams,
    free_phases: Vec<C64>,
    kick_phases: [Vec<C64>; 3],
    qubit_rotation: Mat4,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FloquetOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FloquetOperator")
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl FloquetOperator {
    pub fn new(params: ModelParams) -> Result<Self> {
        let n = params.n_levels;
        check_levels(n).map_err(|e| Error::Configuration(e.to_string()))?;
        let period = params.period();
        let k = params.kick_strength();
        let half = (n / 2) as f64;
        let free_phases = (0..n)
            .map(|i| {
                let level = i as f64 - half;
                C64::from_polar(1.0, -period * level * level / 2.0)
            })
            .collect();
        let kick_table = |s: f64| -> Vec<C64> {
            (0..n)
                .map(|j| {
                    let theta = 2.0 * PI * j as f64 / n as f64;
                    C64::from_polar(1.0, -(k + params.epsilon * s) * theta.cos())
                })
                .collect()
        };
        let mut planner = FftPlanner::new();
        Ok(Self {
            params,
            free_phases,
            kick_phases: [kick_table(2.0), kick_table(0.0), kick_table(-2.0)],
            qubit_rotation: local_x_rotations(params.delta1, params.delta2),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn n_levels(&self) -> usize {
        self.params.n_levels
    }

    /// Free-rotation phases indexed by storage position (`n = i - N/2`).
    pub fn free_phases(&self) -> &[C64] {
        &self.free_phases
    }

    /// Kick phases on the angle grid for qubit label `ab`.
    pub fn kick_phases(&self, ab: usize) -> &[C64] {
        &self.kick_phases[KICK_TABLE_OF_LABEL[ab]]
    }

    pub fn qubit_rotation(&self) -> &Mat4 {
        &self.qubit_rotation
    }

    fn check_state(&self, state: &CompositeState) -> Result<()> {
        if state.n_levels() != self.n_levels() {
            return Err(Error::DimensionMismatch {
                expected: self.n_levels(),
                got: state.n_levels(),
            });
        }
        Ok(())
    }

    /// Advances `state` by one kick in place. Angle-representation input is
    /// converted to momentum first; the result is in momentum representation.
    pub fn step(&self, state: &mut CompositeState) -> Result<()> {
        self.check_state(state)?;
        if state.representation() == Representation::Angle {
            self.to_momentum(state)?;
        }
        let n = self.n_levels();
        let scale = 1.0 / n as f64;
        let mut scratch = vec![C64::default(); self.forward.get_inplace_scratch_len().max(self.inverse.get_inplace_scratch_len())];
        let amps = state.amplitudes_mut();
        let u = &self.qubit_rotation;
        for i in 0..n {
            let v = [amps[i], amps[n + i], amps[2 * n + i], amps[3 * n + i]];
            for (ab, out) in (0..4).map(|ab| (ab, ab * n + i)) {
                amps[out] = u[(ab, 0)] * v[0] + u[(ab, 1)] * v[1] + u[(ab, 2)] * v[2] + u[(ab, 3)] * v[3];
            }
        }
        for (ab, row) in amps.chunks_exact_mut(n).enumerate() {
            row.iter_mut()
                .zip(&self.free_phases)
                .for_each(|(a, f)| *a *= f);
            // The (-1)^j factors of the two basis changes cancel around a
            // diagonal angle-space operator.
            self.inverse.process_with_scratch(row, &mut scratch);
            row.iter_mut()
                .zip(self.kick_phases(ab))
                .for_each(|(a, kp)| *a *= kp * scale);
            self.forward.process_with_scratch(row, &mut scratch);
        }
        Ok(())
    }

    /// Runs `kicks` steps.
    pub fn evolve(&self, state: &mut CompositeState, kicks: usize) -> Result<()> {
        for _ in 0..kicks {
            self.step(state)?;
        }
        Ok(())
    }

    /// Rewrites the rotator rows in the angle basis.
    pub fn to_angle(&self, state: &mut CompositeState) -> Result<()> {
        self.check_state(state)?;
        if state.representation() == Representation::Angle {
            return Ok(());
        }
        let norm = 1.0 / (self.n_levels() as f64).sqrt();
        for row in state.amplitudes_mut().chunks_exact_mut(self.n_levels()) {
            self.inverse.process(row);
            for (j, a) in row.iter_mut().enumerate() {
                *a *= if j % 2 == 0 { norm } else { -norm };
            }
        }
        state.set_representation(Representation::Angle);
        Ok(())
    }

    /// Rewrites the rotator rows in the momentum basis.
    pub fn to_momentum(&self, state: &mut CompositeState) -> Result<()> {
        self.check_state(state)?;
        if state.representation() == Representation::Momentum {
            return Ok(());
        }
        let norm = 1.0 / (self.n_levels() as f64).sqrt();
        for row in state.amplitudes_mut().chunks_exact_mut(self.n_levels()) {
            for (j, a) in row.iter_mut().enumerate() {
                *a *= if j % 2 == 0 { norm } else { -norm };
            }
            self.forward.process(row);
        }
        state.set_representation(Representation::Momentum);
        Ok(())
    }
}

/// Evolves `state` for `t_max` kicks, measuring `E₁₂`, `S₁₂` and the Bell
/// coherence at `t = 0` and every `measure_every` kicks thereafter.
pub fn evolve_record(
    state: &mut CompositeState,
    op: &FloquetOperator,
    t_max: usize,
    measure_every: usize,
) -> Result<Vec<TimeSeriesRecord>> {
    if measure_every == 0 {
        return Err(Error::InvalidParameter {
            name: "measure_every",
            reason: "must be at least 1".into(),
        });
    }
    let mut records = Vec::with_capacity(t_max / measure_every + 1);
    records.push(TimeSeriesRecord::measure(0, &partial_trace_env(state))?);
    for t in 1..=t_max {
        op.step(state)?;
        if t % measure_every == 0 {
            records.push(TimeSeriesRecord::measure(t, &partial_trace_env(state))?);
        }
    }
    Ok(records)
}
