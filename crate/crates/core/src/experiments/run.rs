use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, Mode};
use crate::bessel::bessel_j;
use crate::chirikov::correlation_mc;
use crate::error::{Error, Result};
use crate::floquet::{evolve_record, FloquetOperator, TimeSeriesRecord};
use crate::nonmarkov::{
    fit_gamma, gamma_estimate, least_squares_slope, trajectory_evolve, ChainPropagator,
    CorrelatedPhaseDistribution, DEFAULT_GRID,
};
use crate::phase_kick::{bloch_step, BlochCoordinates, PhaseKickChannel};
use crate::state::{bell_phi_plus, random_env_state, tensor_initial, ModelParams, TwoQubitDensity};

/// One CSV cell. Integers print plainly; reals print with 17 significant
/// digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format!("{v:.16e}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Value,
}

pub const SERIES_COLUMNS: [&str; 4] = ["t", "E12", "S12", "D"];

/// Time series of the selected model from `|φ⁺⟩` (times a random rotator
/// state drawn from `seed` in full mode).
pub fn simulate(cfg: &ExperimentConfig, mode: Mode) -> Result<Vec<TimeSeriesRecord>> {
    let every = cfg.measure_every;
    let bell = TwoQubitDensity::pure(&bell_phi_plus());
    match mode {
        Mode::Full => {
            let params = ModelParams::new(cfg.chaos, cfg.n_levels)?
                .with_coupling(cfg.epsilon)
                .with_rotations(cfg.delta1, cfg.delta2)
                .with_seed(cfg.seed);
            let op = FloquetOperator::new(params)?;
            let env = random_env_state(cfg.n_levels, cfg.seed)?;
            let mut state = tensor_initial(&bell_phi_plus(), &env)?;
            evolve_record(&mut state, &op, cfg.t_max, every)
        }
        Mode::PhaseKick => PhaseKickChannel::new(cfg.epsilon, cfg.delta1, cfg.delta2).evolve_record(&bell, cfg.t_max, every),
        Mode::Bloch => {
            let mut b = BlochCoordinates::bell();
            let mut out = vec![TimeSeriesRecord::measure(0, &bell)?];
            for t in 1..=cfg.t_max {
                b = bloch_step(&b, cfg.epsilon, cfg.delta1, cfg.delta2);
                if t % every == 0 {
                    let rho = b.to_density();
                    // the truncated map is not completely positive; once the
                    // state leaves the physical set only D stays meaningful
                    out.push(TimeSeriesRecord::measure(t, &rho).unwrap_or(TimeSeriesRecord {
                        t,
                        e12: f64::NAN,
                        s12: f64::NAN,
                        coherence: rho.bell_coherence(),
                    }));
                }
            }
            Ok(out)
        }
        Mode::Trajectories => {
            let dist = CorrelatedPhaseDistribution::from_chaos(cfg.chaos)?;
            let all = trajectory_evolve(
                &bell_phi_plus(),
                cfg.t_max,
                cfg.epsilon,
                cfg.delta1,
                cfg.delta2,
                &dist,
                cfg.trajectories,
                cfg.seed,
            )?;
            Ok(all.into_iter().filter(|r| r.t % every == 0).collect())
        }
        Mode::TwoKick => {
            let dist = CorrelatedPhaseDistribution::from_chaos(cfg.chaos)?;
            ChainPropagator::new(&bell, cfg.epsilon, cfg.delta1, cfg.delta2, dist, DEFAULT_GRID)?
                .evolve_record(cfg.t_max, every)
        }
        Mode::Correlations | Mode::Sweep => Err(Error::Config {
            field: "mode".into(),
            reason: format!("`{mode}` is not a time-series mode"),
        }),
    }
}

/// First time `S₁₂` reaches `threshold`, interpolated linearly between the
/// bracketing records.
pub fn onset_time(series: &[TimeSeriesRecord], threshold: f64) -> Option<f64> {
    if series.first()?.s12 >= threshold {
        return Some(series[0].t as f64);
    }
    series.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        (a.s12 < threshold && b.s12 >= threshold).then(|| {
            let frac = (threshold - a.s12) / (b.s12 - a.s12);
            a.t as f64 + frac * (b.t - a.t) as f64
        })
    })
}

fn series_rows(series: &[TimeSeriesRecord]) -> Vec<Vec<Cell>> {
    series
        .iter()
        .map(|r| vec![Cell::Int(r.t as u64), Cell::Real(r.e12), Cell::Real(r.s12), Cell::Real(r.coherence)])
        .collect()
}

/// Rate and onset time of one series; fit failures become messages.
fn series_summary(cfg: &ExperimentConfig, series: &[TimeSeriesRecord]) -> (Option<f64>, Option<f64>, Vec<String>) {
    let mut errors = Vec::new();
    if let Some(r) = series.iter().find(|r| r.e12.is_nan()) {
        errors.push(format!("state left the physical set at t = {}; E12, S12 are NaN from there", r.t));
    }
    let gamma = match fit_gamma(series, cfg.fit_window.bounds()) {
        Ok(g) => Some(g),
        Err(e) => {
            errors.push(e.to_string());
            None
        }
    };
    let t_s = onset_time(series, cfg.threshold);
    if t_s.is_none() {
        errors.push(format!("S12 never reached {} within t_max", cfg.threshold));
    }
    (gamma, t_s, errors)
}

fn base_summary(cfg: &ExperimentConfig) -> Value {
    json!({
        "mode": cfg.mode.name(),
        "seed": cfg.seed,
        "version": super::VERSION,
        "config": cfg,
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    match cfg.mode {
        Mode::Correlations => run_correlations(cfg),
        Mode::Sweep => run_sweep(cfg),
        mode => {
            let series = simulate(cfg, mode)?;
            let (gamma, t_s, errors) = series_summary(cfg, &series);
            let last = series.last().copied();
            let mut summary = base_summary(cfg);
            let extra = json!({
                "gamma": gamma,
                "fit_window": cfg.fit_window,
                "t_s": t_s,
                "threshold": cfg.threshold,
                "final_e12": last.map(|r| r.e12),
                "final_s12": last.map(|r| r.s12),
                "errors": errors,
            });
            merge(&mut summary, extra);
            Ok(RunOutput {
                columns: SERIES_COLUMNS.to_vec(),
                rows: series_rows(&series),
                summary,
            })
        }
    }
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn run_correlations(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let ks = if cfg.k_list.is_empty() { vec![cfg.chaos] } else { cfg.k_list.clone() };
    let mut rows = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        for lag in 1..=2usize {
            // distinct stream per (K, lag) keeps rows independent
            let seed = cfg.seed.wrapping_add((2 * i + lag) as u64 * 0x9E37_79B9);
            let est = correlation_mc(k, lag, cfg.samples, seed)?;
            let prediction = if lag == 1 { 0.0 } else { bessel_j(2, k) / 2.0 };
            rows.push(vec![
                Cell::Real(k),
                Cell::Int(lag as u64),
                Cell::Real(est.value),
                Cell::Real(est.standard_error),
                Cell::Real(prediction),
            ]);
        }
    }
    let within: Vec<bool> = rows
        .iter()
        .map(|r| match (r[2], r[3], r[4]) {
            (Cell::Real(v), Cell::Real(se), Cell::Real(p)) => (v - p).abs() <= 3.0 * se,
            _ => false,
        })
        .collect();
    let mut summary = base_summary(cfg);
    merge(&mut summary, json!({ "within_3_se": within, "errors": Vec::<String>::new() }));
    Ok(RunOutput {
        columns: vec!["K", "lag", "estimate", "standard_error", "prediction"],
        rows,
        summary,
    })
}

/// One sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub coordinate: f64,
    pub gamma: Option<f64>,
    pub t_s: Option<f64>,
    pub gamma_estimate: f64,
}

/// Runs every point of the ε or K axis on the worker pool, sorted by
/// coordinate.
pub fn sweep_points(cfg: &ExperimentConfig) -> Result<(Vec<SweepPoint>, Vec<String>)> {
    let model = cfg.effective_sweep_model().mode();
    let by_eps = cfg.k_list.is_empty();
    let axis = if by_eps { &cfg.eps_list } else { &cfg.k_list };
    let results: Vec<Result<(SweepPoint, Vec<String>)>> = axis
        .par_iter()
        .map(|&x| {
            let mut point_cfg = cfg.clone();
            if by_eps {
                point_cfg.epsilon = x;
            } else {
                point_cfg.chaos = x;
            }
            let series = simulate(&point_cfg, model)?;
            let (gamma, t_s, errors) = series_summary(&point_cfg, &series);
            let estimate = if by_eps {
                4.0 * x * x / LN_2
            } else {
                gamma_estimate(x, point_cfg.epsilon)
            };
            let label = if by_eps { "eps" } else { "K" };
            let errors = errors.into_iter().map(|e| format!("{label}={x}: {e}")).collect();
            Ok((SweepPoint { coordinate: x, gamma, t_s, gamma_estimate: estimate }, errors))
        })
        .collect();
    let mut points = Vec::with_capacity(results.len());
    let mut errors = Vec::new();
    for r in results {
        let (p, e) = r?;
        points.push(p);
        errors.extend(e);
    }
    points.sort_by(|a, b| a.coordinate.total_cmp(&b.coordinate));
    Ok((points, errors))
}

/// Log-log slope of `Γ(ε)` and mean `Γ/ε²` over the fitted points.
pub fn rate_scaling(points: &[SweepPoint]) -> Result<(f64, f64)> {
    let fitted: Vec<(f64, f64)> = points.iter().filter_map(|p| p.gamma.map(|g| (p.coordinate, g))).collect();
    if fitted.iter().any(|&(_, g)| g <= 0.0) {
        return Err(Error::FitDomain("non-positive fitted rate in log-log fit".into()));
    }
    let logs: Vec<(f64, f64)> = fitted.iter().map(|&(e, g)| (e.ln(), g.ln())).collect();
    let slope = least_squares_slope(&logs)?;
    let prefactor = fitted.iter().map(|&(e, g)| g / (e * e)).sum::<f64>() / fitted.len() as f64;
    Ok((slope, prefactor))
}

fn opt(v: Option<f64>) -> Cell {
    Cell::Real(v.unwrap_or(f64::NAN))
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let (points, mut errors) = sweep_points(cfg)?;
    let by_eps = cfg.k_list.is_empty();
    let rows = points
        .iter()
        .map(|p| vec![Cell::Real(p.coordinate), opt(p.gamma), opt(p.t_s), Cell::Real(p.gamma_estimate)])
        .collect();
    let mut summary = base_summary(cfg);
    let mut extra = json!({
        "sweep_model": cfg.effective_sweep_model(),
        "fit_window": cfg.fit_window,
        "threshold": cfg.threshold,
    });
    if by_eps {
        match rate_scaling(&points) {
            Ok((slope, prefactor)) => merge(
                &mut extra,
                json!({ "loglog_slope": slope, "prefactor": prefactor, "markov_prefactor": 4.0 / LN_2 }),
            ),
            Err(e) => errors.push(e.to_string()),
        }
    }
    merge(&mut extra, json!({ "errors": errors }));
    merge(&mut summary, extra);
    Ok(RunOutput {
        columns: vec![if by_eps { "eps" } else { "K" }, "gamma", "t_S", "gamma_estimate"],
        rows,
        summary,
    })
}
