//! Acceptance criteria, one line each. Runs without the libtest harness so
//! every PASS/FAIL line is printed; exits nonzero if any criterion fails.

use std::f64::consts::{LN_2, TAU};
use std::time::Instant;

use chaosbath::bessel::bessel_j;
use chaosbath::chirikov::correlation_mc;
use chaosbath::entanglement::entanglement_of_formation;
use chaosbath::experiments::{rate_scaling, simulate, sweep_points, ExperimentConfig, FitWindow, Mode};
use chaosbath::floquet::{FloquetOperator, TimeSeriesRecord, SIGMA_Z_SUM};
use chaosbath::linalg::{hermitize, local_x_rotations, max_abs_diff, Mat4, C64};
use chaosbath::nonmarkov::{
    fit_gamma, gamma_estimate, trajectory_evolve, two_kick_map_exact, ChainPropagator,
    CorrelatedPhaseDistribution, DEFAULT_GRID,
};
use chaosbath::phase_kick::{apply_channel_exact, bloch_step, BlochCoordinates, PhaseKickChannel};
use chaosbath::state::{
    bell_phi_plus, random_env_state, tensor_initial, CompositeState, ModelParams, Representation,
    TwoQubitDensity,
};
use nalgebra::{DMatrix, DVector, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const K_ZERO: f64 = 99.72676;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn bell() -> TwoQubitDensity {
    TwoQubitDensity::pure(&bell_phi_plus())
}

fn random_pure(rng: &mut ChaCha8Rng) -> Vector4<C64> {
    let v = Vector4::from_fn(|_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    v / C64::new(v.norm(), 0.0)
}

fn random_density(rng: &mut ChaCha8Rng, rank: usize) -> TwoQubitDensity {
    let mut m = Mat4::zeros();
    for _ in 0..rank {
        let v = random_pure(rng);
        m += v * v.adjoint() * C64::new(rng.random::<f64>() + 1e-3, 0.0);
    }
    let tr = m.trace();
    TwoQubitDensity::new(hermitize(&(m / tr))).unwrap()
}

fn max_by<T>(items: &[T], f: impl Fn(&T) -> f64) -> (f64, usize) {
    items
        .iter()
        .enumerate()
        .map(|(i, x)| (f(x), i))
        .fold((0.0, 0), |best, cur| if cur.0 > best.0 { cur } else { best })
}

/// Markovian decay law for E₁₂.
fn criterion_1() -> Outcome {
    let eps: f64 = 0.016;
    let t_max = (0.05 / (eps * eps)).floor() as usize;
    let recs = PhaseKickChannel::new(eps, 0.0, 0.0).evolve_record(&bell(), t_max, 1).unwrap();
    let law = |t: usize| 1.0 - 4.0 * eps * eps * t as f64 / LN_2;
    let (dev, i) = max_by(&recs, |r| (r.e12 - law(r.t)).abs());
    let tol = 5e-3;
    outcome(
        dev <= tol,
        format!("max |E12 - (1 - 4 eps^2 t/ln2)| = {dev:.4e} at t = {} (eps^2 t = {:.4}), tol {tol:e}", recs[i].t, eps * eps * recs[i].t as f64),
    )
}

/// Entropy law.
fn criterion_2() -> Outcome {
    let eps: f64 = 0.016;
    let recs = PhaseKickChannel::new(eps, 0.0, 0.0).evolve_record(&bell(), 150, 1).unwrap();
    let law = |t: usize| {
        let x = eps * eps * t as f64;
        2.0 * x / LN_2 * (1.0 - (2.0 * x).ln())
    };
    let window: Vec<&TimeSeriesRecord> = recs.iter().filter(|r| (10..=150).contains(&r.t)).collect();
    let (dev, i) = max_by(&window, |r| (r.s12 - law(r.t)).abs());
    let tol = 1e-2;
    outcome(dev <= tol, format!("max |S12 - law| over 10 <= t <= 150 = {dev:.4e} at t = {}, tol {tol:e}", window[i].t))
}

/// Γ ∝ ε² for the phase-kick model.
fn criterion_3() -> Outcome {
    let cfg = ExperimentConfig {
        mode: Mode::Sweep,
        eps_list: vec![0.004, 0.008, 0.016, 0.032],
        delta1: 1e-2,
        delta2: 2f64.sqrt() * 1e-2,
        t_max: 20,
        fit_window: FitWindow::new(0, 20).unwrap(),
        ..Default::default()
    };
    let (points, _) = sweep_points(&cfg).unwrap();
    let (slope, prefactor) = rate_scaling(&points).unwrap();
    let markov = 4.0 / LN_2;
    let rel = (prefactor / markov - 1.0).abs();
    let rates: Vec<String> = points.iter().map(|p| format!("{:.3e}", p.gamma.unwrap_or(f64::NAN))).collect();
    outcome(
        (slope - 2.0).abs() <= 0.1 && rel <= 0.15,
        format!(
            "fit window 0:20, log-log slope {slope:.4} (2.0 +- 0.1), prefactor {prefactor:.4} vs {markov:.4} (rel {rel:.3}, tol 0.15); Gamma = [{}]",
            rates.join(", ")
        ),
    )
}

/// Full model converges to the phase-kick model as N grows.
fn criterion_4() -> Outcome {
    const SEEDS: [u64; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];
    const T_MAX: usize = 3000;
    let threshold = 0.02;
    let base = ExperimentConfig {
        chaos: K_ZERO,
        epsilon: 8e-3,
        delta1: 1e-2,
        delta2: 2f64.sqrt() * 1e-2,
        t_max: T_MAX,
        ..Default::default()
    };
    let reference = simulate(&base, Mode::PhaseKick).unwrap();
    let levels = [1usize << 9, 1 << 10, 1 << 11];
    let jobs: Vec<(usize, u64)> = levels.iter().flat_map(|&n| SEEDS.iter().map(move |&s| (n, s))).collect();
    let crossings: Vec<usize> = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let full = simulate(&ExperimentConfig { n_levels: n, seed, ..base.clone() }, Mode::Full).unwrap();
            full.iter()
                .zip(&reference)
                .find(|(a, b)| (a.s12 - b.s12).abs() > threshold)
                .map_or(T_MAX + 1, |(a, _)| a.t)
        })
        .collect();
    let mut medians = Vec::new();
    let mut per_n = Vec::new();
    for (i, &n) in levels.iter().enumerate() {
        let mut c = crossings[i * SEEDS.len()..(i + 1) * SEEDS.len()].to_vec();
        per_n.push(format!("N={n}: {c:?}"));
        c.sort_unstable();
        medians.push(c[c.len() / 2]);
    }
    let increasing = medians.windows(2).all(|w| w[0] < w[1]);
    outcome(
        increasing,
        format!(
            "median first |dS12| > {threshold} over seeds 1..9 (t_max {T_MAX}, {} = never): {medians:?}; per seed {}",
            T_MAX + 1,
            per_n.join("; ")
        ),
    )
}

/// Classical lag-1 and lag-2 correlations.
fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, &k) in [95.0, K_ZERO, 105.0].iter().enumerate() {
        let l1 = correlation_mc(k, 1, 1_000_000, 100 + i as u64).unwrap();
        let l2 = correlation_mc(k, 2, 1_000_000, 200 + i as u64).unwrap();
        let target = bessel_j(2, k) / 2.0;
        let z1 = l1.value.abs() / l1.standard_error;
        let z2 = (l2.value - target).abs() / l2.standard_error;
        pass &= z1 <= 3.0 && z2 <= 3.0;
        parts.push(format!("K={k}: lag1 {:.2e} ({z1:.2} se), lag2 {:.4e} vs {target:.4e} ({z2:.2} se)", l1.value, l2.value));
    }
    outcome(pass, parts.join("; "))
}

/// First coherences under correlated kicks.
fn criterion_6() -> Outcome {
    let eps: f64 = 5e-3;
    let e4 = eps.powi(4);
    let mut pass = true;
    let mut parts = Vec::new();
    for &k in &[90.0, 95.0, 100.0, 105.0] {
        let dist = CorrelatedPhaseDistribution::from_chaos(k).unwrap();
        let j2 = dist.j2;
        let mut chain = ChainPropagator::new(&bell(), eps, 0.0, 0.0, dist, DEFAULT_GRID).unwrap();
        let mut d = [0.0; 5];
        for t in 1..=4 {
            chain.step();
            d[t] = chain.density().bell_coherence();
        }
        let r3 = (d[3] - (1.0 - (12.0 + 8.0 * j2) * eps * eps)) / e4;
        let r4 = (d[4] - (1.0 - (16.0 + 16.0 * j2) * eps * eps)) / e4;
        pass &= r3.abs() <= 5.0 && r4.abs() <= 5.0;
        parts.push(format!("K={k}: (D3-law)/eps^4 = {r3:.1}, (D4-law)/eps^4 = {r4:.1}"));
    }
    outcome(pass, format!("tol 5 eps^4; {}", parts.join("; ")))
}

/// Γ(K) oscillations against the analytic estimate.
fn criterion_7() -> Outcome {
    let eps: f64 = 5e-3;
    let window = (4, 100);
    let markov = 4.0 * eps * eps / LN_2;
    let ks: Vec<f64> = (90..=110).map(f64::from).collect();
    let rows: Vec<(f64, f64, f64)> = ks
        .par_iter()
        .map(|&k| {
            let dist = CorrelatedPhaseDistribution::from_chaos(k).unwrap();
            let series = ChainPropagator::new(&bell(), eps, 0.0, 0.0, dist, DEFAULT_GRID)
                .unwrap()
                .evolve_record(window.1, 1)
                .unwrap();
            (k, fit_gamma(&series, window).unwrap(), gamma_estimate(k, eps))
        })
        .collect();
    let checked: Vec<&(f64, f64, f64)> = rows.iter().filter(|r| r.2 > 0.5 * markov).collect();
    let (worst, i) = max_by(&checked, |r| (r.1 / r.2 - 1.0).abs());
    outcome(
        worst <= 0.1,
        format!(
            "fit window {}:{}, {} of {} K values checked, worst |Gamma/estimate - 1| = {worst:.4} at K = {} (tol 0.10); Gamma/markov range {:.3}..{:.3}",
            window.0,
            window.1,
            checked.len(),
            rows.len(),
            checked[i].0,
            rows.iter().map(|r| r.1 / markov).fold(f64::INFINITY, f64::min),
            rows.iter().map(|r| r.1 / markov).fold(0.0, f64::max),
        ),
    )
}

/// Trajectory average against the exact correlated evolution.
fn criterion_8() -> Outcome {
    let (eps, m, t_max) = (5e-3, 5000usize, 200usize);
    let tol = 5.0 / (m as f64).sqrt();
    let mut pass = true;
    let mut parts = Vec::new();
    for &k in &[95.0, 105.0] {
        let dist = CorrelatedPhaseDistribution::from_chaos(k).unwrap();
        let traj = trajectory_evolve(&bell_phi_plus(), t_max, eps, 0.0, 0.0, &dist, m, 42).unwrap();
        let exact = ChainPropagator::new(&bell(), eps, 0.0, 0.0, dist, DEFAULT_GRID)
            .unwrap()
            .evolve_record(t_max, 1)
            .unwrap();
        let (sup, _) = max_by(&traj.iter().zip(&exact).collect::<Vec<_>>(), |(a, b)| (a.e12 - b.e12).abs());
        pass &= sup <= tol;
        parts.push(format!("K={k}: sup |dE12| = {sup:.3e}"));
    }
    outcome(pass, format!("M = {m}, tol {tol:.4}; {}", parts.join("; ")))
}

/// Memoryless kicks never raise entanglement.
fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let inputs: Vec<(TwoQubitDensity, f64, f64, f64)> = (0..10_000)
        .map(|i| {
            let rho = if i % 2 == 0 {
                let v = random_pure(&mut rng);
                TwoQubitDensity::pure(&[v[0], v[1], v[2], v[3]])
            } else {
                let rank = rng.random_range(2..=4);
                random_density(&mut rng, rank)
            };
            (rho, rng.random_range(0.01..0.1), rng.random_range(0.0..0.1), rng.random_range(0.0..0.1))
        })
        .collect();
    let results: Vec<(usize, f64)> = inputs
        .par_iter()
        .map(|(rho0, eps, d1, d2)| {
            let e0 = entanglement_of_formation(rho0).unwrap();
            let ch = PhaseKickChannel::new(*eps, *d1, *d2);
            let mut rho = *rho0;
            let (mut violations, mut worst) = (0, f64::NEG_INFINITY);
            for _ in 0..100 {
                rho = ch.apply(&rho);
                let excess = entanglement_of_formation(&rho).unwrap() - e0;
                worst = worst.max(excess);
                violations += usize::from(excess > 1e-9);
            }
            (violations, worst)
        })
        .collect();
    let violations: usize = results.iter().map(|r| r.0).sum();
    let worst = results.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    outcome(
        violations == 0,
        format!("10^4 states x 100 kicks, eps in [0.01, 0.1), delta in [0, 0.1): {violations} violations, max E12(t) - E12(0) = {worst:.3e}"),
    )
}

/// Dense one-kick operator from explicit matrix elements:
/// `⟨n|V|m⟩ = (1/N) Σ_j e^{-i(n-m)θ_j} e^{-i k cos θ_j}`, `θ_j = 2πj/N`.
fn dense_floquet(p: &ModelParams) -> DMatrix<C64> {
    let n = p.n_levels;
    let half = (n / 2) as i64;
    let dim = 4 * n;
    let u = local_x_rotations(p.delta1, p.delta2);
    let mut full = DMatrix::<C64>::zeros(dim, dim);
    for ab in 0..4 {
        let k = p.kick_strength() + p.epsilon * SIGMA_Z_SUM[ab];
        for r in 0..n {
            for c in 0..n {
                let (nr, nc) = (r as i64 - half, c as i64 - half);
                let v: C64 = (0..n)
                    .map(|j| {
                        let th = TAU * j as f64 / n as f64;
                        C64::from_polar(1.0 / n as f64, -((nr - nc) as f64) * th - k * th.cos())
                    })
                    .sum();
                let free = C64::from_polar(1.0, -p.period() * (nc * nc) as f64 / 2.0);
                for cd in 0..4 {
                    full[(ab * n + r, cd * n + c)] = v * free * u[(ab, cd)];
                }
            }
        }
    }
    full
}

/// Structural invariants.
fn criterion_10() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;

    let p = ModelParams::new(K_ZERO, 1 << 10).unwrap().with_coupling(8e-3).with_rotations(1e-2, 2f64.sqrt() * 1e-2);
    let op = FloquetOperator::new(p).unwrap();
    let mut s = tensor_initial(&bell_phi_plus(), &random_env_state(1 << 10, 3).unwrap()).unwrap();
    op.evolve(&mut s, 1000).unwrap();
    let drift = (s.norm_sqr() - 1.0).abs();
    pass &= drift <= 1e-10;
    parts.push(format!("norm drift after 1000 kicks at N=1024 {drift:.2e} (<= 1e-10)"));

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut worst_trace, mut worst_eig) = (0.0f64, 0.0f64);
    for i in 0..2000 {
        let rank = 1 + i % 4;
        let rho = random_density(&mut rng, rank);
        let eps = rng.random_range(0.0..0.5);
        let outs = [
            apply_channel_exact(&rho, eps, rng.random(), rng.random()),
            two_kick_map_exact(&rho, eps, rng.random_range(-1.0..1.0)).unwrap(),
        ];
        for o in outs {
            worst_trace = worst_trace.max((o.trace().re - 1.0).abs());
            worst_eig = worst_eig.min(o.eigenvalues()[0]);
        }
    }
    pass &= worst_trace <= 1e-12 && worst_eig >= -1e-10;
    parts.push(format!("CPTP both channels: trace err {worst_trace:.1e}, min eig {worst_eig:.1e}"));

    let small = ModelParams::new(2.3, 8).unwrap().with_coupling(0.4).with_rotations(0.17, 0.29);
    let dense = dense_floquet(&small);
    let small_op = FloquetOperator::new(small).unwrap();
    let mut worst_dense = 0.0f64;
    for _ in 0..5 {
        let amps: Vec<C64> = (0..32).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<C64> = amps.iter().map(|z| z / norm).collect();
        let mut st = CompositeState::from_amplitudes(amps.clone(), 8, Representation::Momentum).unwrap();
        small_op.step(&mut st).unwrap();
        let expected = &dense * DVector::from_vec(amps);
        for (a, b) in st.amplitudes().iter().zip(expected.iter()) {
            worst_dense = worst_dense.max((a - b).norm());
        }
    }
    pass &= worst_dense <= 1e-10;
    parts.push(format!("dense oracle at N=8 {worst_dense:.1e} (<= 1e-10)"));

    let mut worst_bloch = 0.0f64;
    for i in 0..1000 {
        let rho = random_density(&mut rng, 1 + i % 4);
        let exact = apply_channel_exact(&rho, 1e-2, 0.0, 0.0);
        let approx = bloch_step(&BlochCoordinates::from_density(&rho), 1e-2, 0.0, 0.0).to_density();
        worst_bloch = worst_bloch.max(max_abs_diff(exact.matrix(), approx.matrix()));
    }
    pass &= worst_bloch <= 1e-6;
    parts.push(format!("Bloch vs exact at eps=1e-2 {worst_bloch:.1e} (<= 1e-6)"));

    outcome(pass, parts.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Markovian E12 decay law", criterion_1),
        ("S12 growth law", criterion_2),
        ("rate scaling Gamma ~ eps^2", criterion_3),
        ("full model converges with N", criterion_4),
        ("classical angular correlations", criterion_5),
        ("D3, D4 under correlated kicks", criterion_6),
        ("Gamma(K) oscillations", criterion_7),
        ("trajectories vs exact correlated map", criterion_8),
        ("entanglement never increases", criterion_9),
        ("structural invariants", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status} {name} [{:.1}s]: {}", i + 1, start.elapsed().as_secs_f64(), o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: {} of 10 fail: {failed:?}", failed.len());
        std::process::exit(1);
    }
}
