use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use chaosbath::experiments::{
    self, compare, read_series, write_csv, write_outputs, ExperimentConfig, FitWindow, Metric, Mode, SweepModel,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chaosbath", version, about = "Two qubits in a kicked-rotator environment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact Floquet evolution of qubits plus rotator
    Full(RunArgs),
    /// Markovian random phase-kick channel
    Phasekick(RunArgs),
    /// Second-order Bloch-vector map of the phase-kick channel
    Bloch(RunArgs),
    /// Quantum trajectories with correlated kick angles
    Trajectories(RunArgs),
    /// Exact evolution under correlated kick angles
    Twokick(RunArgs),
    /// Monte Carlo angular correlations of the classical standard map
    Correlations(RunArgs),
    /// Decay rate and entropy onset over an eps or K axis
    Sweep(RunArgs),
    /// Sup-norm and first exceedance between two series files
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML file of key = value pairs; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination (stdout if absent); the summary goes to <out>.summary.json
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "n-levels")]
    n_levels: Option<usize>,
    #[arg(long = "bigK")]
    chaos: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta2: Option<f64>,
    #[arg(long)]
    tmax: Option<usize>,
    #[arg(long = "measure-every")]
    measure_every: Option<usize>,
    /// Number of trajectories
    #[arg(long)]
    traj: Option<usize>,
    /// Monte Carlo samples per point (correlations)
    #[arg(long)]
    samples: Option<usize>,
    /// Inclusive kick window a:b for the rate fit
    #[arg(long = "fit-window")]
    fit_window: Option<FitWindow>,
    /// S12 level defining t_S
    #[arg(long)]
    threshold: Option<f64>,
    /// Comma-separated eps values (sweep)
    #[arg(long = "eps-list", value_delimiter = ',')]
    eps_list: Option<Vec<f64>>,
    /// Comma-separated K values (sweep, correlations)
    #[arg(long = "K-list", value_delimiter = ',')]
    k_list: Option<Vec<f64>>,
    /// Dynamics of each sweep point
    #[arg(long = "sweep-model")]
    sweep_model: Option<SweepModel>,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    /// E12 or S12
    #[arg(long, default_value = "S12")]
    metric: Metric,
    #[arg(long, default_value_t = 0.02)]
    threshold: f64,
}

impl RunArgs {
    fn into_config(self, mode: Mode) -> chaosbath::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        cfg.mode = mode;
        macro_rules! set {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = self.$flag { cfg.$field = v; })*
            };
        }
        set!(
            seed => seed,
            n_levels => n_levels,
            chaos => chaos,
            eps => epsilon,
            delta1 => delta1,
            delta2 => delta2,
            tmax => t_max,
            measure_every => measure_every,
            traj => trajectories,
            samples => samples,
            fit_window => fit_window,
            threshold => threshold,
            eps_list => eps_list,
            k_list => k_list,
        );
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if self.sweep_model.is_some() {
            cfg.sweep_model = self.sweep_model;
        }
        Ok(cfg)
    }
}

fn run_mode(args: RunArgs, mode: Mode) -> chaosbath::Result<()> {
    let cfg = args.into_config(mode)?;
    let out = experiments::run(&cfg)?;
    match &cfg.out {
        Some(path) => write_outputs(path, &cfg, &out),
        None => {
            let stdout = std::io::stdout();
            write_csv(stdout.lock(), &cfg, &out)?;
            eprintln!("{}", serde_json::to_string_pretty(&out.summary)?);
            Ok(())
        }
    }
}

fn run_compare(args: CompareArgs) -> chaosbath::Result<()> {
    let a = read_series(&args.a)?;
    let b = read_series(&args.b)?;
    let report = compare(&a, &b, args.metric, args.threshold)?;
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Full(a) => run_mode(a, Mode::Full),
        Command::Phasekick(a) => run_mode(a, Mode::PhaseKick),
        Command::Bloch(a) => run_mode(a, Mode::Bloch),
        Command::Trajectories(a) => run_mode(a, Mode::Trajectories),
        Command::Twokick(a) => run_mode(a, Mode::TwoKick),
        Command::Correlations(a) => run_mode(a, Mode::Correlations),
        Command::Sweep(a) => run_mode(a, Mode::Sweep),
        Command::Compare(a) => run_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
