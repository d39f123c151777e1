use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    PhaseKick,
    Bloch,
    Trajectories,
    TwoKick,
    Correlations,
    Sweep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::PhaseKick => "phasekick",
            Mode::Bloch => "bloch",
            Mode::Trajectories => "trajectories",
            Mode::TwoKick => "twokick",
            Mode::Correlations => "correlations",
            Mode::Sweep => "sweep",
        }
    }

    /// Modes that produce a `t, E12, S12, D` time series.
    pub fn is_series(self) -> bool {
        !matches!(self, Mode::Correlations | Mode::Sweep)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "full" => Mode::Full,
            "phasekick" => Mode::PhaseKick,
            "bloch" => Mode::Bloch,
            "trajectories" => Mode::Trajectories,
            "twokick" => Mode::TwoKick,
            "correlations" => Mode::Correlations,
            "sweep" => Mode::Sweep,
            other => {
                return Err(Error::Config {
                    field: "mode".into(),
                    reason: format!("unknown mode `{other}`"),
                })
            }
        })
    }
}

/// Inclusive kick window `a:b` for rate fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FitWindow {
    pub start: usize,
    pub end: usize,
}

impl FitWindow {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start >= end {
            return Err(Error::Config {
                field: "fit_window".into(),
                reason: format!("start {start} must be below end {end}"),
            });
        }
        Ok(Self { start, end })
    }

    pub fn bounds(self) -> (usize, usize) {
        (self.start, self.end)
    }
}

impl FromStr for FitWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config {
            field: "fit_window".into(),
            reason: format!("expected `a:b` with integers a < b, got `{s}`"),
        };
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let a = a.trim().parse().map_err(|_| bad())?;
        let b = b.trim().parse().map_err(|_| bad())?;
        Self::new(a, b)
    }
}

impl TryFrom<String> for FitWindow {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FitWindow> for String {
    fn from(w: FitWindow) -> String {
        w.to_string()
    }
}

impl fmt::Display for FitWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

/// Dynamics used for each point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepModel {
    Full,
    PhaseKick,
    Bloch,
    Trajectories,
    TwoKick,
}

impl SweepModel {
    pub fn mode(self) -> Mode {
        match self {
            SweepModel::Full => Mode::Full,
            SweepModel::PhaseKick => Mode::PhaseKick,
            SweepModel::Bloch => Mode::Bloch,
            SweepModel::Trajectories => Mode::Trajectories,
            SweepModel::TwoKick => Mode::TwoKick,
        }
    }
}

impl FromStr for SweepModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<Mode>()? {
            Mode::Full => Ok(SweepModel::Full),
            Mode::PhaseKick => Ok(SweepModel::PhaseKick),
            Mode::Bloch => Ok(SweepModel::Bloch),
            Mode::Trajectories => Ok(SweepModel::Trajectories),
            Mode::TwoKick => Ok(SweepModel::TwoKick),
            other => Err(Error::Config {
                field: "sweep_model".into(),
                reason: format!("`{other}` does not produce a time series"),
            }),
        }
    }
}

/// Every knob of a run. Loaded from a TOML file of key-value pairs; unknown
/// keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n_levels: usize,
    #[serde(rename = "K", alias = "bigK")]
    pub chaos: f64,
    #[serde(rename = "eps")]
    pub epsilon: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub seed: u64,
    pub t_max: usize,
    pub measure_every: usize,
    pub trajectories: usize,
    /// Monte Carlo samples per point in `correlations` mode.
    pub samples: usize,
    pub fit_window: FitWindow,
    /// `S₁₂` level defining the onset time `t_S`.
    pub threshold: f64,
    pub eps_list: Vec<f64>,
    #[serde(rename = "K_list", alias = "k_list")]
    pub k_list: Vec<f64>,
    pub sweep_model: Option<SweepModel>,
    /// Where the CSV goes; not echoed into headers so moved files stay
    /// byte-identical.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_CHAOS: f64 = 99.72676;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Full,
            n_levels: 1 << 10,
            chaos: DEFAULT_CHAOS,
            epsilon: 8e-3,
            delta1: 1e-2,
            delta2: 2f64.sqrt() * 1e-2,
            seed: 1,
            t_max: 300,
            measure_every: 1,
            trajectories: 5000,
            samples: 1_000_000,
            fit_window: FitWindow { start: 0, end: 20 },
            threshold: 0.002,
            eps_list: Vec::new(),
            k_list: Vec::new(),
            sweep_model: None,
            out: None,
        }
    }
}

fn field_error(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Configuration(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Configuration(format!("{}: {e}", path.display())))
    }

    /// Sweep dynamics: explicit choice, else phase-kick for an ε axis and the
    /// memory chain for a K axis.
    pub fn effective_sweep_model(&self) -> SweepModel {
        self.sweep_model.unwrap_or(if self.k_list.is_empty() {
            SweepModel::PhaseKick
        } else {
            SweepModel::TwoKick
        })
    }

    /// Checks the fields the selected mode reads.
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(field_error(name, format!("must be finite, got {v}")))
            }
        };
        finite("eps", self.epsilon)?;
        finite("delta1", self.delta1)?;
        finite("delta2", self.delta2)?;
        finite("K", self.chaos)?;
        if self.epsilon < 0.0 {
            return Err(field_error("eps", format!("must be non-negative, got {}", self.epsilon)));
        }
        if !(self.threshold > 0.0) {
            return Err(field_error("threshold", format!("must be positive, got {}", self.threshold)));
        }
        if self.measure_every == 0 {
            return Err(field_error("measure_every", "must be at least 1"));
        }
        if self.fit_window.start >= self.fit_window.end {
            return Err(field_error("fit_window", "start must be below end"));
        }

        let series_mode = match self.mode {
            Mode::Sweep => self.effective_sweep_model().mode(),
            m => m,
        };
        if series_mode.is_series() && self.t_max == 0 {
            return Err(field_error("t_max", "must be at least 1"));
        }
        if series_mode == Mode::Full && (self.n_levels < 2 || !self.n_levels.is_power_of_two()) {
            return Err(field_error(
                "n_levels",
                format!("must be a power of two >= 2, got {}", self.n_levels),
            ));
        }
        if matches!(series_mode, Mode::Full | Mode::Trajectories | Mode::TwoKick | Mode::Correlations)
            && !(self.chaos > 0.0)
        {
            return Err(field_error("K", format!("must be positive, got {}", self.chaos)));
        }
        if series_mode == Mode::Trajectories && self.trajectories == 0 {
            return Err(field_error("trajectories", "must be at least 1"));
        }
        if self.mode == Mode::Correlations && self.samples < crate::chirikov::MIN_SAMPLES {
            return Err(field_error(
                "samples",
                format!("must be at least {}, got {}", crate::chirikov::MIN_SAMPLES, self.samples),
            ));
        }
        if self.k_list.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return Err(field_error("K_list", "entries must be positive and finite"));
        }
        if self.eps_list.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(field_error("eps_list", "entries must be non-negative and finite"));
        }
        if self.mode == Mode::Sweep {
            match (self.eps_list.is_empty(), self.k_list.is_empty()) {
                (true, true) => return Err(field_error("eps_list", "sweep needs eps_list or K_list")),
                (false, false) => return Err(field_error("K_list", "sweep takes eps_list or K_list, not both")),
                _ => {}
            }
            if !self.eps_list.is_empty() && self.eps_list.iter().any(|e| *e <= 0.0) {
                return Err(field_error("eps_list", "entries must be positive for rate fits"));
            }
        }
        Ok(())
    }
}
