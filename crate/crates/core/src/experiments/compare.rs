use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::floquet::TimeSeriesRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Metric {
    E12,
    S12,
}

impl Metric {
    fn of(self, r: &TimeSeriesRecord) -> f64 {
        match self {
            Metric::E12 => r.e12,
            Metric::S12 => r.s12,
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "E12" => Ok(Metric::E12),
            "S12" => Ok(Metric::S12),
            _ => Err(Error::Config {
                field: "metric".into(),
                reason: format!("expected E12 or S12, got `{s}`"),
            }),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::E12 => "E12",
            Metric::S12 => "S12",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareReport {
    pub metric: Metric,
    pub threshold: f64,
    pub sup_norm: f64,
    /// Time of the sup-norm.
    pub sup_at: usize,
    /// First `t` with `|a - b| > threshold`.
    pub first_exceedance: Option<usize>,
}

/// Pointwise comparison of two series on the same time grid.
pub fn compare(a: &[TimeSeriesRecord], b: &[TimeSeriesRecord], metric: Metric, threshold: f64) -> Result<CompareReport> {
    if a.len() != b.len() {
        return Err(Error::MisalignedGrids(format!("{} vs {} records", a.len(), b.len())));
    }
    if let Some((x, y)) = a.iter().zip(b).find(|(x, y)| x.t != y.t) {
        return Err(Error::MisalignedGrids(format!("t = {} vs t = {}", x.t, y.t)));
    }
    let mut report = CompareReport {
        metric,
        threshold,
        sup_norm: 0.0,
        sup_at: a.first().map_or(0, |r| r.t),
        first_exceedance: None,
    };
    for (x, y) in a.iter().zip(b) {
        let d = (metric.of(x) - metric.of(y)).abs();
        if d > report.sup_norm {
            report.sup_norm = d;
            report.sup_at = x.t;
        }
        if d > threshold && report.first_exceedance.is_none() {
            report.first_exceedance = Some(x.t);
        }
    }
    Ok(report)
}
