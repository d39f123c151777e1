use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

use super::config::ExperimentConfig;
use super::run::RunOutput;
use crate::error::{Error, Result};
use crate::floquet::TimeSeriesRecord;

/// `foo.csv` → `foo.summary.json`.
pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}

/// `# key = value` lines for every config field (sorted), then the version.
pub fn header_lines(cfg: &ExperimentConfig) -> Result<Vec<String>> {
    let mut lines = vec![format!("# chaosbath {}", super::VERSION)];
    if let Value::Object(map) = serde_json::to_value(cfg)? {
        for (k, v) in map {
            let shown = match v {
                Value::String(s) => s,
                Value::Null => "none".into(),
                other => other.to_string(),
            };
            lines.push(format!("# {k} = {shown}"));
        }
    }
    Ok(lines)
}

/// Header block plus CSV body.
pub fn write_csv<W: Write>(out: W, cfg: &ExperimentConfig, run: &RunOutput) -> Result<()> {
    let mut out = out;
    for line in header_lines(cfg)? {
        writeln!(out, "{line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&run.columns)?;
    for row in &run.rows {
        w.write_record(row.iter().map(|c| c.render()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `path` and its `.summary.json` sibling.
pub fn write_outputs(path: &Path, cfg: &ExperimentConfig, run: &RunOutput) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_csv(BufWriter::new(File::create(path)?), cfg, run)?;
    let mut summary = BufWriter::new(File::create(summary_path(path))?);
    serde_json::to_writer_pretty(&mut summary, &run.summary)?;
    writeln!(summary)?;
    summary.flush()?;
    Ok(())
}

/// Reads a `t, E12, S12, D` file written by a series mode.
pub fn read_series(path: &Path) -> Result<Vec<TimeSeriesRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Configuration(format!("{}: missing column `{name}`", path.display()))
        })
    };
    let (t, e, s, d) = (col("t")?, col("E12")?, col("S12")?, col("D")?);
    let mut out = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| {
            rec.get(i).unwrap_or("").parse::<f64>().map_err(|_| {
                Error::Configuration(format!("{}: bad number in data row {}", path.display(), line + 1))
            })
        };
        out.push(TimeSeriesRecord {
            t: num(t)? as usize,
            e12: num(e)?,
            s12: num(s)?,
            coherence: num(d)?,
        });
    }
    Ok(out)
}
