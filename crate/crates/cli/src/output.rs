use std::io::Write;
use std::path::Path;

use coneglow::{DetectionConfig, DetectionReport};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrialRow {
    pub trial_index: u64,
    pub samples_used: u64,
    pub confirmed: bool,
}

impl TrialRow {
    pub fn from_report(trial_index: u64, r: &DetectionReport) -> Self {
        Self { trial_index, samples_used: r.samples_used, confirmed: r.confirmed() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub confirmed: usize,
    pub total_samples: u64,
    pub min: u64,
    pub max: u64,
    pub mean: f64,
    pub median: f64,
}

impl Summary {
    pub fn of(rows: &[TrialRow]) -> Self {
        let mut counts: Vec<u64> = rows.iter().map(|r| r.samples_used).collect();
        counts.sort_unstable();
        let m = counts.len();
        let total: u64 = counts.iter().sum();
        let median = match m {
            0 => f64::NAN,
            _ if m % 2 == 1 => counts[m / 2] as f64,
            _ => 0.5 * (counts[m / 2 - 1] + counts[m / 2]) as f64,
        };
        Self {
            trials: m,
            confirmed: rows.iter().filter(|r| r.confirmed).count(),
            total_samples: total,
            min: counts.first().copied().unwrap_or(0),
            max: counts.last().copied().unwrap_or(0),
            mean: total as f64 / m.max(1) as f64,
            median,
        }
    }
}

/// CSV with `# key=value` header comments, one row per trial, and a summary
/// row with `trial_index = -1` whose `samples_used` is the total and whose
/// `confirmed` is 1 only if every trial was confirmed.
pub fn trials_csv(comments: &[(String, String)], rows: &[TrialRow]) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    for (k, v) in comments {
        writeln!(buf, "# {k}={v}").expect("writing to memory");
    }
    let summary = Summary::of(rows);
    let mut w = csv::Writer::from_writer(buf);
    let err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["trial_index", "samples_used", "confirmed", "min", "max", "mean", "median"]).map_err(err)?;
    for r in rows {
        w.write_record([
            r.trial_index.to_string(),
            r.samples_used.to_string(),
            u8::from(r.confirmed).to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ])
        .map_err(err)?;
    }
    w.write_record([
        "-1".to_string(),
        summary.total_samples.to_string(),
        u8::from(summary.confirmed == summary.trials).to_string(),
        summary.min.to_string(),
        summary.max.to_string(),
        summary.mean.to_string(),
        summary.median.to_string(),
    ])
    .map_err(err)?;
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn config_comments(command: &str, cfg: &DetectionConfig, trials: u64) -> Vec<(String, String)> {
    vec![
        ("command".into(), command.into()),
        ("seed".into(), cfg.seed.to_string()),
        ("box_radius".into(), cfg.box_radius.to_string()),
        ("max_samples".into(), cfg.max_samples.to_string()),
        ("gap_tol".into(), cfg.gap_tol.to_string()),
        ("trials".into(), trials.to_string()),
    ]
}

pub fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes to `out`, or to standard output when `out` is `None`.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}
