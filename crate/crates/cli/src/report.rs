//! Reports and their JSON and CSV encodings.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub verdict: bool,
    /// Space-separated `key=value` fields.
    pub detail: String,
}

impl TrialRecord {
    pub fn field(&self, key: &str) -> Option<&str> {
        self.detail
            .split(' ')
            .find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
    }
}

/// A frequency with its 99% Clopper–Pearson halfwidth. Zero trials give a
/// zero rate and halfwidth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub hits: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_halfwidth: f64,
}

impl Rate {
    pub fn from_counts(hits: u64, trials: u64) -> Result<Rate, CliError> {
        if trials == 0 {
            return Ok(Rate { hits, trials, rate: 0.0, ci_halfwidth: 0.0 });
        }
        Ok(Rate {
            hits,
            trials,
            rate: hits as f64 / trials as f64,
            ci_halfwidth: grouplab::stats::halfwidth(hits, trials, grouplab::stats::CONFIDENCE)?,
        })
    }

    pub fn count<T>(items: &[T], pred: impl Fn(&T) -> bool) -> Result<Rate, CliError> {
        Rate::from_counts(items.iter().filter(|t| pred(t)).count() as u64, items.len() as u64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Aggregate {
    /// Fraction of trials whose verdict is true.
    SuccessRate(Rate),
    /// Relation pass rates against the cipher (the verdicts) and against a
    /// random permutation (`random=` in each detail).
    Distinguisher { cipher: Rate, random: Rate },
    /// Output-1 rates in the real world (the verdicts) and the ideal world
    /// (`ideal=` in each detail).
    Advantage {
        real: Rate,
        ideal: Rate,
        measured: f64,
        ci_halfwidth: f64,
        within_bound: bool,
    },
    /// `badg=` and `bad=` in each detail; a verdict is true if either fired.
    BadEvents {
        badg: Rate,
        bad: Rate,
        badg_within_bound: bool,
        bad_within_bound: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub name: String,
    /// Exact rational, `p/q`.
    pub exact: String,
    pub value: f64,
}

impl BoundValue {
    pub fn new(name: impl Into<String>, r: &num_rational::BigRational) -> Self {
        BoundValue {
            name: name.into(),
            exact: r.to_string(),
            value: grouplab::games::bounds::approx(r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialRecord>,
    pub aggregate: Aggregate,
    pub bound: Vec<BoundValue>,
    pub duration_ms: u64,
}

pub fn to_json(r: &Report) -> Result<String, CliError> {
    serde_json::to_string_pretty(r).map_err(|e| CliError::Encode(e.to_string()))
}

pub fn from_json(s: &str) -> Result<Report, CliError> {
    serde_json::from_str(s).map_err(|e| CliError::Encode(e.to_string()))
}

/// Header `trial,verdict,detail`, one row per trial, then `# key=value`
/// trailer lines carrying the config, aggregate, bounds and duration as
/// JSON.
pub fn write_csv(r: &Report, out: impl Write) -> Result<(), CliError> {
    let enc = |e: &dyn std::fmt::Display| CliError::Encode(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "verdict", "detail"]).map_err(|e| enc(&e))?;
    for t in &r.trials {
        w.write_record([t.trial.to_string(), t.verdict.to_string(), t.detail.clone()])
            .map_err(|e| enc(&e))?;
    }
    let mut out = w.into_inner().map_err(|e| enc(&e))?;
    let trailer = [
        ("config", serde_json::to_string(&r.config)),
        ("aggregate", serde_json::to_string(&r.aggregate)),
        ("bound", serde_json::to_string(&r.bound)),
        ("duration_ms", serde_json::to_string(&r.duration_ms)),
    ];
    for (k, v) in trailer {
        writeln!(out, "# {k}={}", v.map_err(|e| enc(&e))?).map_err(|e| enc(&e))?;
    }
    Ok(())
}

/// Writes `r` to `path`, or to stdout when there is none.
pub fn emit_report(r: &Report, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let io_err = |source: io::Error| CliError::Io {
        path: path.map_or_else(|| "<stdout>".into(), Path::to_path_buf),
        source,
    };
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p).map_err(io_err)?)),
        None => Box::new(io::stdout().lock()),
    };
    match format {
        Format::Json => writeln!(sink, "{}", to_json(r)?).map_err(io_err)?,
        Format::Csv => write_csv(r, &mut sink)?,
    }
    sink.flush().map_err(io_err)
}
