use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::alignment::{aggregate, ErrorStats};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 8] = ["experiment", "trial", "level", "method", "kind", "value", "converged", "notes"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorKind {
    Position,
    Distance,
    Angle,
    /// Mean point error after similarity alignment of a reconstruction.
    Aligned3d,
}

impl ErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Position => "position",
            ErrorKind::Distance => "distance",
            ErrorKind::Angle => "angle",
            ErrorKind::Aligned3d => "aligned-3d",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ErrorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [ErrorKind::Position, ErrorKind::Distance, ErrorKind::Angle, ErrorKind::Aligned3d]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown error kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub experiment: String,
    pub trial: u64,
    pub level: f64,
    pub method: String,
    pub kind: ErrorKind,
    /// NaN for failed trials.
    pub value: f64,
    pub converged: bool,
    pub notes: String,
}

impl TrialRecord {
    pub fn failed(&self) -> bool {
        !self.value.is_finite()
    }
}

/// Appends `extra` to a `;`-separated note list.
pub(crate) fn join_notes(notes: &mut String, extra: &str) {
    if extra.is_empty() {
        return;
    }
    if !notes.is_empty() {
        notes.push(';');
    }
    notes.push_str(extra);
}

pub fn sort_records(records: &mut [TrialRecord]) {
    records.sort_by(|a, b| {
        a.experiment
            .cmp(&b.experiment)
            .then(a.level.total_cmp(&b.level))
            .then(a.trial.cmp(&b.trial))
            .then(a.method.cmp(&b.method))
    });
}

/// Writes records in sorted order; values carry 17 significant digits.
pub fn write_csv_to<W: Write>(out: W, records: &[TrialRecord]) -> Result<()> {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let csv_err = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in &sorted {
        w.write_record([
            r.experiment.clone(),
            r.trial.to_string(),
            r.level.to_string(),
            r.method.clone(),
            r.kind.to_string(),
            format!("{:.16e}", r.value),
            r.converged.to_string(),
            r.notes.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("csv: {e}")))
}

pub fn write_csv(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    let mut buf = BufWriter::new(file);
    write_csv_to(&mut buf, records).map_err(|e| match e {
        Error::InvalidInput(m) => Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(m),
        },
        other => other,
    })?;
    buf.flush().map_err(io)
}

pub fn read_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    })?;
    let mut out = vec![];
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let fmt_err = |message: String| Error::Format {
            path: path.to_path_buf(),
            line,
            message,
        };
        let row = row.map_err(|e| fmt_err(e.to_string()))?;
        if row.len() != CSV_HEADER.len() {
            return Err(fmt_err(format!("expected {} fields", CSV_HEADER.len())));
        }
        let num = |k: usize| row[k].parse::<f64>().map_err(|_| fmt_err(format!("bad number {:?}", &row[k])));
        out.push(TrialRecord {
            experiment: row[0].to_string(),
            trial: row[1].parse().map_err(|_| fmt_err("bad trial".into()))?,
            level: num(2)?,
            method: row[3].to_string(),
            kind: row[4].parse().map_err(|e: Error| fmt_err(e.to_string()))?,
            value: num(5)?,
            converged: row[6].parse().map_err(|_| fmt_err("bad converged flag".into()))?,
            notes: row[7].to_string(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub experiment: String,
    pub level: f64,
    pub method: String,
    pub kind: ErrorKind,
    /// `None` when every trial failed.
    pub stats: Option<ErrorStats>,
    pub failures: usize,
}

/// Across-trial statistics per (experiment, level, method, kind); failed
/// trials are counted, not averaged.
pub fn summarize(records: &[TrialRecord]) -> Vec<Summary> {
    let mut groups: BTreeMap<(String, u64, String, ErrorKind), (f64, Vec<f64>, usize)> = BTreeMap::new();
    for r in records {
        // Levels are finite; the bit pattern of a non-negative float sorts like the value.
        let key = (r.experiment.clone(), r.level.to_bits(), r.method.clone(), r.kind);
        let g = groups.entry(key).or_insert((r.level, vec![], 0));
        if r.failed() {
            g.2 += 1;
        } else {
            g.1.push(r.value);
        }
    }
    groups
        .into_iter()
        .map(|((experiment, _, method, kind), (level, values, failures))| Summary {
            experiment,
            level,
            method,
            kind,
            stats: aggregate(&values).ok(),
            failures,
        })
        .collect()
}
