//! CSV output of aggregated regret tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use aim_core::{AggregatedTable, TableRow};
use thiserror::Error;

pub const HEADER: &str = "policy,t,mean_regret,stderr,runs";

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("refusing to write an empty table to {0}")]
    Empty(PathBuf),
}

/// Formats `x` with 9 significant digits, like C's `%.9g`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders the table, rows sorted by `(policy, t)`.
pub fn render_csv(table: &AggregatedTable) -> String {
    let mut rows: Vec<&TableRow> = table.rows.iter().collect();
    rows.sort_by(|a, b| a.policy.cmp(&b.policy).then(a.t.cmp(&b.t)));
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.policy,
            r.t,
            format_sig9(r.mean_regret),
            format_sig9(r.stderr),
            r.runs
        );
    }
    out
}

pub fn emit_csv(table: &AggregatedTable, path: &Path) -> Result<(), CsvError> {
    if table.rows.is_empty() {
        return Err(CsvError::Empty(path.to_path_buf()));
    }
    fs::write(path, render_csv(table)).map_err(|source| CsvError::Write { path: path.to_path_buf(), source })
}

pub fn parse_csv(text: &str) -> Result<AggregatedTable, CsvError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, HEADER)) => {}
        other => {
            return Err(CsvError::Malformed {
                line: 1,
                message: format!("expected header {HEADER:?}, got {:?}", other.map(|(_, l)| l)),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let bad = |message: String| CsvError::Malformed { line: i + 1, message };
        let fields: Vec<&str> = line.split(',').collect();
        let [policy, t, mean, stderr, runs] = fields[..] else {
            return Err(bad(format!("expected 5 fields, got {}", fields.len())));
        };
        rows.push(TableRow {
            policy: policy.to_string(),
            t: t.parse().map_err(|e| bad(format!("t: {e}")))?,
            mean_regret: mean.parse().map_err(|e| bad(format!("mean_regret: {e}")))?,
            stderr: stderr.parse().map_err(|e| bad(format!("stderr: {e}")))?,
            runs: runs.parse().map_err(|e| bad(format!("runs: {e}")))?,
        });
    }
    Ok(AggregatedTable { rows })
}

pub fn read_csv(path: &Path) -> Result<AggregatedTable, CsvError> {
    let text = fs::read_to_string(path).map_err(|source| CsvError::Read { path: path.to_path_buf(), source })?;
    parse_csv(&text)
}
