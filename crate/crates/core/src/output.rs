//! Tabular results and their CSV form.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::analysis::TheoryReport;
use crate::error::{Error, Result};
use crate::montecarlo::EstimateRow;

pub const CSV_HEADER: &str = "axis,value,engine,p_bd,p_esd,p_s,c_s_bps,ci_halfwidth,n_trials,elapsed_ms,diag";

/// One evaluated sweep point. Absent quantities print as empty fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub axis: String,
    pub value: f64,
    pub engine: String,
    pub p_bd: Option<f64>,
    pub p_esd: Option<f64>,
    pub p_s: Option<f64>,
    pub c_s_bps: Option<f64>,
    /// 95% half-width of `p_s` for Monte Carlo rows.
    pub ci_halfwidth: Option<f64>,
    pub n_trials: Option<u64>,
    pub elapsed_ms: Option<f64>,
    /// `key=value` pairs separated by `;`.
    pub diag: String,
}

impl ResultRow {
    pub fn new(axis: impl Into<String>, value: f64, engine: impl Into<String>) -> Self {
        ResultRow {
            axis: axis.into(),
            value,
            engine: engine.into(),
            p_bd: None,
            p_esd: None,
            p_s: None,
            c_s_bps: None,
            ci_halfwidth: None,
            n_trials: None,
            elapsed_ms: None,
            diag: String::new(),
        }
    }

    pub fn fill_theory(&mut self, r: &TheoryReport) {
        self.p_bd = Some(r.p_bd);
        self.p_esd = Some(r.p_esd);
        self.p_s = Some(r.p_s);
        self.c_s_bps = Some(r.c_s);
        self.diag = format!("c_bd={:e};c_esd={:e}", r.c_bd, r.c_esd);
    }

    pub fn fill_estimate(&mut self, e: &EstimateRow) {
        self.p_bd = Some(e.p_bd.value);
        self.p_esd = Some(e.p_esd.value);
        self.p_s = Some(e.p_s.value);
        self.c_s_bps = Some(e.c_s.value);
        self.ci_halfwidth = Some(e.p_s.half_width);
        self.n_trials = Some(e.n_trials);
        self.diag = format!(
            "c_bd={:e};c_esd={:e};c_s_ci={:e}",
            e.c_bd.value, e.c_esd.value, e.c_s.half_width
        );
    }

    pub fn set_error(&mut self, e: &Error) {
        let msg: String = e.to_string().chars().map(|c| if matches!(c, ',' | '\n' | '"') { ' ' } else { c }).collect();
        self.diag = format!("error={msg}");
    }

    pub fn is_error(&self) -> bool {
        self.diag.starts_with("error=")
    }

    /// One CSV line without the trailing newline. `timing` controls whether `elapsed_ms` is written.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut out = String::new();
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        let _ = write!(
            out,
            "{},{:e},{},{},{},{},{},{},{},{},{}",
            self.axis,
            self.value,
            self.engine,
            opt(self.p_bd),
            opt(self.p_esd),
            opt(self.p_s),
            opt(self.c_s_bps),
            opt(self.ci_halfwidth),
            self.n_trials.map(|n| n.to_string()).unwrap_or_default(),
            if timing { opt(self.elapsed_ms) } else { String::new() },
            self.diag,
        );
        out
    }
}

pub fn to_csv(rows: &[ResultRow], timing: bool) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv(timing));
        s.push('\n');
    }
    s
}

/// Writes the table to `path`, or to stdout when `path` is `None`.
pub fn emit_csv(rows: &[ResultRow], path: Option<&Path>, timing: bool) -> Result<()> {
    let text = to_csv(rows, timing);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}
