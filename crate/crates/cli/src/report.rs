//! Run reports, rendered as aligned text or JSON.
//!
//! Reports carry no timing or host information, so identical invocations
//! produce byte-identical output; wall time goes to stderr.

use std::fmt::Write as _;

use epmod::{ComplexMatrix, NumericalContext};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    /// A mathematical check failed: a defect.
    Fail,
    /// A reported fact that is not a pass/fail claim.
    Info,
    /// A check whose hypotheses do not hold for this input.
    Skip,
}

impl Status {
    fn tag(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Info => "info",
            Status::Skip => "skip",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContextEcho {
    pub rank_rel_tol: f64,
    pub eq_tol: f64,
    pub gap_warn_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ContextEcho {
    pub fn new(ctx: &NumericalContext, seed: Option<u64>) -> Self {
        Self {
            rank_rel_tol: ctx.rank_rel_tol,
            eq_tol: ctx.eq_tol,
            gap_warn_ratio: ctx.gap_warn_ratio,
            seed,
        }
    }
}

/// A matrix echoed in the report, entries rounded to 12 significant digits.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixEcho {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixEcho {
    pub fn new(name: &str, m: &ComplexMatrix) -> Self {
        Self {
            name: name.to_owned(),
            rows: m.rows(),
            cols: m.cols(),
            entries: m
                .to_row_major()
                .iter()
                .map(|z| [round_sig(z.re), round_sig(z.im)])
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub context: ContextEcho,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<MatrixEcho>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub passed: bool,
}

impl RunReport {
    pub fn new(command: impl Into<String>, context: ContextEcho) -> Self {
        Self {
            command: command.into(),
            context,
            checks: Vec::new(),
            matrices: Vec::new(),
            notes: Vec::new(),
            passed: true,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, status: Status, value: Option<f64>, detail: impl Into<String>) {
        if status == Status::Fail {
            self.passed = false;
        }
        self.checks.push(Check {
            name: name.into(),
            status,
            value: value.map(round_sig),
            detail: detail.into(),
        });
    }

    /// Pass when `value <= tol`, fail otherwise.
    pub fn bound(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        let status = if value <= tol { Status::Pass } else { Status::Fail };
        self.push(name, status, Some(value), format!("tol {}", fmt_num(tol)));
    }

    pub fn claim(&mut self, name: impl Into<String>, holds: bool, detail: impl Into<String>) {
        let status = if holds { Status::Pass } else { Status::Fail };
        self.push(name, status, None, detail);
    }

    pub fn info(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.push(name, Status::Info, None, detail);
    }

    pub fn info_value(&mut self, name: impl Into<String>, value: f64) {
        self.push(name, Status::Info, Some(value), "");
    }

    pub fn skip(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.push(name, Status::Skip, None, detail);
    }

    pub fn matrix(&mut self, name: &str, m: &ComplexMatrix) {
        self.matrices.push(MatrixEcho::new(name, m));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let c = &self.context;
        let _ = writeln!(out, "epmod {}", self.command);
        let _ = write!(
            out,
            "context: rank_rel_tol={} eq_tol={} gap_warn_ratio={}",
            fmt_num(c.rank_rel_tol),
            fmt_num(c.eq_tol),
            fmt_num(c.gap_warn_ratio)
        );
        if let Some(seed) = c.seed {
            let _ = write!(out, " seed={seed}");
        }
        out.push('\n');
        let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
        for check in &self.checks {
            let _ = write!(out, "[{}] {:<width$}", check.status.tag(), check.name);
            if let Some(v) = check.value {
                let _ = write!(out, "  {}", fmt_num(v));
            }
            if !check.detail.is_empty() {
                let _ = write!(out, "  ({})", check.detail);
            }
            out.push('\n');
        }
        for m in &self.matrices {
            let _ = writeln!(out, "{} =", m.name);
            for r in 0..m.rows {
                let row: Vec<String> = (0..m.cols)
                    .map(|col| fmt_complex(m.entries[r * m.cols + col]))
                    .collect();
                let _ = writeln!(out, "  [{}]", row.join(", "));
            }
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        let _ = writeln!(
            out,
            "result: {} ({} checks, {} failed)",
            if self.passed { "PASS" } else { "FAIL" },
            self.checks.len(),
            self.failures()
        );
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// Rounds to 12 significant digits; zero and non-finite values pass through.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Shortest representation of the 12-significant-digit rounding.
pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e12) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn fmt_complex([re, im]: [f64; 2]) -> String {
    if im == 0.0 {
        fmt_num(re)
    } else if re == 0.0 {
        format!("{}i", fmt_num(im))
    } else {
        let sign = if im < 0.0 { '-' } else { '+' };
        format!("{}{}{}i", fmt_num(re), sign, fmt_num(im.abs()))
    }
}
