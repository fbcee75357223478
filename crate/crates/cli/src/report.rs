//! Output contract: the per-run CSV time series and the JSON summary.
//!
//! Both files are byte-deterministic for a given config: floats print with
//! the shortest round-trip representation, maps are ordered, and nothing
//! wall-clock-dependent is written (timing goes to stdout only).

use std::path::Path;

use serde::Serialize;

use crate::config::{MatrixLiteral, RunConfig};
use crate::error::{io_err, CliResult};

/// Fixed column set for every scenario that produces a time series.
pub const CSV_HEADER: &str = "t,expectation_S,expectation_P,r_quasi_herm,r_conj_consistency,\
r_metric_const,r_partner_const,r_metric_factorization,r_h_observability,theta_min_eig";

/// One output-grid point of a run.
#[derive(Clone, Debug)]
pub struct Row {
    pub t: f64,
    pub expectation_s: f64,
    pub expectation_p: f64,
    pub r_quasi_herm: f64,
    pub r_conj_consistency: f64,
    pub r_metric_const: f64,
    pub r_partner_const: f64,
    pub r_metric_factorization: f64,
    pub r_h_observability: f64,
    pub theta_min_eig: f64,
}

impl Row {
    fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.t,
            self.expectation_s,
            self.expectation_p,
            self.r_quasi_herm,
            self.r_conj_consistency,
            self.r_metric_const,
            self.r_partner_const,
            self.r_metric_factorization,
            self.r_h_observability,
            self.theta_min_eig
        )
    }
}

pub fn write_csv(path: &Path, rows: &[Row]) -> CliResult<()> {
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(CSV_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&row.to_line());
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| io_err(&format!("writing {}", path.display()), e))
}

/// One checked invariant: the worst residual observed against its threshold.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub name: String,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl InvariantReport {
    pub fn new(name: &str, max_residual: f64, threshold: f64) -> Self {
        InvariantReport {
            name: name.to_string(),
            max_residual,
            threshold,
            // NaN must fail, so compare for pass rather than for violation.
            pass: max_residual <= threshold,
        }
    }
}

/// An unthresholded diagnostic worth recording (drifts, conditioning).
#[derive(Clone, Debug, Serialize)]
pub struct Monitored {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub command: String,
    pub scenario: String,
    pub model_label: String,
    pub config: RunConfig,
    /// Eigenvalues of H(t₀) as `[re, im]` pairs, sorted by real part.
    pub eigenvalues_t0: Vec<[f64; 2]>,
    /// Metric matrix at t₀; included by the metric scenario only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_matrix: Option<MatrixLiteral>,
    pub invariants: Vec<InvariantReport>,
    pub monitored: Vec<Monitored>,
    pub rows_written: usize,
    pub overall_pass: bool,
}

impl Summary {
    pub fn failed(&self) -> usize {
        self.invariants.iter().filter(|inv| !inv.pass).count()
    }
}

pub fn write_summary(path: &Path, summary: &Summary) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(summary)
        .map_err(|e| crate::error::CliError::Io(format!("serializing summary: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_err(&format!("writing {}", path.display()), e))
}
