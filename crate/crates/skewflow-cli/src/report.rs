//! The analysis report and the plot-data CSV.

use serde::{Deserialize, Serialize};

use skewflow::{AxiomReport, CriterionReport, RateEstimate, SpectralCertificate};

use crate::config::{AnalysisConfig, Command};

/// Constants extracted by a criterion construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub gains: Vec<f64>,
    pub rates: Vec<f64>,
    pub delta: f64,
}

/// Deterministic, round-trip-stable analysis report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub version: String,
    pub command: Command,
    pub seed: u64,
    pub passed: bool,
    /// Echo of the effective configuration (after any seed override).
    pub config: AnalysisConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub axioms: Vec<AxiomReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SpectralCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<RateEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<CriterionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived_constants: Option<DerivedConstants>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn new(config: AnalysisConfig) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: config.command,
            seed: config.seed,
            passed: false,
            config,
            axioms: Vec::new(),
            certificate: None,
            estimate: None,
            criterion: None,
            derived_constants: None,
            notes: Vec::new(),
        }
    }

    /// Pretty JSON with a trailing newline; the canonical on-disk form.
    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

/// One plot-data record: the projected trajectory norm at (t, t0, x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotRow {
    pub t: f64,
    pub s: f64,
    pub t0: f64,
    pub x_shift: f64,
    pub component: usize,
    pub norm: f64,
    pub log_norm: f64,
}

/// Render rows as CSV with the fixed header
/// `t,s,t0,x_shift,component,norm,log_norm`.
pub fn plot_csv(rows: &[PlotRow]) -> String {
    let mut out = String::from("t,s,t0,x_shift,component,norm,log_norm\n");
    for row in rows {
        let log_norm = if row.norm == 0.0 {
            "-inf".to_string()
        } else {
            format!("{}", row.log_norm)
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.t, row.s, row.t0, row.x_shift, row.component, row.norm, log_norm
        ));
    }
    out
}
