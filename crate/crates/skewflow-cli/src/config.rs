//! JSON configuration schema for the workbench.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use skewflow::{
    BaseProfile, CriterionFunction, DiagonalExponent, GridSpec, IntegralCriterionOptions,
    IntegrationMode,
};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub system: SystemConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projectors: Option<ProjectorConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Constants for `classify`; omitted means estimate-then-verify.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsConfig>,
    /// Growth-function f for `criterion-3-1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<CriterionFunction>,
    /// Center-bound g for `criterion-3-2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion_g: Option<CriterionFunction>,
    /// delta for the constant construction of `criterion-3-1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<CapsConfig>,
    pub command: Command,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Command {
    #[serde(rename = "verify-axioms")]
    VerifyAxioms,
    #[serde(rename = "classify")]
    Classify,
    #[serde(rename = "certify")]
    Certify,
    #[serde(rename = "criterion-3-1")]
    GrowthCriterion,
    #[serde(rename = "criterion-3-2")]
    IntegralCriterion,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub example: ExampleKind,
    #[serde(default = "default_profile")]
    pub profile: BaseProfile,
    /// Dimension for the plain translation example.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    /// Trichotomy example parameter; must exceed f(0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Diagonal exponents for `custom_diagonal`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<DiagonalExponent>>,
    /// Reproduce the trichotomy center component with its damping rate
    /// re-read from the evaluation state; breaks the composition law.
    #[serde(default)]
    pub literal_t0: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integration: Option<IntegrationMode>,
}

fn default_profile() -> BaseProfile {
    BaseProfile::unit_exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleKind {
    /// Translation semiflow with the plain exponential-of-integral cocycle.
    Ses,
    /// Dichotomic pair with exponents (-2, +3).
    Ued,
    /// Trichotomic triple with parameter mu.
    Uet,
    /// Arbitrary diagonal exponents.
    CustomDiagonal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProjectorConfig {
    /// Coordinate projectors from an index partition, one entry per family.
    Coordinate { partition: Vec<Vec<usize>> },
    /// Explicit constant matrices, row-major, one per family.
    Matrices { matrices: Vec<Vec<Vec<f64>>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_t0")]
    pub t0: Vec<f64>,
    #[serde(default = "default_dt")]
    pub dt: Vec<f64>,
    #[serde(default = "default_s_offsets")]
    pub s_offsets: Vec<f64>,
    #[serde(default = "default_shifts")]
    pub shifts: Vec<f64>,
    #[serde(default = "default_n_random_vectors")]
    pub n_random_vectors: usize,
}

fn default_t0() -> Vec<f64> {
    GridSpec::default().t0
}
fn default_dt() -> Vec<f64> {
    GridSpec::default().dt
}
fn default_s_offsets() -> Vec<f64> {
    GridSpec::default().s_offsets
}
fn default_shifts() -> Vec<f64> {
    GridSpec::default().shifts
}
fn default_n_random_vectors() -> usize {
    GridSpec::default().n_random_vectors
}

impl Default for GridConfig {
    fn default() -> Self {
        let spec = GridSpec::default();
        Self {
            t0: spec.t0,
            dt: spec.dt,
            s_offsets: spec.s_offsets,
            shifts: spec.shifts,
            n_random_vectors: spec.n_random_vectors,
        }
    }
}

impl GridConfig {
    pub fn to_spec(&self) -> GridSpec {
        GridSpec {
            t0: self.t0.clone(),
            dt: self.dt.clone(),
            s_offsets: self.s_offsets.clone(),
            shifts: self.shifts.clone(),
            n_random_vectors: self.n_random_vectors,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_closed_form_tol")]
    pub closed_form: f64,
    #[serde(default = "default_quadrature_tol")]
    pub quadrature: f64,
}

fn default_closed_form_tol() -> f64 {
    1e-9
}
fn default_quadrature_tol() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            closed_form: default_closed_form_tol(),
            quadrature: default_quadrature_tol(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub n: Vec<f64>,
    pub nu: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsConfig {
    #[serde(default = "default_gain_cap")]
    pub n_cap: f64,
    #[serde(default = "default_gain_cap")]
    pub m_cap: f64,
    #[serde(default = "default_panels")]
    pub panels_per_unit: usize,
}

fn default_gain_cap() -> f64 {
    1e6
}
fn default_panels() -> usize {
    64
}

impl Default for CapsConfig {
    fn default() -> Self {
        Self {
            n_cap: default_gain_cap(),
            m_cap: default_gain_cap(),
            panels_per_unit: default_panels(),
        }
    }
}

impl CapsConfig {
    pub fn to_options(self) -> IntegralCriterionOptions {
        IntegralCriterionOptions {
            panels_per_unit: self.panels_per_unit,
            sup_gain_cap: self.n_cap,
            integral_gain_cap: self.m_cap,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot_data: Option<PathBuf>,
}

impl AnalysisConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: AnalysisConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("{e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let sys = &self.system;
        sys.profile
            .validate()
            .map_err(|e| CliError::Config(format!("system.profile: {e}")))?;
        match sys.example {
            ExampleKind::Ses => {}
            ExampleKind::Ued => {}
            ExampleKind::Uet => {
                let mu = sys.mu.unwrap_or(3.0);
                let f0 = sys.profile.value(0.0);
                if !(mu > f0) {
                    return Err(CliError::Config(format!(
                        "system.mu: trichotomy example requires mu > f(0) = {f0}, got {mu}"
                    )));
                }
            }
            ExampleKind::CustomDiagonal => {
                let exps = sys.exponents.as_deref().unwrap_or(&[]);
                if exps.is_empty() {
                    return Err(CliError::Config(
                        "system.exponents: custom_diagonal needs at least one exponent".into(),
                    ));
                }
            }
        }
        if let Some(constants) = &self.constants {
            if constants.n.len() != constants.nu.len() || constants.n.is_empty() {
                return Err(CliError::Config(
                    "constants: n and nu must be nonempty lists of equal length".into(),
                ));
            }
        }
        match self.command {
            Command::GrowthCriterion if self.criterion.is_none() => {
                return Err(CliError::Config(
                    "criterion: required for command criterion-3-1".into(),
                ));
            }
            Command::IntegralCriterion if self.criterion_g.is_none() => {
                return Err(CliError::Config(
                    "criterion_g: required for command criterion-3-2".into(),
                ));
            }
            _ => {}
        }
        if self.grid.t0.is_empty()
            || self.grid.dt.is_empty()
            || self.grid.s_offsets.is_empty()
            || self.grid.shifts.is_empty()
        {
            return Err(CliError::Config(
                "grid: all axis lists must be nonempty".into(),
            ));
        }
        Ok(())
    }
}
