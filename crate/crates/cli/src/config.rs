//! Run configuration: one strict JSON document per run.
//!
//! Unknown keys are rejected everywhere and tolerance names are validated
//! against the known set, so a typo fails loudly instead of silently running
//! with a default. The parsed struct serializes back field-for-field, which
//! is what the summary's config echo relies on.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use nhh_core::{
    preset_observable, ComplexMatrix, DysonMode, ModelInstance, ModelKind, ModelSpec, Observable,
};

use crate::error::{config_err, io_err, CliError, CliResult};

/// Complex matrix literal: rows of `[re, im]` pairs.
pub type MatrixLiteral = Vec<Vec<[f64; 2]>>;

/// What a run computes. `run` dispatches on this; the `verify` and
/// `spectrum` subcommands force the corresponding value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Eigenvalues of H(t₀) only; never builds a metric, so it also works in
    /// the broken phase.
    Spectrum,
    /// Metric, Dyson map, and their residuals at t₀.
    Metric,
    /// Closed-form evolution of a time-independent Hamiltonian.
    Stationary,
    /// ODE evolution of map, metric, and operator pair (drives allowed).
    General,
    /// The full invariant battery for the configured model.
    Verify,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Spectrum => "spectrum",
            Scenario::Metric => "metric",
            Scenario::Stationary => "stationary",
            Scenario::General => "general",
            Scenario::Verify => "verify",
        }
    }
}

/// Factorization gauge for Θ = Ω†Ω, mirroring the library's `DysonMode`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DysonModeConfig {
    #[default]
    PositiveRoot,
    Triangular,
}

impl DysonModeConfig {
    pub fn to_core(self) -> DysonMode {
        match self {
            DysonModeConfig::PositiveRoot => DysonMode::PositiveRoot,
            DysonModeConfig::Triangular => DysonMode::Triangular,
        }
    }
}

/// Model families understood by the config schema.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKindConfig {
    PtTwoLevel,
    AsymChain,
    DrivenPt,
    CustomMatrix,
}

impl ModelKindConfig {
    fn to_core(self) -> ModelKind {
        match self {
            ModelKindConfig::PtTwoLevel => ModelKind::PtTwoLevel,
            ModelKindConfig::AsymChain => ModelKind::AsymChain,
            ModelKindConfig::DrivenPt => ModelKind::DrivenPt,
            ModelKindConfig::CustomMatrix => ModelKind::CustomMatrix,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKindConfig,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Hilbert-space dimension; defaults to 2 for the two-level families and
    /// to the literal's size for `custom_matrix`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Explicit Hamiltonian for `custom_matrix` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixLiteral>,
}

/// Observable 𝔞 in the physical space: a preset name or a Hermitian matrix
/// literal.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableConfig {
    Preset(String),
    Matrix(MatrixLiteral),
}

impl Default for ObservableConfig {
    fn default() -> Self {
        ObservableConfig::Preset("sigma_z".into())
    }
}

fn default_t_end() -> f64 {
    2.0
}

fn default_grid_step() -> f64 {
    0.01
}

fn default_dt() -> f64 {
    1e-3
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub scenario: Scenario,
    #[serde(default)]
    pub t0: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_grid_step")]
    pub output_grid_step: f64,
    #[serde(default = "default_dt")]
    pub integrator_dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric_weights: Option<Vec<f64>>,
    #[serde(default)]
    pub dyson_mode: DysonModeConfig,
    #[serde(default)]
    pub observable: ObservableConfig,
    /// Named threshold overrides; names outside `KNOWN_TOLERANCES` are
    /// config errors.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Seed for every randomized piece of a run (states, pair batches).
    #[serde(default)]
    pub seed: u64,
    /// Output stem; the run writes `<stem>.csv` and `<stem>.summary.json`.
    /// Relative stems are rooted at NHH_OUTPUT_DIR when that is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

/// Every tolerance name a config may set.
pub const KNOWN_TOLERANCES: &[&str] = &[
    "bracket_conservation",
    "closed_form",
    "conj_consistency",
    "coriolis_consistency",
    "cross_picture",
    "expectation_constancy",
    "expectation_tracking",
    "factorization",
    "generator_norm",
    "h_observability",
    "metric_const",
    "metric_factorization",
    "metric_hermiticity",
    "metric_positivity",
    "partner_const",
    "partner_hermiticity",
    "quasi_herm",
    "spectrum_constancy",
];

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| io_err(&format!("reading {}", path.display()), e))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    /// Structural checks that don't need the model built.
    pub fn validate(&self) -> CliResult<()> {
        if !(self.t_end > self.t0) {
            return Err(CliError::Config(format!(
                "t_end ({}) must exceed t0 ({})",
                self.t_end, self.t0
            )));
        }
        if !(self.output_grid_step > 0.0) || !self.output_grid_step.is_finite() {
            return Err(CliError::Config(format!(
                "output_grid_step must be positive and finite, got {}",
                self.output_grid_step
            )));
        }
        if !(self.integrator_dt > 0.0) || !self.integrator_dt.is_finite() {
            return Err(CliError::Config(format!(
                "integrator_dt must be positive and finite, got {}",
                self.integrator_dt
            )));
        }
        if self.integrator_dt > self.output_grid_step {
            return Err(CliError::Config(format!(
                "integrator_dt ({}) must not exceed output_grid_step ({})",
                self.integrator_dt, self.output_grid_step
            )));
        }
        if let Some(weights) = &self.metric_weights {
            if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
                return Err(CliError::Config(
                    "metric_weights must all be positive and finite".into(),
                ));
            }
        }
        for (name, value) in &self.tolerances {
            if !KNOWN_TOLERANCES.contains(&name.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown tolerance `{name}`; known names: {}",
                    KNOWN_TOLERANCES.join(", ")
                )));
            }
            if !value.is_finite() || *value < 0.0 {
                return Err(CliError::Config(format!(
                    "tolerance `{name}` must be finite and non-negative, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Builds the model, mapping construction failures to config errors —
    /// they are always caused by the `model` block.
    pub fn build_model(&self) -> CliResult<ModelInstance> {
        let dim = self.resolved_dim()?;
        let custom = match &self.model.matrix {
            Some(lit) => Some(literal_to_matrix(lit, "model.matrix")?),
            None => None,
        };
        let spec = ModelSpec {
            kind: self.model.kind.to_core(),
            params: self.model.params.clone(),
            dim,
            custom,
        };
        spec.build().map_err(|e| config_err("model", e))
    }

    pub fn resolved_dim(&self) -> CliResult<usize> {
        match (self.model.kind, self.model.dim) {
            (_, Some(d)) if d >= 2 => Ok(d),
            (_, Some(d)) => Err(CliError::Config(format!(
                "model.dim must be at least 2, got {d}"
            ))),
            (ModelKindConfig::PtTwoLevel | ModelKindConfig::DrivenPt, None) => Ok(2),
            (ModelKindConfig::CustomMatrix, None) => match &self.model.matrix {
                Some(rows) => Ok(rows.len()),
                None => Err(CliError::Config(
                    "model.matrix is required for custom_matrix".into(),
                )),
            },
            (ModelKindConfig::AsymChain, None) => Err(CliError::Config(
                "model.dim is required for asym_chain".into(),
            )),
        }
    }

    /// P-space observable 𝔞 from the `observable` field.
    pub fn observable(&self, dim: usize) -> CliResult<Observable> {
        match &self.observable {
            ObservableConfig::Preset(name) => {
                preset_observable(name, dim).map_err(|e| config_err("observable", e))
            }
            ObservableConfig::Matrix(lit) => {
                let m = literal_to_matrix(lit, "observable")?;
                Observable::p_space(m).map_err(|e| config_err("observable", e))
            }
        }
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.metric_weights.as_deref()
    }

    /// Effective thresholds for this run: scenario defaults overlaid with
    /// any configured overrides. An override only takes effect for a
    /// residual the scenario actually measures — setting `closed_form` on a
    /// driven run, where no closed form exists, is silently inert rather
    /// than a spurious failure.
    pub fn thresholds(&self, driven: bool) -> BTreeMap<String, f64> {
        let mut map: BTreeMap<String, f64> = default_checks(self.scenario, driven)
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        let measured = measured_names(self.scenario, driven);
        for (name, value) in &self.tolerances {
            if measured.contains(&name.as_str()) {
                map.insert(name.clone(), *value);
            }
        }
        map
    }
}

/// Which residuals a scenario computes at all. Overrides outside this set
/// are ignored; names inside it but outside the defaults promote a
/// monitored-only residual to a checked one.
fn measured_names(scenario: Scenario, driven: bool) -> &'static [&'static str] {
    // Every scenario with a time series measures the t₀ construction block
    // plus the row columns (h_observability is t₀-scoped; see the runner).
    const TIME_SERIES: &[&str] = &[
        "metric_hermiticity",
        "metric_positivity",
        "h_observability",
        "factorization",
        "quasi_herm",
        "conj_consistency",
        "metric_const",
        "partner_const",
        "metric_factorization",
    ];
    // The driven battery has no closed form to compare against, no constant
    // Hermitian partner, and no conserved per-observable expectation.
    const VERIFY_DRIVEN: &[&str] = &[
        "metric_hermiticity",
        "metric_positivity",
        "h_observability",
        "factorization",
        "quasi_herm",
        "conj_consistency",
        "metric_const",
        "partner_const",
        "metric_factorization",
        "cross_picture",
        "expectation_tracking",
        "spectrum_constancy",
        "coriolis_consistency",
        "generator_norm",
        "bracket_conservation",
    ];
    match (scenario, driven) {
        (Scenario::Spectrum, _) => &[],
        (Scenario::Verify, false) => KNOWN_TOLERANCES,
        (Scenario::Verify, true) => VERIFY_DRIVEN,
        _ => TIME_SERIES,
    }
}

/// Default checked invariants per scenario. Driven models relax the checks
/// whose closed-form oracles only exist for stationary flows.
fn default_checks(scenario: Scenario, driven: bool) -> &'static [(&'static str, f64)] {
    const METRIC_T0: &[(&str, f64)] = &[
        ("metric_hermiticity", 1e-12),
        ("metric_positivity", 0.0),
        ("h_observability", 1e-10),
        ("factorization", 1e-10),
    ];
    const STATIONARY: &[(&str, f64)] = &[
        ("quasi_herm", 1e-6),
        ("conj_consistency", 1e-6),
        ("metric_const", 1e-8),
        ("partner_const", 1e-8),
        ("metric_factorization", 1e-6),
    ];
    const GENERAL: &[(&str, f64)] = &[
        ("quasi_herm", 1e-6),
        ("conj_consistency", 1e-6),
        ("metric_factorization", 1e-6),
    ];
    const VERIFY_STATIC: &[(&str, f64)] = &[
        ("metric_hermiticity", 1e-12),
        ("metric_positivity", 0.0),
        ("h_observability", 1e-10),
        ("factorization", 1e-10),
        ("quasi_herm", 1e-6),
        ("conj_consistency", 1e-6),
        ("metric_const", 1e-8),
        ("partner_const", 1e-8),
        ("partner_hermiticity", 1e-9),
        ("metric_factorization", 1e-6),
        ("closed_form", 1e-7),
        ("cross_picture", 1e-9),
        ("expectation_tracking", 1e-8),
        ("expectation_constancy", 1e-6),
        ("spectrum_constancy", 1e-9),
        ("coriolis_consistency", 1e-5),
        ("generator_norm", 1e-5),
        ("bracket_conservation", 1e-8),
    ];
    const VERIFY_DRIVEN: &[(&str, f64)] = &[
        ("metric_hermiticity", 1e-12),
        ("metric_positivity", 0.0),
        ("h_observability", 1e-10),
        ("factorization", 1e-10),
        ("quasi_herm", 1e-6),
        ("conj_consistency", 1e-6),
        ("metric_factorization", 1e-6),
        ("cross_picture", 1e-9),
        ("expectation_tracking", 1e-6),
        ("spectrum_constancy", 1e-6),
        ("coriolis_consistency", 1e-5),
        ("generator_norm", 1e-5),
        ("bracket_conservation", 1e-8),
    ];
    match (scenario, driven) {
        (Scenario::Spectrum, _) => &[],
        (Scenario::Metric, _) => METRIC_T0,
        (Scenario::Stationary, _) => STATIONARY,
        (Scenario::General, _) => GENERAL,
        (Scenario::Verify, false) => VERIFY_STATIC,
        (Scenario::Verify, true) => VERIFY_DRIVEN,
    }
}

pub fn literal_to_matrix(lit: &MatrixLiteral, field: &str) -> CliResult<ComplexMatrix> {
    let rows: Vec<Vec<Complex64>> = lit
        .iter()
        .map(|row| {
            row.iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect()
        })
        .collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| config_err(field, e))
}

pub fn matrix_to_literal(m: &ComplexMatrix) -> MatrixLiteral {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| {
                    let z = m.get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}
