//! Core dynamics: evolution semiflows, evolution cocycles, skew-evolution
//! systems, and sampling-based checks of their defining axioms.
//!
//! The axioms are universally quantified, so they are verified on sampled
//! grids and reported as max residuals; identity axioms hold exactly for the
//! built-in translation systems.

use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Result, SkewflowError};
use crate::exec::sweep_map;
use crate::grid::{SampleGrid, TimeTriple};
use crate::operator::{operator_residual, Operator};
use crate::profile::{profile_distance, BaseProfile, IntegrationMode, StateProfile};

/// An ordered pair of times with t >= s >= 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimePair {
    t: f64,
    s: f64,
}

impl TimePair {
    pub fn new(t: f64, s: f64) -> Result<Self> {
        if !(t.is_finite() && s.is_finite() && t >= s && s >= 0.0) {
            return Err(SkewflowError::TimeDomain {
                t,
                s,
                context: "evaluation requires t >= s >= 0",
            });
        }
        Ok(Self { t, s })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Elapsed time t - s.
    pub fn span(&self) -> f64 {
        self.t - self.s
    }
}

/// Two-parameter flow on the profile space.
pub trait EvolutionSemiflow: Send + Sync {
    fn evolve(&self, pair: TimePair, x: &StateProfile) -> StateProfile;
}

/// Operator-valued map over a semiflow.
pub trait EvolutionCocycle: Send + Sync {
    fn dim(&self) -> usize;
    fn operator(&self, pair: TimePair, x: &StateProfile) -> Result<Operator>;
}

/// The translation semiflow: evolve(t, s, x) shifts x by t - s.
#[derive(Debug, Clone, Copy, Default)]
pub struct TranslationSemiflow;

impl EvolutionSemiflow for TranslationSemiflow {
    fn evolve(&self, pair: TimePair, x: &StateProfile) -> StateProfile {
        x.shifted(pair.span())
            .expect("span of a TimePair is finite and nonnegative")
    }
}

/// Log of a diagonal cocycle entry, as a function of the elapsed time and of
/// the integral J = integral of the state profile over [0, t - s].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum DiagonalExponent {
    /// coeff * J
    Integral { coeff: f64 },
    /// dt_coeff * (t - s) + integral_coeff * J
    Affine { dt_coeff: f64, integral_coeff: f64 },
    /// dt_coeff * x(0) * (t - s) + integral_coeff * J, with x the state the
    /// operator is evaluated at. The x(0) factor is not transported by the
    /// semiflow, so this variant violates the cocycle law on purpose; it
    /// exists to reproduce a center component read literally off its printed
    /// form.
    StateValueDt { dt_coeff: f64, integral_coeff: f64 },
    /// log (1 + t - s)^power: polynomial growth or decay, no exponential
    /// envelope. Not a cocycle; used as a negative control.
    Power { power: f64 },
}

impl DiagonalExponent {
    fn needs_integral(&self) -> bool {
        match self {
            DiagonalExponent::Integral { coeff } => *coeff != 0.0,
            DiagonalExponent::Affine { integral_coeff, .. }
            | DiagonalExponent::StateValueDt { integral_coeff, .. } => *integral_coeff != 0.0,
            DiagonalExponent::Power { .. } => false,
        }
    }

    fn log_entry(&self, span: f64, integral: f64, x: &StateProfile) -> f64 {
        match self {
            DiagonalExponent::Integral { coeff } => coeff * integral,
            DiagonalExponent::Affine {
                dt_coeff,
                integral_coeff,
            } => dt_coeff * span + integral_coeff * integral,
            DiagonalExponent::StateValueDt {
                dt_coeff,
                integral_coeff,
            } => dt_coeff * x.value(0.0) * span + integral_coeff * integral,
            DiagonalExponent::Power { power } => power * span.ln_1p(),
        }
    }
}

/// Diagonal evolution cocycle with one exponent per component.
#[derive(Debug, Clone)]
pub struct DiagonalCocycle {
    exponents: Vec<DiagonalExponent>,
    integration: IntegrationMode,
}

impl DiagonalCocycle {
    pub fn new(exponents: Vec<DiagonalExponent>, integration: IntegrationMode) -> Result<Self> {
        if exponents.is_empty() {
            return Err(SkewflowError::InvalidSystem(
                "diagonal cocycle needs at least one component".into(),
            ));
        }
        Ok(Self {
            exponents,
            integration,
        })
    }

    pub fn exponents(&self) -> &[DiagonalExponent] {
        &self.exponents
    }

    pub fn integration(&self) -> IntegrationMode {
        self.integration
    }
}

impl EvolutionCocycle for DiagonalCocycle {
    fn dim(&self) -> usize {
        self.exponents.len()
    }

    fn operator(&self, pair: TimePair, x: &StateProfile) -> Result<Operator> {
        let span = pair.span();
        let integral = if self.exponents.iter().any(|e| e.needs_integral()) {
            x.integral(span, self.integration)?
        } else {
            0.0
        };
        let diag = DVector::from_iterator(
            self.exponents.len(),
            self.exponents
                .iter()
                .map(|e| e.log_entry(span, integral, x).exp()),
        );
        Ok(Operator::from_diagonal(&diag))
    }
}

/// A skew-evolution system: a semiflow paired with an evolution cocycle over
/// it, acting on profiles x and vectors v in R^p with the 1-norm.
#[derive(Clone)]
pub struct SkewEvolutionSystem {
    semiflow: Arc<dyn EvolutionSemiflow>,
    cocycle: Arc<dyn EvolutionCocycle>,
    base: Arc<BaseProfile>,
    dim: usize,
}

impl std::fmt::Debug for SkewEvolutionSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SkewEvolutionSystem")
            .field("dim", &self.dim)
            .field("base", &self.base)
            .finish_non_exhaustive()
    }
}

impl SkewEvolutionSystem {
    pub fn new(
        semiflow: Arc<dyn EvolutionSemiflow>,
        cocycle: Arc<dyn EvolutionCocycle>,
        base: Arc<BaseProfile>,
    ) -> Result<Self> {
        base.validate()?;
        let dim = cocycle.dim();
        if dim == 0 {
            return Err(SkewflowError::InvalidSystem(
                "cocycle dimension must be at least 1".into(),
            ));
        }
        Ok(Self {
            semiflow,
            cocycle,
            base,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base(&self) -> &Arc<BaseProfile> {
        &self.base
    }

    /// The initial state with the given shift.
    pub fn state(&self, shift: f64) -> Result<StateProfile> {
        StateProfile::new(Arc::clone(&self.base), shift)
    }

    /// phi(t, s, x). Rejects t < s or negative times.
    pub fn evolve_state(&self, t: f64, s: f64, x: &StateProfile) -> Result<StateProfile> {
        let pair = TimePair::new(t, s)?;
        Ok(self.semiflow.evolve(pair, x))
    }

    /// The cocycle operator at (t, s, x) as a dense matrix.
    pub fn operator(&self, t: f64, s: f64, x: &StateProfile) -> Result<Operator> {
        let pair = TimePair::new(t, s)?;
        self.cocycle.operator(pair, x)
    }

    /// The full skew action: (phi(t, s, x), Phi(t, s, x) v).
    pub fn apply(
        &self,
        t: f64,
        s: f64,
        x: &StateProfile,
        v: &DVector<f64>,
    ) -> Result<(StateProfile, DVector<f64>)> {
        if v.len() != self.dim {
            return Err(SkewflowError::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let pair = TimePair::new(t, s)?;
        let state = self.semiflow.evolve(pair, x);
        let op = self.cocycle.operator(pair, x)?;
        Ok((state, op * v))
    }
}

/// Location of a worst residual.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SamplePoint {
    pub t: f64,
    pub s: f64,
    pub t0: f64,
    pub shift: f64,
}

impl SamplePoint {
    fn new(triple: &TimeTriple, shift: f64) -> Self {
        Self {
            t: triple.t(),
            s: triple.s(),
            t0: triple.t0(),
            shift,
        }
    }
}

/// One named residual with its maximum over the grid and the argmax sample.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NamedResidual {
    pub name: String,
    pub max: f64,
    pub worst: Option<SamplePoint>,
}

/// Outcome of a sampled axiom check.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AxiomReport {
    pub check: String,
    pub samples: usize,
    pub tolerance: f64,
    pub residuals: Vec<NamedResidual>,
    pub passed: bool,
}

impl AxiomReport {
    pub(crate) fn from_residuals(
        check: &str,
        samples: usize,
        tolerance: f64,
        residuals: Vec<NamedResidual>,
    ) -> Self {
        let passed = residuals.iter().all(|r| r.max <= tolerance);
        Self {
            check: check.to_string(),
            samples,
            tolerance,
            residuals,
            passed,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0f64, |acc, r| acc.max(r.max))
    }
}

fn fold_named(name: &str, samples: &[(SamplePoint, f64)]) -> NamedResidual {
    let mut max = 0.0f64;
    let mut worst = None;
    for &(point, value) in samples {
        if value > max {
            max = value;
            worst = Some(point);
        }
    }
    NamedResidual {
        name: name.to_string(),
        max,
        worst,
    }
}

fn sample_items(sys: &SkewEvolutionSystem, grid: &SampleGrid) -> Result<Vec<(TimeTriple, f64)>> {
    grid.validate()?;
    let mut items = Vec::with_capacity(grid.triples().len() * grid.shifts().len());
    for triple in grid.triples() {
        for &shift in grid.shifts() {
            sys.state(shift)?;
            items.push((*triple, shift));
        }
    }
    Ok(items)
}

/// Check the semiflow axioms on the sampled grid.
///
/// Residuals: `identity` is the state distance of evolve(t, t, x) from x;
/// `composition` the distance of the two sides of
/// evolve(t, s, evolve(s, t0, x)) = evolve(t, t0, x).
pub fn check_semiflow_axioms(
    sys: &SkewEvolutionSystem,
    grid: &SampleGrid,
    tol: f64,
    t_trunc: f64,
) -> Result<AxiomReport> {
    let items = sample_items(sys, grid)?;
    let results = sweep_map(
        &items,
        |(triple, shift)| -> Result<(SamplePoint, f64, f64)> {
            let x = sys.state(*shift)?;
            let point = SamplePoint::new(triple, *shift);

            let back = sys.evolve_state(triple.t(), triple.t(), &x)?;
            let identity = profile_distance(&back, &x, t_trunc);

            let mid = sys.evolve_state(triple.s(), triple.t0(), &x)?;
            let composed = sys.evolve_state(triple.t(), triple.s(), &mid)?;
            let direct = sys.evolve_state(triple.t(), triple.t0(), &x)?;
            let composition = profile_distance(&composed, &direct, t_trunc);

            Ok((point, identity, composition))
        },
    );

    let mut identity = Vec::with_capacity(results.len());
    let mut composition = Vec::with_capacity(results.len());
    for r in results {
        let (point, id, comp) = r?;
        identity.push((point, id));
        composition.push((point, comp));
    }

    Ok(AxiomReport::from_residuals(
        "semiflow",
        items.len(),
        tol,
        vec![
            fold_named("identity", &identity),
            fold_named("composition", &composition),
        ],
    ))
}

/// Check the cocycle axioms on the sampled grid.
///
/// Residuals are entrywise operator residuals: `identity` compares
/// Phi(t, t, x) with I, `composition` compares
/// Phi(t, s, phi(s, t0, x)) Phi(s, t0, x) with Phi(t, t0, x).
pub fn check_cocycle_axioms(
    sys: &SkewEvolutionSystem,
    grid: &SampleGrid,
    tol: f64,
) -> Result<AxiomReport> {
    let items = sample_items(sys, grid)?;
    let eye = Operator::identity(sys.dim(), sys.dim());
    let results = sweep_map(
        &items,
        |(triple, shift)| -> Result<(SamplePoint, f64, f64)> {
            let x = sys.state(*shift)?;
            let point = SamplePoint::new(triple, *shift);

            let at_t = sys.operator(triple.t(), triple.t(), &x)?;
            let identity = operator_residual(&at_t, &eye);

            let inner = sys.operator(triple.s(), triple.t0(), &x)?;
            let mid_state = sys.evolve_state(triple.s(), triple.t0(), &x)?;
            let outer = sys.operator(triple.t(), triple.s(), &mid_state)?;
            let direct = sys.operator(triple.t(), triple.t0(), &x)?;
            let composition = operator_residual(&(outer * inner), &direct);

            Ok((point, identity, composition))
        },
    );

    let mut identity = Vec::with_capacity(results.len());
    let mut composition = Vec::with_capacity(results.len());
    for r in results {
        let (point, id, comp) = r?;
        identity.push((point, id));
        composition.push((point, comp));
    }

    Ok(AxiomReport::from_residuals(
        "cocycle",
        items.len(),
        tol,
        vec![
            fold_named("identity", &identity),
            fold_named("composition", &composition),
        ],
    ))
}
