//! Verification of the uniform exponential dichotomy and trichotomy
//! inequalities, sharp rate estimation from trajectory norms, and
//! estimate-then-verify certification.
//!
//! Certificates are grid-verified evidence: the inequalities are checked at
//! every sampled tuple with a small relative slack, never proved for all
//! (t, s).

use nalgebra::DVector;

use crate::error::{Result, SkewflowError};
use crate::exec::sweep_map;
use crate::grid::{GridSummary, SampleGrid, TimeTriple};
use crate::operator::l1_norm;
use crate::projector::CompatibleFamilySet;

/// Relative slack absorbing floating-point noise in inequality checks;
/// strictness is never load-bearing in the definitions.
pub const RELATIVE_SLACK: f64 = 1e-9;

/// Violations kept verbatim in a certificate; the rest are only counted.
const MAX_RECORDED_VIOLATIONS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    Dichotomic,
    Trichotomic,
    Rejected,
}

/// What a component's inequality demands of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ComponentRole {
    /// Decays at rate at least nu with gain N.
    Stable,
    /// Grows at rate at least nu with gain N.
    Unstable,
    /// Growth and decay both bounded by N e^{nu (t-s)}.
    Center,
}

pub(crate) fn roles_for(count: usize) -> Result<Vec<ComponentRole>> {
    match count {
        2 => Ok(vec![ComponentRole::Stable, ComponentRole::Unstable]),
        3 => Ok(vec![
            ComponentRole::Stable,
            ComponentRole::Unstable,
            ComponentRole::Center,
        ]),
        n => Err(SkewflowError::InvalidFamilySet(format!(
            "expected 2 or 3 projector families, got {n}"
        ))),
    }
}

/// Gains N_k >= 1 and rates nu_k > 0, one per component.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateConstants {
    pub gains: Vec<f64>,
    pub rates: Vec<f64>,
}

impl RateConstants {
    pub fn new(gains: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        let constants = Self { gains, rates };
        constants.validate()?;
        Ok(constants)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gains.len() != self.rates.len() {
            return Err(SkewflowError::InvalidConstants(format!(
                "{} gains vs {} rates",
                self.gains.len(),
                self.rates.len()
            )));
        }
        for (k, &n) in self.gains.iter().enumerate() {
            if !(n.is_finite() && n >= 1.0) {
                return Err(SkewflowError::InvalidConstants(format!(
                    "gain N_{} = {n} must be finite and >= 1",
                    k + 1
                )));
            }
        }
        for (k, &nu) in self.rates.iter().enumerate() {
            if !(nu.is_finite() && nu > 0.0) {
                return Err(SkewflowError::InvalidConstants(format!(
                    "rate nu_{} = {nu} must be finite and > 0",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    pub fn validate_for(&self, components: usize) -> Result<()> {
        self.validate()?;
        if self.gains.len() != components {
            return Err(SkewflowError::InvalidConstants(format!(
                "expected constants for {components} components, got {}",
                self.gains.len()
            )));
        }
        Ok(())
    }
}

/// One failed inequality, with the offending tuple.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub t: f64,
    pub s: f64,
    pub t0: f64,
    pub shift: f64,
    pub vector: Vec<f64>,
    pub component: usize,
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
}

/// Verdict plus the constants and grid it was checked against.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralCertificate {
    pub verdict: Verdict,
    pub constants: RateConstants,
    pub grid: GridSummary,
    pub checked: usize,
    pub skipped: usize,
    /// Largest lhs/rhs ratio seen over all checked inequalities.
    pub worst_margin: f64,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
    /// Sharp-rate table when the certificate came out of `certify`.
    pub rate_table: Option<RateEstimate>,
    pub notes: Vec<String>,
}

/// Norms of one projected trajectory at the pair endpoints.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ComponentNorms {
    pub(crate) projected: f64,
    pub(crate) at_s: f64,
    pub(crate) at_t: f64,
}

/// All projected trajectory norms for one (triple, shift) sample.
pub(crate) struct ItemNorms {
    pub(crate) triple: TimeTriple,
    pub(crate) shift: f64,
    /// per vector, per component
    pub(crate) per_vector: Vec<Vec<ComponentNorms>>,
}

pub(crate) fn trajectory_norms(
    set: &CompatibleFamilySet,
    grid: &SampleGrid,
) -> Result<Vec<ItemNorms>> {
    grid.validate()?;
    if grid.vectors().is_empty() {
        return Err(SkewflowError::EmptyGrid("no test vectors"));
    }
    if grid.dim() != set.dim() {
        return Err(SkewflowError::DimensionMismatch {
            expected: set.dim(),
            got: grid.dim(),
        });
    }
    let mut items = Vec::with_capacity(grid.triples().len() * grid.shifts().len());
    for triple in grid.triples() {
        for &shift in grid.shifts() {
            items.push((*triple, shift));
        }
    }
    let vectors: Vec<DVector<f64>> = grid.vectors().to_vec();

    let results = sweep_map(&items, |(triple, shift)| -> Result<ItemNorms> {
        let sys = set.system();
        let x = sys.state(*shift)?;
        let op_t = sys.operator(triple.t(), triple.t0(), &x)?;
        let op_s = sys.operator(triple.s(), triple.t0(), &x)?;
        let projectors: Vec<_> = set.families().iter().map(|f| f.at(&x)).collect();
        let per_vector = vectors
            .iter()
            .map(|v| {
                projectors
                    .iter()
                    .map(|p| {
                        let pv = p * v;
                        ComponentNorms {
                            projected: l1_norm(&pv),
                            at_s: l1_norm(&(&op_s * &pv)),
                            at_t: l1_norm(&(&op_t * &pv)),
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(ItemNorms {
            triple: *triple,
            shift: *shift,
            per_vector,
        })
    });

    results.into_iter().collect()
}

pub(crate) struct CheckState {
    pub(crate) checked: usize,
    pub(crate) skipped: usize,
    pub(crate) worst_margin: f64,
    pub(crate) violations: Vec<(f64, Violation)>,
}

impl CheckState {
    pub(crate) fn new() -> Self {
        Self {
            checked: 0,
            skipped: 0,
            worst_margin: 0.0,
            violations: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn record(
        &mut self,
        lhs: f64,
        rhs: f64,
        inequality: &str,
        component: usize,
        item: &ItemNorms,
        vector: &DVector<f64>,
    ) {
        self.checked += 1;
        let margin = if rhs > 0.0 { lhs / rhs } else { f64::INFINITY };
        if rhs > 0.0 {
            self.worst_margin = self.worst_margin.max(margin);
        }
        let ok = lhs <= rhs * (1.0 + RELATIVE_SLACK);
        if !ok {
            self.violations.push((
                margin,
                Violation {
                    t: item.triple.t(),
                    s: item.triple.s(),
                    t0: item.triple.t0(),
                    shift: item.shift,
                    vector: vector.iter().copied().collect(),
                    component,
                    inequality: inequality.to_string(),
                    lhs,
                    rhs,
                },
            ));
        }
    }

    /// (checked, skipped, worst_margin, violation_count, worst violations)
    pub(crate) fn finish(mut self) -> (usize, usize, f64, usize, Vec<Violation>) {
        let violation_count = self.violations.len();
        self.violations
            .sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
        self.violations.truncate(MAX_RECORDED_VIOLATIONS);
        (
            self.checked,
            self.skipped,
            self.worst_margin,
            violation_count,
            self.violations.into_iter().map(|(_, v)| v).collect(),
        )
    }

    fn into_certificate(
        self,
        pass_verdict: Verdict,
        constants: RateConstants,
        grid: &SampleGrid,
    ) -> SpectralCertificate {
        let (checked, skipped, worst_margin, violation_count, violations) = self.finish();
        SpectralCertificate {
            verdict: if violation_count == 0 {
                pass_verdict
            } else {
                Verdict::Rejected
            },
            constants,
            grid: grid.summary(),
            checked,
            skipped,
            worst_margin,
            violation_count,
            violations,
            rate_table: None,
            notes: Vec::new(),
        }
    }
}

fn verify_inner(
    set: &CompatibleFamilySet,
    constants: &RateConstants,
    grid: &SampleGrid,
    pass_verdict: Verdict,
) -> Result<SpectralCertificate> {
    let roles = roles_for(set.family_count())?;
    constants.validate_for(set.family_count())?;
    let norms = trajectory_norms(set, grid)?;
    let vectors = grid.vectors();

    let mut state = CheckState::new();
    for item in &norms {
        let span = item.triple.span();
        for (vi, per_component) in item.per_vector.iter().enumerate() {
            for (k, cn) in per_component.iter().enumerate() {
                if cn.projected == 0.0 {
                    state.skipped += 1;
                    continue;
                }
                let gain = constants.gains[k];
                let rate = constants.rates[k];
                let grow = (rate * span).exp();
                let label = k + 1;
                match roles[k] {
                    ComponentRole::Stable => {
                        state.record(
                            grow * cn.at_t,
                            gain * cn.at_s,
                            "decay",
                            label,
                            item,
                            &vectors[vi],
                        );
                    }
                    ComponentRole::Unstable => {
                        state.record(
                            grow * cn.at_s,
                            gain * cn.at_t,
                            "growth",
                            label,
                            item,
                            &vectors[vi],
                        );
                    }
                    ComponentRole::Center => {
                        state.record(
                            cn.at_t,
                            gain * grow * cn.at_s,
                            "center-forward",
                            label,
                            item,
                            &vectors[vi],
                        );
                        state.record(
                            cn.at_s,
                            gain * grow * cn.at_t,
                            "center-reverse",
                            label,
                            item,
                            &vectors[vi],
                        );
                    }
                }
            }
        }
    }
    Ok(state.into_certificate(pass_verdict, constants.clone(), grid))
}

/// Check the two dichotomy inequalities at every grid tuple.
pub fn verify_dichotomy(
    set: &CompatibleFamilySet,
    constants: &RateConstants,
    grid: &SampleGrid,
) -> Result<SpectralCertificate> {
    if set.family_count() != 2 {
        return Err(SkewflowError::InvalidFamilySet(format!(
            "dichotomy needs 2 projector families, got {}",
            set.family_count()
        )));
    }
    verify_inner(set, constants, grid, Verdict::Dichotomic)
}

/// Check the three trichotomy inequalities (the center one two-sided) at
/// every grid tuple.
pub fn verify_trichotomy(
    set: &CompatibleFamilySet,
    constants: &RateConstants,
    grid: &SampleGrid,
) -> Result<SpectralCertificate> {
    if set.family_count() != 3 {
        return Err(SkewflowError::InvalidFamilySet(format!(
            "trichotomy needs 3 projector families, got {}",
            set.family_count()
        )));
    }
    verify_inner(set, constants, grid, Verdict::Trichotomic)
}

/// Sharp rate of one state on one component.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StateRate {
    pub shift: f64,
    /// None when no valid pair contributed or when a pair degenerated.
    pub rate: Option<f64>,
    pub pairs: usize,
}

/// Grid-sharp rate estimate for one component.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComponentRate {
    pub component: usize,
    pub role: ComponentRole,
    /// Uniform rate over all sampled states; None when undefined, e.g. a
    /// vanishing projector or a degenerate (zero-norm) pair.
    pub rate: Option<f64>,
    /// Minimal gain making the inequality hold on the grid at `rate`.
    pub gain: f64,
    pub valid_pairs: usize,
    pub degenerate_pairs: usize,
    pub per_state: Vec<StateRate>,
}

/// Per-pair exponents aggregated into sharp per-component constants.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateEstimate {
    pub components: Vec<ComponentRate>,
}

/// Per-pair log-ratio observations for one component.
struct PairObservations {
    /// (shift, span, r) with r = ln(W(t)/W(s)) / (t - s)
    samples: Vec<(f64, f64, f64)>,
    degenerate: usize,
}

/// Estimate the sharpest per-component rates the grid supports.
///
/// For each tuple with t > s and nonzero projected norm the per-pair exponent
/// is r = ln(||Phi(t) P_k v|| / ||Phi(s) P_k v||) / (t - s); the stable rate
/// is -max r, the unstable rate min r, the center rate max |r|. The gain is
/// the smallest N making the corresponding inequality hold on the grid with
/// the estimated rate.
pub fn estimate_sharp_rates(set: &CompatibleFamilySet, grid: &SampleGrid) -> Result<RateEstimate> {
    let roles = roles_for(set.family_count())?;
    if !grid.has_positive_span() {
        return Err(SkewflowError::InvalidGrid(
            "rate estimation needs at least one pair with t > s".into(),
        ));
    }
    let norms = trajectory_norms(set, grid)?;

    let mut per_component: Vec<PairObservations> = (0..set.family_count())
        .map(|_| PairObservations {
            samples: Vec::new(),
            degenerate: 0,
        })
        .collect();

    for item in &norms {
        let span = item.triple.span();
        if span <= 0.0 {
            continue;
        }
        for per_vec in &item.per_vector {
            for (k, cn) in per_vec.iter().enumerate() {
                if cn.projected == 0.0 || (cn.at_s == 0.0 && cn.at_t == 0.0) {
                    continue;
                }
                if cn.at_s == 0.0 || cn.at_t == 0.0 {
                    per_component[k].degenerate += 1;
                    continue;
                }
                let r = (cn.at_t / cn.at_s).ln() / span;
                per_component[k].samples.push((item.shift, span, r));
            }
        }
    }

    let components = per_component
        .iter()
        .enumerate()
        .map(|(k, obs)| {
            let role = roles[k];
            let rate = aggregate_rate(role, obs);
            let gain = match rate {
                Some(nu) => minimal_gain(role, nu, &obs.samples),
                None => 1.0,
            };
            let per_state = grid
                .shifts()
                .iter()
                .map(|&shift| {
                    let restricted = PairObservations {
                        samples: obs
                            .samples
                            .iter()
                            .copied()
                            .filter(|&(sh, _, _)| sh == shift)
                            .collect(),
                        degenerate: 0,
                    };
                    StateRate {
                        shift,
                        rate: aggregate_rate(role, &restricted),
                        pairs: restricted.samples.len(),
                    }
                })
                .collect();
            ComponentRate {
                component: k + 1,
                role,
                rate,
                gain,
                valid_pairs: obs.samples.len(),
                degenerate_pairs: obs.degenerate,
                per_state,
            }
        })
        .collect();

    Ok(RateEstimate { components })
}

fn aggregate_rate(role: ComponentRole, obs: &PairObservations) -> Option<f64> {
    if obs.samples.is_empty() {
        return None;
    }
    let rate = match role {
        // A projected norm hitting exact zero mid-trajectory is infinitely
        // fast decay: fine for the stable side, fatal for the others.
        ComponentRole::Stable => {
            let max_r = obs
                .samples
                .iter()
                .fold(f64::NEG_INFINITY, |acc, &(_, _, r)| acc.max(r));
            -max_r
        }
        ComponentRole::Unstable => {
            if obs.degenerate > 0 {
                return None;
            }
            obs.samples
                .iter()
                .fold(f64::INFINITY, |acc, &(_, _, r)| acc.min(r))
        }
        ComponentRole::Center => {
            if obs.degenerate > 0 {
                return None;
            }
            obs.samples
                .iter()
                .fold(0.0f64, |acc, &(_, _, r)| acc.max(r.abs()))
        }
    };
    rate.is_finite().then_some(rate)
}

fn minimal_gain(role: ComponentRole, rate: f64, samples: &[(f64, f64, f64)]) -> f64 {
    let mut gain = 1.0f64;
    for &(_, span, r) in samples {
        let log_excess = match role {
            ComponentRole::Stable => (rate + r) * span,
            ComponentRole::Unstable => (rate - r) * span,
            ComponentRole::Center => (r.abs() - rate) * span,
        };
        gain = gain.max(log_excess.exp());
    }
    gain
}

/// Certification mode; must match the family count of the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ClassificationMode {
    Dichotomy,
    Trichotomy,
}

/// Safety factors applied between estimation and verification.
#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    /// Stable/unstable rates are multiplied by this (< 1 loosens the demand);
    /// the center rate is divided by it (its bound loosens upward).
    pub rate_safety: f64,
    /// Gains are multiplied by this (> 1 loosens).
    pub gain_safety: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            rate_safety: 0.95,
            gain_safety: 1.05,
        }
    }
}

/// Estimate sharp constants, back them off by the safety factors, and verify
/// on the same time range at doubled grid density. A certificate is emitted
/// only when the verification pass is clean.
pub fn certify(
    set: &CompatibleFamilySet,
    grid: &SampleGrid,
    mode: ClassificationMode,
    opts: CertifyOptions,
) -> Result<SpectralCertificate> {
    let expected = match mode {
        ClassificationMode::Dichotomy => 2,
        ClassificationMode::Trichotomy => 3,
    };
    if set.family_count() != expected {
        return Err(SkewflowError::InvalidFamilySet(format!(
            "{mode:?} certification needs {expected} families, got {}",
            set.family_count()
        )));
    }
    if !(0.0 < opts.rate_safety && opts.rate_safety <= 1.0) || opts.gain_safety < 1.0 {
        return Err(SkewflowError::InvalidConstants(format!(
            "safety factors out of range: rate {}, gain {}",
            opts.rate_safety, opts.gain_safety
        )));
    }

    let estimate = estimate_sharp_rates(set, grid)?;
    let mut gains = Vec::with_capacity(estimate.components.len());
    let mut rates = Vec::with_capacity(estimate.components.len());
    let mut notes = Vec::new();
    let mut rejection: Option<String> = None;

    for comp in &estimate.components {
        if comp.valid_pairs == 0 {
            // Vanishing projector: every inequality is vacuous; any admissible
            // constants verify.
            notes.push(format!(
                "component {} has no nonzero projected trajectories; constants are nominal",
                comp.component
            ));
            gains.push(1.0);
            rates.push(1.0);
            continue;
        }
        match comp.rate {
            None => {
                rejection = Some(format!(
                    "component {} rate is undefined ({} degenerate pairs)",
                    comp.component, comp.degenerate_pairs
                ));
                gains.push(1.0);
                rates.push(1.0);
            }
            Some(nu) => {
                let adjusted = match comp.role {
                    ComponentRole::Stable | ComponentRole::Unstable => nu * opts.rate_safety,
                    ComponentRole::Center => nu / opts.rate_safety,
                };
                if !(adjusted.is_finite() && adjusted > 0.0) {
                    rejection = Some(format!(
                        "component {} ({:?}) has non-positive sharp rate {nu}",
                        comp.component, comp.role
                    ));
                    gains.push(1.0);
                    rates.push(1.0);
                } else {
                    gains.push(comp.gain.max(1.0) * opts.gain_safety);
                    rates.push(adjusted);
                }
            }
        }
    }

    if let Some(reason) = rejection {
        return Ok(SpectralCertificate {
            verdict: Verdict::Rejected,
            constants: RateConstants { gains, rates },
            grid: grid.summary(),
            checked: 0,
            skipped: 0,
            worst_margin: 0.0,
            violation_count: 0,
            violations: Vec::new(),
            rate_table: Some(estimate),
            notes: {
                notes.push(reason);
                notes
            },
        });
    }

    let constants = RateConstants::new(gains, rates)?;
    let refined = grid.refined_double()?;
    let mut certificate = match mode {
        ClassificationMode::Dichotomy => verify_dichotomy(set, &constants, &refined)?,
        ClassificationMode::Trichotomy => verify_trichotomy(set, &constants, &refined)?,
    };
    certificate.rate_table = Some(estimate);
    certificate.notes = notes;
    Ok(certificate)
}
