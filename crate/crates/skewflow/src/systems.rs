//! Builders for the canonical translation-flow systems: the plain
//! exponential-of-integral system, the dichotomic pair with exponents
//! (-2, +3), and the trichotomic triple with a damped stable component and a
//! bounded center component.

use std::sync::Arc;

use crate::dynamics::{
    DiagonalCocycle, DiagonalExponent, SkewEvolutionSystem, TranslationSemiflow,
};
use crate::error::{Result, SkewflowError};
use crate::profile::{BaseProfile, IntegrationMode};
use crate::projector::{CompatibleFamilySet, ProjectorFamily};

/// Translation semiflow with the p-fold identical exponential-of-integral
/// cocycle: every diagonal entry is e^{J} with J the window integral of the
/// state profile.
pub fn build_translation_system(
    base: BaseProfile,
    dim: usize,
    integration: IntegrationMode,
) -> Result<SkewEvolutionSystem> {
    if dim == 0 {
        return Err(SkewflowError::InvalidSystem(
            "dimension must be >= 1".into(),
        ));
    }
    build_diagonal_system(
        base,
        vec![DiagonalExponent::Integral { coeff: 1.0 }; dim],
        integration,
    )
}

/// Any diagonal cocycle over the translation semiflow.
pub fn build_diagonal_system(
    base: BaseProfile,
    exponents: Vec<DiagonalExponent>,
    integration: IntegrationMode,
) -> Result<SkewEvolutionSystem> {
    base.validate()?;
    SkewEvolutionSystem::new(
        Arc::new(TranslationSemiflow),
        Arc::new(DiagonalCocycle::new(exponents, integration)?),
        Arc::new(base),
    )
}

fn coordinate_partition(
    sys: SkewEvolutionSystem,
    groups: &[&[usize]],
) -> Result<CompatibleFamilySet> {
    let dim = sys.dim();
    let families = groups
        .iter()
        .enumerate()
        .map(|(k, idx)| ProjectorFamily::coordinate(k + 1, dim, idx))
        .collect::<Result<Vec<_>>>()?;
    CompatibleFamilySet::new(sys, families)
}

/// The dichotomic pair: p = 2, entries (e^{-2 J} v1, e^{3 J} v2), coordinate
/// projectors onto the two axes.
pub fn build_dichotomy_system(
    base: BaseProfile,
    integration: IntegrationMode,
) -> Result<CompatibleFamilySet> {
    let sys = build_diagonal_system(
        base,
        vec![
            DiagonalExponent::Integral { coeff: -2.0 },
            DiagonalExponent::Integral { coeff: 3.0 },
        ],
        integration,
    )?;
    coordinate_partition(sys, &[&[0], &[1]])
}

/// The trichotomic triple: p = 3 with entries
/// (e^{-mu (t-s) + J} v1, e^{J} v2, e^{-kappa (t-s) + J} v3) and coordinate
/// projectors, requiring mu > f(0).
///
/// The center damping rate kappa is frozen at construction to f(0), the value
/// of the designated initial profile at 0. Freezing is what makes the third
/// component an actual evolution cocycle: composing through the semiflow
/// shifts the profile, so a rate re-read from the transported state breaks
/// the composition law. Pass `literal_t0 = true` to get that broken variant,
/// whose damping factor e^{-(t-s) x(0)} re-reads x(0) from whichever state
/// the operator is evaluated at; its composition residual is large and
/// demonstrable.
pub fn build_trichotomy_system(
    base: BaseProfile,
    mu: f64,
    literal_t0: bool,
    integration: IntegrationMode,
) -> Result<CompatibleFamilySet> {
    base.validate()?;
    let f0 = base.value(0.0);
    if !(mu.is_finite() && mu > f0) {
        return Err(SkewflowError::InvalidSystem(format!(
            "trichotomy example requires mu > f(0): mu = {mu}, f(0) = {f0}"
        )));
    }
    let center = if literal_t0 {
        DiagonalExponent::StateValueDt {
            dt_coeff: -1.0,
            integral_coeff: 1.0,
        }
    } else {
        DiagonalExponent::Affine {
            dt_coeff: -f0,
            integral_coeff: 1.0,
        }
    };
    let sys = build_diagonal_system(
        base,
        vec![
            DiagonalExponent::Affine {
                dt_coeff: -mu,
                integral_coeff: 1.0,
            },
            DiagonalExponent::Integral { coeff: 1.0 },
            center,
        ],
        integration,
    )?;
    coordinate_partition(sys, &[&[0], &[1], &[2]])
}
