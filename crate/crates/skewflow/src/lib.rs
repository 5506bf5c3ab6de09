//! Skew-evolution semiflows over a profile state space, with numerical
//! certification of uniform exponential dichotomy and trichotomy.
//!
//! A system pairs the translation semiflow on shifted copies of a
//! nonincreasing base function with a diagonal evolution cocycle whose
//! entries are exponentials of window integrals of the evolving profile.
//! The crate provides:
//!
//! - sampling-based checks of the semiflow and cocycle axioms
//!   ([`check_semiflow_axioms`], [`check_cocycle_axioms`]);
//! - projector-family algebra and intertwining checks
//!   ([`check_family_algebra`], [`check_intertwining`]);
//! - grid verification of the dichotomy/trichotomy inequalities for given
//!   constants ([`verify_dichotomy`], [`verify_trichotomy`]), sharp rate
//!   estimation from trajectory norms ([`estimate_sharp_rates`]) and
//!   estimate-then-verify certification ([`certify`]);
//! - executable growth-function and sup/integral criteria with their
//!   constant-extraction constructions ([`check_growth_criterion`],
//!   [`check_integral_criterion`], [`derive_constants_from_criterion`],
//!   [`derive_trichotomy_constants`]).
//!
//! Grid sweeps run data-parallel under the default `parallel` feature and
//! fall back to sequential iteration without it; results are identical in
//! both modes.
//!
//! ```
//! use skewflow::{
//!     build_dichotomy_system, verify_dichotomy, BaseProfile, GridSpec,
//!     IntegrationMode, RateConstants, SampleGrid, Verdict,
//! };
//!
//! // The dichotomic pair over f(u) = 1 + e^{-u} satisfies its sharp
//! // constants N = 1, nu = (2, 3) at every grid tuple.
//! let set = build_dichotomy_system(BaseProfile::unit_exp(), IntegrationMode::ClosedForm)?;
//! let grid = SampleGrid::from_spec(&GridSpec::default(), 2, 42)?;
//! let constants = RateConstants::new(vec![1.0, 1.0], vec![2.0, 3.0])?;
//! let certificate = verify_dichotomy(&set, &constants, &grid)?;
//! assert_eq!(certificate.verdict, Verdict::Dichotomic);
//! assert_eq!(certificate.violation_count, 0);
//! # Ok::<(), skewflow::SkewflowError>(())
//! ```

// Negated float comparisons are deliberate: `!(x > y)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod criteria;
pub mod dynamics;
pub mod error;
mod exec;
pub mod grid;
pub mod operator;
pub mod profile;
pub mod projector;
pub mod quad;
pub mod rng;
pub mod systems;

pub use classify::{
    certify, estimate_sharp_rates, verify_dichotomy, verify_trichotomy, CertifyOptions,
    ClassificationMode, ComponentRate, ComponentRole, RateConstants, RateEstimate,
    SpectralCertificate, StateRate, Verdict, Violation, RELATIVE_SLACK,
};
pub use criteria::{
    build_criterion_from_constants, check_growth_criterion, check_integral_criterion,
    derive_constants_from_criterion, derive_trichotomy_constants, CriterionFunction,
    CriterionReport, IntegralCriterionOptions,
};
pub use dynamics::{
    check_cocycle_axioms, check_semiflow_axioms, AxiomReport, DiagonalCocycle, DiagonalExponent,
    EvolutionCocycle, EvolutionSemiflow, NamedResidual, SamplePoint, SkewEvolutionSystem, TimePair,
    TranslationSemiflow,
};
pub use error::{Result, SkewflowError};
pub use grid::{GridOrigin, GridSpec, GridSummary, SampleGrid, TimeTriple};
pub use operator::{l1_norm, operator_residual, Operator};
pub use profile::{
    integrate_profile, profile_distance, BaseProfile, IntegrationMode, StateProfile,
    DEFAULT_PROFILE_TRUNCATION,
};
pub use projector::{
    check_family_algebra, check_intertwining, check_rank_partition, CompatibleFamilySet,
    ProjectorFamily, ProjectorKind,
};
pub use systems::{
    build_diagonal_system, build_dichotomy_system, build_translation_system,
    build_trichotomy_system,
};
