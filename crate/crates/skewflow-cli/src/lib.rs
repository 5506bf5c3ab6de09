//! Library half of the workbench: builds systems from a JSON config, runs
//! the requested analysis, and assembles a deterministic report.
//!
//! Reports contain no timestamps or host data: identical config plus seed
//! yields byte-identical output.

// Negated float comparisons are deliberate: `!(x > y)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod report;

use nalgebra::{DMatrix, DVector};

use skewflow::{
    build_diagonal_system, build_dichotomy_system, build_translation_system,
    build_trichotomy_system, certify, check_cocycle_axioms, check_family_algebra,
    check_growth_criterion, check_integral_criterion, check_intertwining, check_semiflow_axioms,
    derive_constants_from_criterion, derive_trichotomy_constants, estimate_sharp_rates, l1_norm,
    verify_dichotomy, verify_trichotomy, AxiomReport, CertifyOptions, ClassificationMode,
    CompatibleFamilySet, IntegrationMode, ProjectorFamily, RateConstants, SampleGrid,
    SkewEvolutionSystem, SpectralCertificate, Verdict, DEFAULT_PROFILE_TRUNCATION,
};

pub use config::{AnalysisConfig, CapsConfig, Command, ExampleKind, ProjectorConfig};
pub use error::CliError;
pub use report::{plot_csv, AnalysisReport, DerivedConstants, PlotRow};

/// Everything one analysis run produces.
pub struct AnalysisOutcome {
    pub report: AnalysisReport,
    /// CSV text, present when the config requested plot data.
    pub plot: Option<String>,
}

struct BuiltSystem {
    system: SkewEvolutionSystem,
    families: Option<CompatibleFamilySet>,
}

fn build_families(
    system: &SkewEvolutionSystem,
    spec: &ProjectorConfig,
) -> Result<CompatibleFamilySet, CliError> {
    let dim = system.dim();
    let families = match spec {
        ProjectorConfig::Coordinate { partition } => partition
            .iter()
            .enumerate()
            .map(|(k, indices)| {
                ProjectorFamily::coordinate(k + 1, dim, indices).map_err(CliError::from)
            })
            .collect::<Result<Vec<_>, _>>()?,
        ProjectorConfig::Matrices { matrices } => matrices
            .iter()
            .enumerate()
            .map(|(k, rows)| {
                let n = rows.len();
                if n != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(CliError::Config(format!(
                        "projectors.matrices[{k}] must be {dim} x {dim}"
                    )));
                }
                let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                ProjectorFamily::constant(k + 1, DMatrix::from_row_slice(n, n, &flat))
                    .map_err(CliError::from)
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    CompatibleFamilySet::new(system.clone(), families).map_err(CliError::from)
}

fn build_system(cfg: &AnalysisConfig) -> Result<BuiltSystem, CliError> {
    let sys_cfg = &cfg.system;
    let integration = sys_cfg.integration.unwrap_or(IntegrationMode::ClosedForm);
    let profile = sys_cfg.profile.clone();

    let (system, builtin_families) = match sys_cfg.example {
        ExampleKind::Ses => {
            let dim = sys_cfg.p.unwrap_or(1);
            (build_translation_system(profile, dim, integration)?, None)
        }
        ExampleKind::Ued => {
            let set = build_dichotomy_system(profile, integration)?;
            (set.system().clone(), Some(set))
        }
        ExampleKind::Uet => {
            let mu = sys_cfg.mu.unwrap_or(3.0);
            let set = build_trichotomy_system(profile, mu, sys_cfg.literal_t0, integration)?;
            (set.system().clone(), Some(set))
        }
        ExampleKind::CustomDiagonal => {
            let exponents = sys_cfg
                .exponents
                .clone()
                .ok_or_else(|| CliError::Config("system.exponents is required".into()))?;
            (
                build_diagonal_system(profile, exponents, integration)?,
                None,
            )
        }
    };

    let families = match &cfg.projectors {
        Some(spec) => Some(build_families(&system, spec)?),
        None => builtin_families,
    };
    Ok(BuiltSystem { system, families })
}

fn require_families<'a>(
    built: &'a BuiltSystem,
    command: &str,
) -> Result<&'a CompatibleFamilySet, CliError> {
    built.families.as_ref().ok_or_else(|| {
        CliError::Config(format!(
            "{command} needs projector families; set \"projectors\" or use the ued/uet examples"
        ))
    })
}

fn mode_for(set: &CompatibleFamilySet) -> ClassificationMode {
    if set.family_count() == 2 {
        ClassificationMode::Dichotomy
    } else {
        ClassificationMode::Trichotomy
    }
}

fn verify_by_count(
    set: &CompatibleFamilySet,
    constants: &RateConstants,
    grid: &SampleGrid,
) -> Result<SpectralCertificate, CliError> {
    let cert = match mode_for(set) {
        ClassificationMode::Dichotomy => verify_dichotomy(set, constants, grid)?,
        ClassificationMode::Trichotomy => verify_trichotomy(set, constants, grid)?,
    };
    Ok(cert)
}

/// The tolerance the axiom checks run at: quadrature-backed or tabulated
/// systems get the looser budget.
fn axiom_tolerance(cfg: &AnalysisConfig) -> f64 {
    let quadrature_path = matches!(
        cfg.system.integration,
        Some(IntegrationMode::Quadrature { .. })
    ) || !cfg.system.profile.has_closed_form();
    if !cfg.system.profile.has_closed_form() {
        // Tabulated profiles are integrated by quadrature across kinks.
        return cfg.tolerances.quadrature.max(1e-5);
    }
    if quadrature_path {
        cfg.tolerances.quadrature
    } else {
        cfg.tolerances.closed_form
    }
}

/// Run one analysis. Pure apart from the randomness pinned by the seed.
pub fn run_config(cfg: &AnalysisConfig) -> Result<AnalysisOutcome, CliError> {
    cfg.validate()?;
    let built = build_system(cfg)?;
    let grid = SampleGrid::from_spec(&cfg.grid.to_spec(), built.system.dim(), cfg.seed)?;

    let mut report = AnalysisReport::new(cfg.clone());
    let tol = axiom_tolerance(cfg);

    match cfg.command {
        Command::VerifyAxioms => {
            let mut axioms: Vec<AxiomReport> = Vec::new();
            axioms.push(check_semiflow_axioms(
                &built.system,
                &grid,
                cfg.tolerances.closed_form,
                DEFAULT_PROFILE_TRUNCATION,
            )?);
            axioms.push(check_cocycle_axioms(&built.system, &grid, tol)?);
            if let Some(set) = &built.families {
                axioms.push(check_family_algebra(
                    set,
                    &grid,
                    cfg.tolerances.closed_form,
                )?);
                axioms.push(check_intertwining(set, &grid, tol)?);
            }
            report.passed = axioms.iter().all(|a| a.passed);
            report.axioms = axioms;
        }
        Command::Classify => {
            let set = require_families(&built, "classify")?;
            match &cfg.constants {
                Some(c) => {
                    let constants = RateConstants::new(c.n.clone(), c.nu.clone())?;
                    let cert = verify_by_count(set, &constants, &grid)?;
                    report.passed = cert.verdict != Verdict::Rejected;
                    report.certificate = Some(cert);
                }
                None => {
                    let estimate = estimate_sharp_rates(set, &grid)?;
                    let mut gains = Vec::new();
                    let mut rates = Vec::new();
                    let mut undefined = None;
                    for comp in &estimate.components {
                        match comp.rate {
                            Some(rate) if rate > 0.0 || comp.valid_pairs == 0 => {
                                gains.push(comp.gain.max(1.0));
                                rates.push(rate.max(f64::MIN_POSITIVE));
                            }
                            Some(rate) if comp.valid_pairs > 0 => {
                                undefined = Some(format!(
                                    "component {} sharp rate {rate} is not positive",
                                    comp.component
                                ));
                                gains.push(1.0);
                                rates.push(1.0);
                            }
                            _ => {
                                gains.push(1.0);
                                rates.push(1.0);
                                if comp.valid_pairs > 0 {
                                    undefined = Some(format!(
                                        "component {} rate is undefined",
                                        comp.component
                                    ));
                                }
                            }
                        }
                    }
                    match undefined {
                        Some(reason) => {
                            report.passed = false;
                            report.notes.push(reason);
                        }
                        None => {
                            let constants = RateConstants::new(gains, rates)?;
                            let cert = verify_by_count(set, &constants, &grid)?;
                            report.passed = cert.verdict != Verdict::Rejected;
                            report.certificate = Some(cert);
                        }
                    }
                    report.estimate = Some(estimate);
                }
            }
        }
        Command::Certify => {
            let set = require_families(&built, "certify")?;
            let cert = certify(set, &grid, mode_for(set), CertifyOptions::default())?;
            report.passed = cert.verdict != Verdict::Rejected;
            report.certificate = Some(cert);
        }
        Command::GrowthCriterion => {
            let set = require_families(&built, "criterion-3-1")?;
            let f = cfg.criterion.as_ref().expect("validated");
            let criterion = check_growth_criterion(set, f, &grid)?;
            let delta = cfg.delta.unwrap_or(1.0);
            let (gain, rate) = derive_constants_from_criterion(f, delta)?;
            let constants = RateConstants::new(vec![gain, gain], vec![rate, rate])?;
            let cert = verify_dichotomy(set, &constants, &grid)?;
            report.passed = criterion.passed && cert.verdict != Verdict::Rejected;
            report.derived_constants = Some(DerivedConstants {
                gains: constants.gains.clone(),
                rates: constants.rates.clone(),
                delta,
            });
            report.criterion = Some(criterion);
            report.certificate = Some(cert);
        }
        Command::IntegralCriterion => {
            let set = require_families(&built, "criterion-3-2")?;
            let g = cfg.criterion_g.as_ref().expect("validated");
            let opts = cfg.caps.unwrap_or_default().to_options();
            let criterion = check_integral_criterion(set, g, &grid, opts)?;
            if criterion.passed {
                let (constants, delta) = derive_trichotomy_constants(&criterion, g)?;
                let cert = verify_trichotomy(set, &constants, &grid)?;
                report.passed = cert.verdict != Verdict::Rejected;
                report.derived_constants = Some(DerivedConstants {
                    gains: constants.gains.clone(),
                    rates: constants.rates.clone(),
                    delta,
                });
                report.certificate = Some(cert);
            } else {
                report.passed = false;
                report
                    .notes
                    .push("integral criterion failed; no constants derived".into());
            }
            report.criterion = Some(criterion);
        }
    }

    let plot = match cfg.output.as_ref().and_then(|o| o.plot_data.as_ref()) {
        Some(_) => Some(plot_csv(&plot_rows(
            &built.system,
            built.families.as_ref(),
            &grid,
        )?)),
        None => None,
    };

    Ok(AnalysisOutcome { report, plot })
}

/// Projected trajectory norms for plotting: one row per (time triple, shift,
/// component), with the component's projector applied to the all-ones vector.
/// Systems without projector families use one component per coordinate axis.
pub fn plot_rows(
    system: &SkewEvolutionSystem,
    families: Option<&CompatibleFamilySet>,
    grid: &SampleGrid,
) -> Result<Vec<PlotRow>, CliError> {
    let dim = system.dim();
    let ones = DVector::from_element(dim, 1.0);
    let mut rows = Vec::new();
    for triple in grid.triples() {
        for &shift in grid.shifts() {
            let x = system.state(shift)?;
            let op = system.operator(triple.t(), triple.t0(), &x)?;
            let mut push = |component: usize, projected: DVector<f64>| {
                let transported: DVector<f64> = &op * &projected;
                let norm = l1_norm(&transported);
                rows.push(PlotRow {
                    t: triple.t(),
                    s: triple.s(),
                    t0: triple.t0(),
                    x_shift: shift,
                    component,
                    norm,
                    log_norm: norm.ln(),
                });
            };
            match families {
                Some(set) => {
                    for fam in set.families() {
                        push(fam.label(), fam.at(&x) * &ones);
                    }
                }
                None => {
                    for j in 0..dim {
                        let mut e = DVector::zeros(dim);
                        e[j] = 1.0;
                        push(j + 1, e);
                    }
                }
            }
        }
    }
    Ok(rows)
}
