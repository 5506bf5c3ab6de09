//! CLI acceptance suite: report determinism (byte-identical reruns),
//! round-trip stability, exit codes, and plot-data consistency.

use std::path::Path;
use std::process::Command;

use skewflow_cli::{plot_rows, run_config, AnalysisConfig};

use skewflow::{l1_norm, SampleGrid, Verdict};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_skewflow")
}

fn write_config(dir: &Path, name: &str, json: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path
}

fn certify_ued_config() -> String {
    r#"{
        "system": {"example": "ued", "profile": {"kind": "exp_plus_const", "l": 1.0, "a": 1.0, "b": 1.0}},
        "grid": {"t0": [0.0, 1.0], "dt": [0.0, 0.25, 1.0, 5.0, 20.0], "s_offsets": [0.0, 1.0, 5.0], "shifts": [0.0, 1.0, 10.0], "n_random_vectors": 16},
        "tolerances": {"closed_form": 1e-9, "quadrature": 1e-6},
        "command": "certify",
        "seed": 42
    }"#
    .to_string()
}

// ---------------------------------------------------------------------------
// Criterion 8: identical config + seed => byte-identical reports.
// ---------------------------------------------------------------------------

#[test]
fn acceptance_8_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = write_config(dir.path(), "certify.json", &certify_ued_config());

    // In-process: two runs serialize identically.
    let config = AnalysisConfig::parse(&certify_ued_config()).unwrap();
    let first = run_config(&config).unwrap().report.to_json().unwrap();
    let second = run_config(&config).unwrap().report.to_json().unwrap();
    assert_eq!(first, second);

    // Through the binary: two runs write byte-identical files.
    let out_a = dir.path().join("report_a.json");
    let out_b = dir.path().join("report_b.json");
    for out in [&out_a, &out_b] {
        let status = Command::new(bin())
            .arg("--config")
            .arg(&config_path)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let bytes_a = std::fs::read(&out_a).unwrap();
    let bytes_b = std::fs::read(&out_b).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b);
    assert_eq!(bytes_a, first.as_bytes());
    println!("ACCEPTANCE 8 (byte-identical reports across reruns): PASS");
}

#[test]
fn report_round_trip_is_byte_stable() {
    let config = AnalysisConfig::parse(&certify_ued_config()).unwrap();
    let report = run_config(&config).unwrap().report;
    let json = report.to_json().unwrap();
    let reparsed: skewflow_cli::AnalysisReport = serde_json::from_str(&json).unwrap();
    assert_eq!(json, reparsed.to_json().unwrap());
}

// ---------------------------------------------------------------------------
// Command behavior and exit codes.
// ---------------------------------------------------------------------------

#[test]
fn verify_axioms_on_translation_example_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "axioms.json",
        r#"{
            "system": {"example": "ses", "p": 2},
            "command": "verify-axioms",
            "seed": 42
        }"#,
    );
    let out = dir.path().join("report.json");
    let status = Command::new(bin())
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .arg("--strict")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: skewflow_cli::AnalysisReport =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.passed);
    assert_eq!(report.axioms.len(), 2);
    assert!(report.axioms.iter().all(|a| a.passed));
}

#[test]
fn certify_ued_reports_dichotomic() {
    let config = AnalysisConfig::parse(&certify_ued_config()).unwrap();
    let report = run_config(&config).unwrap().report;
    assert!(report.passed);
    let cert = report.certificate.unwrap();
    assert_eq!(cert.verdict, Verdict::Dichotomic);
    assert!(cert.constants.rates[0] >= 1.9);
    assert!(cert.constants.rates[1] >= 2.85);
    assert!(cert.rate_table.is_some());
}

#[test]
fn classify_with_explicit_constants() {
    let config = AnalysisConfig::parse(
        r#"{
            "system": {"example": "uet", "mu": 3.0},
            "constants": {"n": [1.0, 1.0, 1.0], "nu": [1.0, 1.0, 2.0]},
            "command": "classify",
            "seed": 42
        }"#,
    )
    .unwrap();
    let report = run_config(&config).unwrap().report;
    assert!(report.passed);
    assert_eq!(report.certificate.unwrap().verdict, Verdict::Trichotomic);
}

#[test]
fn classify_without_constants_estimates() {
    let config = AnalysisConfig::parse(
        r#"{
            "system": {"example": "ued"},
            "command": "classify",
            "seed": 42
        }"#,
    )
    .unwrap();
    let report = run_config(&config).unwrap().report;
    assert!(report.passed);
    let estimate = report.estimate.unwrap();
    let nu1 = estimate.components[0].rate.unwrap();
    assert!((2.0..=4.0).contains(&nu1));
    assert_eq!(report.certificate.unwrap().verdict, Verdict::Dichotomic);
}

#[test]
fn criterion_3_1_runs_the_construction() {
    let config = AnalysisConfig::parse(
        r#"{
            "system": {"example": "ued"},
            "criterion": {"kind": "scaled_exp", "gain": 1.0, "rate": 2.0},
            "delta": 1.0,
            "command": "criterion-3-1",
            "seed": 42
        }"#,
    )
    .unwrap();
    let report = run_config(&config).unwrap().report;
    assert!(report.passed);
    assert!(report.criterion.unwrap().passed);
    let derived = report.derived_constants.unwrap();
    assert!((derived.gains[0] - 2.0f64.exp()).abs() < 1e-12);
    assert!((derived.rates[0] - 2.0).abs() < 1e-12);
    assert_eq!(report.certificate.unwrap().verdict, Verdict::Dichotomic);
}

#[test]
fn criterion_3_2_extracts_bounds_and_verifies() {
    let config = AnalysisConfig::parse(
        r#"{
            "system": {"example": "uet", "mu": 3.0},
            "criterion_g": {"kind": "scaled_exp", "gain": 1.0, "rate": 2.0},
            "caps": {"n_cap": 100.0, "m_cap": 100.0, "panels_per_unit": 64},
            "command": "criterion-3-2",
            "seed": 42
        }"#,
    )
    .unwrap();
    let report = run_config(&config).unwrap().report;
    assert!(report.passed);
    let criterion = report.criterion.unwrap();
    assert!(criterion.passed);
    assert!(criterion.sup_gain.unwrap() <= 1.0 + 1e-9);
    assert!(criterion.integral_gain.unwrap() <= 1.0 + 1e-6);
    let derived = report.derived_constants.unwrap();
    assert_eq!(derived.gains.len(), 3);
    assert_eq!(report.certificate.unwrap().verdict, Verdict::Trichotomic);
}

#[test]
fn strict_mode_exits_one_on_rejection() {
    let dir = tempfile::tempdir().unwrap();
    // Sign-swapped exponents: the stable component grows.
    let config = write_config(
        dir.path(),
        "swapped.json",
        r#"{
            "system": {
                "example": "custom_diagonal",
                "exponents": [
                    {"kind": "integral", "coeff": 2.0},
                    {"kind": "integral", "coeff": -3.0}
                ]
            },
            "projectors": {"kind": "coordinate", "partition": [[0], [1]]},
            "constants": {"n": [1.0, 1.0], "nu": [2.0, 3.0]},
            "command": "classify",
            "seed": 42
        }"#,
    );
    let out = dir.path().join("report.json");
    let strict = Command::new(bin())
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .arg("--strict")
        .status()
        .unwrap();
    assert_eq!(strict.code(), Some(1));
    // Without --strict the run reports but exits zero.
    let lax = Command::new(bin())
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(lax.code(), Some(0));
    let report: skewflow_cli::AnalysisReport =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(!report.passed);
    assert_eq!(report.certificate.unwrap().verdict, Verdict::Rejected);
}

#[test]
fn invalid_configs_exit_two_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "missing_criterion.json",
            r#"{"system": {"example": "ued"}, "command": "criterion-3-1", "seed": 1}"#,
            "criterion",
        ),
        (
            "bad_mu.json",
            r#"{"system": {"example": "uet", "mu": 1.5}, "command": "certify", "seed": 1}"#,
            "mu",
        ),
        (
            "unknown_field.json",
            r#"{"system": {"example": "ses"}, "command": "verify-axioms", "bogus": 1}"#,
            "bogus",
        ),
    ];
    for (name, json, needle) in cases {
        let config = write_config(dir.path(), name, json);
        let output = Command::new(bin())
            .arg("--config")
            .arg(&config)
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(2), "{name}");
        let stderr = String::from_utf8_lossy(&output.stderr);
        assert!(
            stderr.contains(needle),
            "{name}: stderr {stderr:?} lacks {needle:?}"
        );
    }
    // Unreadable path is a runtime error, also exit 2.
    let missing = Command::new(bin())
        .arg("--config")
        .arg(dir.path().join("nope.json"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn seed_override_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "certify.json", &certify_ued_config());
    let out = dir.path().join("report.json");
    let status = Command::new(bin())
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .arg("--seed")
        .arg("7")
        .status()
        .unwrap();
    assert!(status.success());
    let report: skewflow_cli::AnalysisReport =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.seed, 7);
    assert_eq!(report.config.seed, 7);
    assert_eq!(report.certificate.unwrap().grid.seed, 7);
}

// ---------------------------------------------------------------------------
// Plot data.
// ---------------------------------------------------------------------------

#[test]
fn plot_csv_has_exact_header_and_matches_direct_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("plot.csv");
    let json = format!(
        r#"{{
            "system": {{"example": "ued"}},
            "command": "verify-axioms",
            "seed": 42,
            "output": {{"plot_data": {:?}}}
        }}"#,
        csv_path.to_str().unwrap()
    );
    let config_path = write_config(dir.path(), "plot.json", &json);
    let status = Command::new(bin())
        .arg("--config")
        .arg(&config_path)
        .arg("--out")
        .arg(dir.path().join("report.json"))
        .status()
        .unwrap();
    assert!(status.success());

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,s,t0,x_shift,component,norm,log_norm"));

    // Recompute each emitted norm through the library.
    let config = AnalysisConfig::parse(&json).unwrap();
    let set = skewflow::build_dichotomy_system(
        config.system.profile.clone(),
        skewflow::IntegrationMode::ClosedForm,
    )
    .unwrap();
    let grid = SampleGrid::from_spec(&config.grid.to_spec(), 2, 42).unwrap();
    let rows = plot_rows(set.system(), Some(&set), &grid).unwrap();
    let expected = 2 * grid.triples().len() * grid.shifts().len();
    assert_eq!(rows.len(), expected);

    let mut checked = 0usize;
    for (line, row) in lines.zip(&rows) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7);
        let norm: f64 = fields[5].parse().unwrap();
        assert_eq!(norm, row.norm, "line {line}");
        // Direct skew evaluation of the same projected vector.
        let x = set.system().state(row.x_shift).unwrap();
        let fam = &set.families()[row.component - 1];
        let ones = nalgebra::DVector::from_element(2, 1.0);
        let (_, transported) = set
            .system()
            .apply(row.t, row.t0, &x, &(fam.at(&x) * &ones))
            .unwrap();
        assert_eq!(norm, l1_norm(&transported));
        checked += 1;
    }
    assert_eq!(checked, expected);
}

#[test]
fn plot_csv_spells_minus_infinity_for_zero_norms() {
    let rows = vec![skewflow_cli::PlotRow {
        t: 1.0,
        s: 0.5,
        t0: 0.0,
        x_shift: 0.0,
        component: 1,
        norm: 0.0,
        log_norm: f64::NEG_INFINITY,
    }];
    let csv = skewflow_cli::plot_csv(&rows);
    assert!(csv.ends_with("1,0.5,0,0,1,0,-inf\n"));
}

#[test]
fn tabulated_profiles_run_at_reduced_tolerance() {
    // The quadrature-only escape hatch: axioms hold at 1e-5.
    let config = AnalysisConfig::parse(
        r#"{
            "system": {
                "example": "ses",
                "p": 1,
                "profile": {"kind": "tabulated", "knots": [[0.0, 2.0], [1.0, 1.5], [4.0, 1.0]]}
            },
            "grid": {"dt": [0.0, 0.25, 1.0, 5.0]},
            "command": "verify-axioms",
            "seed": 42
        }"#,
    )
    .unwrap();
    let report = run_config(&config).unwrap().report;
    assert!(report.passed, "axioms: {:?}", report.axioms);
    let cocycle = report.axioms.iter().find(|a| a.check == "cocycle").unwrap();
    assert_eq!(cocycle.tolerance, 1e-5);
    assert!(cocycle.max_residual() <= 1e-5);
    assert!(cocycle.max_residual() > 0.0);
}

#[test]
fn literal_t0_switch_surfaces_the_composition_failure() {
    let config = AnalysisConfig::parse(
        r#"{
            "system": {"example": "uet", "mu": 3.0, "literal_t0": true},
            "command": "verify-axioms",
            "seed": 42
        }"#,
    )
    .unwrap();
    let report = run_config(&config).unwrap().report;
    assert!(!report.passed);
    let cocycle = report.axioms.iter().find(|a| a.check == "cocycle").unwrap();
    assert!(!cocycle.passed);
    let composition = cocycle
        .residuals
        .iter()
        .find(|r| r.name == "composition")
        .unwrap();
    assert!(composition.max > 1e-3);
    // The identity axiom is untouched by the switch.
    let identity = cocycle
        .residuals
        .iter()
        .find(|r| r.name == "identity")
        .unwrap();
    assert_eq!(identity.max, 0.0);
}
