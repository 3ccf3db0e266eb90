use std::path::{Path, PathBuf};
use std::process::Command;

use symgate::config::{ExperimentConfig, Task, Tolerances};
use symgate::runner::{execute, max_numeric_difference, run, OutputPaths, ReportEnvelope, TaskResults};
use symgate::spin::ConservedLabel;
use symgate::suite::{emit_reproduction_suite, reproduction_suite};

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn suite_config(stem: &str) -> ExperimentConfig {
    ExperimentConfig::load(&crate_dir().join(format!("configs/suite/{stem}.toml"))).unwrap()
}

#[test]
fn bundled_suite_matches_generator() {
    let suite = reproduction_suite();
    assert!(suite.len() >= 7);
    for (stem, cfg) in &suite {
        let path = crate_dir().join(format!("configs/suite/{stem}.toml"));
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(on_disk, cfg.to_toml_string().unwrap(), "{stem} is stale; re-run --emit-suite");
    }
    let dir = tempfile::tempdir().unwrap();
    let written = emit_reproduction_suite(dir.path()).unwrap();
    assert_eq!(written.len(), suite.len());
    for (stem, cfg) in &suite {
        assert_eq!(&ExperimentConfig::load(&dir.path().join(format!("{stem}.toml"))).unwrap(), cfg);
    }
}

#[test]
fn obstruction_config_certifies_sz_with_root_two() {
    let report = run(&suite_config("03_cnot_obstruction")).unwrap();
    let TaskResults::CertifyObstruction(r) = &report.results else {
        panic!("wrong payload")
    };
    let sz = r
        .certificates
        .iter()
        .find(|c| c.conserved_label == ConservedLabel::Sz)
        .expect("certificate on Sz");
    assert!((sz.target_commutator_norm - 2f64.sqrt()).abs() < 1e-10);
    assert!(sz.is_valid());
}

#[test]
fn decompose_config_lists_the_singlet() {
    let report = run(&suite_config("04_four_spin_sectors")).unwrap();
    let TaskResults::Decompose(r) = &report.results else {
        panic!("wrong payload")
    };
    assert_eq!(r.total_dim, 16);
    let singlets: Vec<_> = r.sectors.iter().filter(|s| s.eigenvalues[0].abs() < 1e-8).collect();
    assert_eq!(singlets.len(), 1);
    assert_eq!(singlets[0].dim, 2);
    assert!(r.sectors.iter().all(|s| s.max_control_leakage < 1e-10));
}

#[test]
fn desk_closure_config_is_universal_on_six_dims() {
    let report = run(&suite_config("06_desk_closure")).unwrap();
    let TaskResults::Closure(r) = &report.results else {
        panic!("wrong payload")
    };
    assert_eq!(r.sector_dim, 6);
    assert!(r.verdict.closure_dim >= 35);
}

#[test]
fn reports_round_trip_and_rerun_from_echo() {
    for (stem, _) in reproduction_suite() {
        if stem == "09_encoded_cnot" {
            continue; // exercised by the acceptance suite
        }
        let report = run(&suite_config(stem)).unwrap();
        let json = report.to_json().unwrap();
        let parsed = ReportEnvelope::from_json(&json).unwrap();
        assert_eq!(parsed, report, "{stem}");
        assert_eq!(parsed.to_json().unwrap(), json, "{stem}");

        let again = run(&parsed.config_echo).unwrap();
        let diff = max_numeric_difference(&report.results_value(), &again.results_value());
        assert!(diff.is_some_and(|d| d <= 1e-9), "{stem}: {diff:?}");
        assert_eq!(again.tolerances, report.tolerances);
        assert_eq!(again.seed, report.seed);
    }
}

#[test]
fn execute_writes_report_and_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("out/single.json");
    let report = execute(
        &suite_config("07_encoded_single_qubit"),
        &OutputPaths {
            json: Some(json.clone()),
            csv: None,
        },
    )
    .unwrap();
    let text = std::fs::read_to_string(&json).unwrap();
    assert_eq!(ReportEnvelope::from_json(&text).unwrap(), report);
    let csv = std::fs::read_to_string(json.with_extension("csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "length,best_infidelity,leakage_norm,value,restarts_used,iterations");
    assert_eq!(lines.len(), 4);
    let TaskResults::Synthesize(r) = &report.results else {
        panic!("wrong payload")
    };
    assert!(r.report.best_infidelity <= 1e-10);
    assert!(r.report.symmetry_audit <= 1e-8);
}

const NEGATIVE_CORPUS: &[(&str, i32, &str)] = &[
    ("missing_task_input", 2, "sector"),
    ("unknown_field", 3, "restart"),
    ("missing_matrix_file", 4, "conserved_files[0]"),
    ("target_dimension_mismatch", 5, "target"),
    ("non_hermitian_conserved", 6, "conserved_files[0]"),
    ("site_out_of_range", 7, "controls[1]"),
    ("overlapping_blocks", 9, "code.blocks"),
    ("bad_control_index", 12, "sequence.pattern[1]"),
];

fn load_and_prepare(path: &Path) -> symgate::Result<()> {
    ExperimentConfig::load(path)?.prepare().map(|_| ())
}

#[test]
fn negative_corpus_is_rejected_before_running() {
    let dir = crate_dir().join("configs/invalid");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            seen += 1;
            let stem = path.file_stem().unwrap().to_str().unwrap();
            let (_, code, field) = NEGATIVE_CORPUS
                .iter()
                .find(|(s, _, _)| *s == stem)
                .unwrap_or_else(|| panic!("{stem} has no expected code"));
            let err = load_and_prepare(&path).unwrap_err();
            assert_eq!(err.code(), *code, "{stem}: {err}");
            assert!(err.to_string().contains(field), "{stem}: {err}");
        }
    }
    assert_eq!(seen, NEGATIVE_CORPUS.len());
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symgate"))
}

#[test]
fn cli_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = crate_dir().join("configs/suite/04_four_spin_sectors.toml");

    let out = dir.path().join("r.json");
    let o = bin()
        .args(["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "7", "--tol", "1e-9", "--quiet"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let report = ReportEnvelope::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.task, Task::Decompose);
    assert_eq!(report.seed, 7);
    assert_eq!(report.config_echo.seed, 7);
    assert_eq!(report.tolerances, Tolerances::uniform(1e-9));

    let o = bin().args(["--config", cfg.to_str().unwrap()]).output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("task decompose"), "{text}");
    assert!(text.contains("dim 2"));

    let bad = crate_dir().join("configs/invalid/overlapping_blocks.toml");
    let o = bin().args(["--config", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(9));
    assert!(String::from_utf8_lossy(&o.stderr).contains("code.blocks"));

    let o = bin().args(["--config", "/nonexistent/config.toml"]).output().unwrap();
    assert_eq!(o.status.code(), Some(4));

    let suite_dir = dir.path().join("suite");
    let o = bin().args(["--emit-suite", suite_dir.to_str().unwrap()]).output().unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read_dir(&suite_dir).unwrap().count(), reproduction_suite().len());
}

#[test]
fn not_universal_is_still_a_completed_run() {
    let mut cfg = suite_config("06_desk_closure");
    cfg.controls.truncate(3); // exchange only
    let report = run(&cfg).unwrap();
    let TaskResults::Closure(r) = &report.results else {
        panic!("wrong payload")
    };
    assert_eq!(r.verdict.verdict, symgate::lie::Universality::NotUniversal);
}
