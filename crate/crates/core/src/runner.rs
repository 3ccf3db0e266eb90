//! Runs a validated experiment config and packages the result.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Prepared, Task, Tolerances, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::lie::{universality_on_sector, Universality, UniversalityVerdict};
use crate::matrix::commutator_norm;
use crate::spin::ConservedLabel;
use crate::symmetry::{
    conserved_check, obstruction_certificates, restrict, sector_decompose, ConservationReport, DecomposeOptions,
    ObstructionCertificate, SymmetrySector,
};
use crate::synthesis::{synthesize, verify_sequence, SynthesisReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlNorms {
    pub control: String,
    /// `‖[H, Q]‖_F` for each conserved operator, in config order.
    pub norms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSymmetryResults {
    pub reports: Vec<ConservationReport>,
    pub per_control: Vec<ControlNorms>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSummary {
    pub eigenvalues: Vec<f64>,
    pub dim: usize,
    /// Largest `‖(I − P)HP‖_F` over the controls; zero when the sector is invariant.
    pub max_control_leakage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeResults {
    pub labels: Vec<ConservedLabel>,
    pub sectors: Vec<SectorSummary>,
    pub total_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateNorm {
    pub label: ConservedLabel,
    pub conserved_by_controls: bool,
    pub target_commutator_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionResults {
    pub candidates: Vec<CandidateNorm>,
    /// One certificate per certifying candidate, in candidate order.
    pub certificates: Vec<ObstructionCertificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureResults {
    pub sector_eigenvalues: Vec<f64>,
    pub sector_dim: usize,
    pub verdict: UniversalityVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub length: usize,
    pub best_infidelity: f64,
    pub leakage_norm: f64,
    pub value: f64,
    pub restarts_used: usize,
    pub iterations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesizeResults {
    pub report: SynthesisReport,
    /// Universality of the sector holding the code, when conserved operators were given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enclosing_sector: Option<ClosureResults>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyResults {
    pub report: SynthesisReport,
    pub audit_passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaskResults {
    CheckSymmetry(CheckSymmetryResults),
    Decompose(DecomposeResults),
    CertifyObstruction(ObstructionResults),
    Closure(ClosureResults),
    Synthesize(SynthesizeResults),
    Verify(VerifyResults),
}

impl TaskResults {
    pub fn task(&self) -> Task {
        match self {
            TaskResults::CheckSymmetry(_) => Task::CheckSymmetry,
            TaskResults::Decompose(_) => Task::Decompose,
            TaskResults::CertifyObstruction(_) => Task::CertifyObstruction,
            TaskResults::Closure(_) => Task::Closure,
            TaskResults::Synthesize(_) => Task::Synthesize,
            TaskResults::Verify(_) => Task::Verify,
        }
    }

    fn to_value(&self) -> serde_json::Result<serde_json::Value> {
        match self {
            TaskResults::CheckSymmetry(r) => serde_json::to_value(r),
            TaskResults::Decompose(r) => serde_json::to_value(r),
            TaskResults::CertifyObstruction(r) => serde_json::to_value(r),
            TaskResults::Closure(r) => serde_json::to_value(r),
            TaskResults::Synthesize(r) => serde_json::to_value(r),
            TaskResults::Verify(r) => serde_json::to_value(r),
        }
    }

    fn from_value(task: Task, v: serde_json::Value) -> serde_json::Result<Self> {
        Ok(match task {
            Task::CheckSymmetry => TaskResults::CheckSymmetry(serde_json::from_value(v)?),
            Task::Decompose => TaskResults::Decompose(serde_json::from_value(v)?),
            Task::CertifyObstruction => TaskResults::CertifyObstruction(serde_json::from_value(v)?),
            Task::Closure => TaskResults::Closure(serde_json::from_value(v)?),
            Task::Synthesize => TaskResults::Synthesize(serde_json::from_value(v)?),
            Task::Verify => TaskResults::Verify(serde_json::from_value(v)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub symgate: String,
    pub schema: u32,
}

impl Default for Versions {
    fn default() -> Self {
        Self {
            symgate: env!("CARGO_PKG_VERSION").into(),
            schema: SCHEMA_VERSION,
        }
    }
}

/// The JSON report. `config_echo` holds the fully defaulted config, so it
/// can be fed back to [`run`] to reproduce `results`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportEnvelope {
    pub schema_version: u32,
    pub task: Task,
    pub config_echo: ExperimentConfig,
    pub results: TaskResults,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub warnings: Vec<String>,
    pub versions: Versions,
    pub wall_time_seconds: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvelopeWire {
    schema_version: u32,
    task: Task,
    config_echo: ExperimentConfig,
    results: serde_json::Value,
    seed: u64,
    tolerances: Tolerances,
    warnings: Vec<String>,
    versions: Versions,
    wall_time_seconds: f64,
}

impl Serialize for ReportEnvelope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EnvelopeWire {
            schema_version: self.schema_version,
            task: self.task,
            config_echo: self.config_echo.clone(),
            results: self.results.to_value().map_err(serde::ser::Error::custom)?,
            seed: self.seed,
            tolerances: self.tolerances,
            warnings: self.warnings.clone(),
            versions: self.versions.clone(),
            wall_time_seconds: self.wall_time_seconds,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ReportEnvelope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = EnvelopeWire::deserialize(d)?;
        Ok(ReportEnvelope {
            schema_version: w.schema_version,
            task: w.task,
            results: TaskResults::from_value(w.task, w.results).map_err(serde::de::Error::custom)?,
            config_echo: w.config_echo,
            seed: w.seed,
            tolerances: w.tolerances,
            warnings: w.warnings,
            versions: w.versions,
            wall_time_seconds: w.wall_time_seconds,
        })
    }
}

impl ReportEnvelope {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidInput(format!("cannot serialize report: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: "report".into(),
            message: e.to_string(),
        })
    }

    /// `results` as a plain JSON tree, for generic comparisons.
    pub fn results_value(&self) -> serde_json::Value {
        self.results.to_value().unwrap_or(serde_json::Value::Null)
    }
}

/// Validates `config`, dispatches its task and returns the report.
///
/// Completed analyses succeed whatever their verdict; only invalid input fails.
pub fn run(config: &ExperimentConfig) -> Result<ReportEnvelope> {
    let start = Instant::now();
    let prepared = config.prepare()?;
    let mut warnings = Vec::new();
    let results = match config.task {
        Task::CheckSymmetry => TaskResults::CheckSymmetry(check_symmetry(config, &prepared)?),
        Task::Decompose => TaskResults::Decompose(decompose(config, &prepared)?),
        Task::CertifyObstruction => TaskResults::CertifyObstruction(certify(config, &prepared)?),
        Task::Closure => TaskResults::Closure(closure(config, &prepared)?),
        Task::Synthesize => TaskResults::Synthesize(synthesize_task(config, &prepared, &mut warnings)?),
        Task::Verify => TaskResults::Verify(verify_task(config, &prepared)?),
    };
    Ok(ReportEnvelope {
        schema_version: SCHEMA_VERSION,
        task: config.task,
        config_echo: config.clone(),
        results,
        seed: config.seed,
        tolerances: config.tolerances,
        warnings,
        versions: Versions::default(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

fn check_symmetry(config: &ExperimentConfig, p: &Prepared) -> Result<CheckSymmetryResults> {
    let reports = conserved_check(&p.controls, &p.conserved, config.tolerances.commutation)?;
    let per_control = p
        .controls
        .terms()
        .iter()
        .zip(p.controls.matrices())
        .map(|(term, h)| {
            Ok(ControlNorms {
                control: term.name(),
                norms: p
                    .conserved
                    .iter()
                    .map(|q| commutator_norm(h, &q.matrix))
                    .collect::<Result<_>>()?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CheckSymmetryResults { reports, per_control })
}

fn decompose_sectors(config: &ExperimentConfig, p: &Prepared) -> Result<Vec<SymmetrySector>> {
    sector_decompose(
        p.sys,
        &p.conserved,
        DecomposeOptions {
            tol: config.tolerances.sector,
            seed: config.seed,
        },
    )
    .map_err(|e| e.at("conserved"))
}

fn decompose(config: &ExperimentConfig, p: &Prepared) -> Result<DecomposeResults> {
    let sectors = decompose_sectors(config, p)?;
    let summaries = sectors
        .iter()
        .map(|s| {
            let mut leak: f64 = 0.0;
            for h in p.controls.matrices() {
                leak = leak.max(restrict(h, s)?.leakage);
            }
            Ok(SectorSummary {
                eigenvalues: s.eigenvalues.clone(),
                dim: s.dim(),
                max_control_leakage: leak,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecomposeResults {
        labels: p.conserved.iter().map(|q| q.label.clone()).collect(),
        total_dim: summaries.iter().map(|s| s.dim).sum(),
        sectors: summaries,
    })
}

fn certify(config: &ExperimentConfig, p: &Prepared) -> Result<ObstructionResults> {
    let target = p.target.as_ref().expect("validated");
    let tol = config.tolerances.commutation;
    let checks = conserved_check(&p.controls, &p.conserved, tol)?;
    let candidates = p
        .conserved
        .iter()
        .zip(checks)
        .map(|(q, c)| {
            Ok(CandidateNorm {
                label: q.label.clone(),
                conserved_by_controls: c.conserved,
                target_commutator_norm: commutator_norm(target, &q.matrix)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ObstructionResults {
        candidates,
        certificates: obstruction_certificates(&p.controls, target, &p.conserved, tol)?,
    })
}

fn closure_on(config: &ExperimentConfig, p: &Prepared, sector: &SymmetrySector) -> Result<ClosureResults> {
    let (verdict, _) = universality_on_sector(&p.controls, sector, config.tolerances.closure)?;
    Ok(ClosureResults {
        sector_eigenvalues: sector.eigenvalues.clone(),
        sector_dim: sector.dim(),
        verdict,
    })
}

fn closure(config: &ExperimentConfig, p: &Prepared) -> Result<ClosureResults> {
    let wanted = &config.sector.as_ref().expect("validated").eigenvalues;
    let sectors = decompose_sectors(config, p)?;
    let sector = sectors
        .iter()
        .find(|s| s.matches(wanted, 1e-6))
        .ok_or_else(|| {
            let have: Vec<_> = sectors.iter().map(|s| s.eigenvalues.clone()).collect();
            Error::config("sector.eigenvalues", format!("no sector {wanted:?}; available {have:?}"))
        })?;
    closure_on(config, p, sector)
}

fn synthesize_task(config: &ExperimentConfig, p: &Prepared, warnings: &mut Vec<String>) -> Result<SynthesizeResults> {
    let code = p.code.as_ref().expect("validated");
    let target = p.target.as_ref().expect("validated");

    let mut enclosing = None;
    if !p.conserved.is_empty() {
        let sectors = decompose_sectors(config, p)?;
        let k = code.dim_logical() as f64;
        let holder = sectors.iter().find(|s| {
            let overlap = s.isometry.inner().adjoint() * code.isometry.inner();
            (overlap.norm_squared() - k).abs() < 1e-8
        });
        match holder {
            Some(s) => {
                let c = closure_on(config, p, s)?;
                if c.verdict.verdict == Universality::NotUniversal {
                    warnings.push(format!(
                        "controls are not universal on the sector holding the code (closure_dim {} of {})",
                        c.verdict.closure_dim, c.verdict.full_unitary_dim
                    ));
                }
                enclosing = Some(c);
            }
            None => warnings.push("code is not contained in a single symmetry sector".into()),
        }
    }

    let opts = config.synthesis.options(config.seed);
    let report = synthesize(&p.controls, code, target, &opts)?;
    if !report.converged {
        warnings.push(format!(
            "synthesis stopped above tol_stop: value {:.3e} > {:.3e}",
            report.value, opts.tol_stop
        ));
    }
    let mut sweep = Vec::new();
    if let Some(sw) = &config.sweep {
        for &length in &sw.lengths {
            let r = synthesize(&p.controls, code, target, &crate::synthesis::SynthesisOptions { length, ..opts.clone() })?;
            sweep.push(SweepRow {
                length,
                best_infidelity: r.best_infidelity,
                leakage_norm: r.leakage_norm,
                value: r.value,
                restarts_used: r.restarts_used,
                iterations: r.iterations,
            });
        }
    }
    Ok(SynthesizeResults {
        report,
        enclosing_sector: enclosing,
        sweep,
    })
}

fn verify_task(config: &ExperimentConfig, p: &Prepared) -> Result<VerifyResults> {
    let report = verify_sequence(
        &p.controls,
        p.code.as_ref().expect("validated"),
        p.target.as_ref().expect("validated"),
        config.sequence.as_ref().expect("validated"),
        &p.conserved,
        config.synthesis.leakage_weight,
    )?;
    Ok(VerifyResults {
        audit_passed: report.symmetry_audit <= config.tolerances.audit,
        report,
    })
}

/// Human-readable digest of a report.
pub fn summary(report: &ReportEnvelope) -> String {
    let mut out = String::new();
    let cfg = &report.config_echo;
    let _ = writeln!(
        out,
        "task {} | n_qubits {} | {} controls | seed {}",
        report.task.as_str(),
        cfg.system.n_qubits,
        cfg.controls.len(),
        report.seed
    );
    if let Some(d) = &cfg.description {
        let _ = writeln!(out, "{d}");
    }
    match &report.results {
        TaskResults::CheckSymmetry(r) => {
            for c in &r.reports {
                let _ = writeln!(
                    out,
                    "  {:<10} {:<13} max ‖[H,Q]‖ = {:.3e}",
                    c.label.to_string(),
                    if c.conserved { "conserved" } else { "not conserved" },
                    c.max_commutator_norm
                );
            }
        }
        TaskResults::Decompose(r) => {
            let labels: Vec<String> = r.labels.iter().map(|l| l.to_string()).collect();
            let _ = writeln!(out, "  {} sectors of ({}) covering dim {}", r.sectors.len(), labels.join(", "), r.total_dim);
            for s in &r.sectors {
                let vals: Vec<String> = s.eigenvalues.iter().map(|&v| format!("{:+.4}", clean(v))).collect();
                let _ = writeln!(out, "  ({})  dim {:<3} control leakage {:.1e}", vals.join(", "), s.dim, s.max_control_leakage);
            }
        }
        TaskResults::CertifyObstruction(r) => {
            for c in &r.candidates {
                let _ = writeln!(
                    out,
                    "  {:<10} conserved by controls: {:<5}  ‖[T,Q]‖ = {:.6}",
                    c.label.to_string(),
                    c.conserved_by_controls,
                    c.target_commutator_norm
                );
            }
            if r.certificates.is_empty() {
                let _ = writeln!(out, "  no obstruction certified");
            } else {
                let labels: Vec<String> = r.certificates.iter().map(|c| c.conserved_label.to_string()).collect();
                let _ = writeln!(out, "  target unreachable, certified by {}", labels.join(", "));
            }
        }
        TaskResults::Closure(r) => write_closure(&mut out, r),
        TaskResults::Synthesize(r) => {
            if let Some(c) = &r.enclosing_sector {
                write_closure(&mut out, c);
            }
            write_synthesis(&mut out, &r.report, cfg);
            if !r.sweep.is_empty() {
                let _ = writeln!(out, "  sweep:");
                for row in &r.sweep {
                    let _ = writeln!(out, "    L={:<3} infidelity {:.3e} leakage {:.3e}", row.length, row.best_infidelity, row.leakage_norm);
                }
            }
        }
        TaskResults::Verify(r) => {
            write_synthesis(&mut out, &r.report, cfg);
            let _ = writeln!(out, "  audit {}", if r.audit_passed { "passed" } else { "FAILED" });
        }
    }
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    let _ = writeln!(out, "wall time {:.2} s", report.wall_time_seconds);
    out
}

// Keeps roundoff-sized values from printing as -0.0000.
fn clean(v: f64) -> f64 {
    if v.abs() < 1e-12 {
        0.0
    } else {
        v
    }
}

fn write_closure(out: &mut String, r: &ClosureResults) {
    let v = &r.verdict;
    let vals: Vec<String> = r.sector_eigenvalues.iter().map(|&x| format!("{:.4}", clean(x))).collect();
    let _ = writeln!(
        out,
        "  sector ({}) dim {}: closure_dim {} of {} ({} traceless), {:?}",
        vals.join(", "),
        r.sector_dim,
        v.closure_dim,
        v.full_unitary_dim,
        v.traceless_dim,
        v.verdict
    );
}

fn write_synthesis(out: &mut String, r: &SynthesisReport, cfg: &ExperimentConfig) {
    let _ = writeln!(
        out,
        "  infidelity {:.3e}  leakage {:.3e}  value {:.3e}  audit {:.1e}",
        r.best_infidelity, r.leakage_norm, r.value, r.symmetry_audit
    );
    if r.restarts_used > 0 {
        let _ = writeln!(
            out,
            "  restarts {}  iterations {}  converged {}",
            r.restarts_used, r.iterations, r.converged
        );
    }
    if let Ok(p) = cfg.prepare() {
        for line in r.sequence.to_table(&p.controls).lines() {
            let _ = writeln!(out, "  {line}");
        }
    }
}

/// Sweep rows as CSV with a header line.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("length,best_infidelity,leakage_norm,value,restarts_used,iterations\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:e},{:e},{:e},{},{}",
            r.length, r.best_infidelity, r.leakage_norm, r.value, r.restarts_used, r.iterations
        );
    }
    out
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, Default)]
pub struct OutputPaths {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

/// [`run`], then writes the JSON report and any sweep CSV.
///
/// Paths default to the config's `[output]` section. With a JSON path but no
/// CSV path, a sweep lands next to the report with a `.csv` extension.
pub fn execute(config: &ExperimentConfig, out: &OutputPaths) -> Result<ReportEnvelope> {
    let report = run(config)?;
    let json = out.json.clone().or_else(|| config.output.json.clone());
    if let Some(path) = &json {
        write_file(path, &report.to_json()?)?;
    }
    if let TaskResults::Synthesize(r) = &report.results {
        if !r.sweep.is_empty() {
            let csv = out
                .csv
                .clone()
                .or_else(|| config.output.csv.clone())
                .or_else(|| json.as_ref().map(|p| p.with_extension("csv")));
            if let Some(path) = csv {
                write_file(&path, &sweep_csv(&r.sweep))?;
            }
        }
    }
    Ok(report)
}

/// Largest absolute difference between numbers at matching positions of two
/// JSON trees; `None` when their shapes or non-numeric leaves differ.
pub fn max_numeric_difference(a: &serde_json::Value, b: &serde_json::Value) -> Option<f64> {
    use serde_json::Value;
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => Some((x.as_f64()? - y.as_f64()?).abs()),
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => x
            .iter()
            .zip(y)
            .try_fold(0.0_f64, |m, (p, q)| Some(m.max(max_numeric_difference(p, q)?))),
        (Value::Object(x), Value::Object(y)) if x.len() == y.len() => x.iter().try_fold(0.0_f64, |m, (k, p)| {
            Some(m.max(max_numeric_difference(p, y.get(k)?)?))
        }),
        _ => (a == b).then_some(0.0),
    }
}
