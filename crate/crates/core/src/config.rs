//! Experiment configuration documents (TOML) and their validation.
//!
//! A config names one task plus the system, controls, candidate conserved
//! operators, code and target it needs. [`ExperimentConfig::prepare`]
//! materializes and checks everything before any analysis runs; errors carry
//! the offending field via [`Error::AtField`].

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::encoding::{code_four_qubit, code_three_qubit, code_two_qubit, compose_codes, gates, LogicalCode, Provenance};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::spin::{cnot, pauli_on_site, swap, Axis, ConservedLabel, ConservedOperator, HamiltonianTerm, SpinSystem};
use crate::symmetry::ControlSet;
use crate::synthesis::{PulseSequence, SynthesisOptions};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    CheckSymmetry,
    Decompose,
    CertifyObstruction,
    Closure,
    Synthesize,
    Verify,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::CheckSymmetry => "check-symmetry",
            Task::Decompose => "decompose",
            Task::CertifyObstruction => "certify-obstruction",
            Task::Closure => "closure",
            Task::Synthesize => "synthesize",
            Task::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub n_qubits: usize,
}

/// A custom conserved operator read from a matrix file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub label: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSection {
    /// Code placed on every block; inferred from the block size when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub blocks: Vec<Vec<usize>>,
}

/// Either a named gate or a matrix file. Physical for `certify-obstruction`,
/// logical for `synthesize` and `verify`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    /// Physical qubits a named gate acts on (physical targets only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorSection {
    /// One eigenvalue per entry of the conserved list, in order.
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Commutator norm below which an operator counts as conserved.
    pub commutation: f64,
    /// Eigenvalue clustering and reconstruction in sector decomposition.
    pub sector: f64,
    /// Gram–Schmidt residual and leakage bound in Lie closure.
    pub closure: f64,
    /// Prefix symmetry audit bound used for the summary verdict.
    pub audit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            commutation: 1e-10,
            sector: crate::symmetry::SECTOR_TOL,
            closure: crate::lie::CLOSURE_TOL,
            audit: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Self {
            commutation: tol,
            sector: tol,
            closure: tol,
            audit: tol,
        }
    }
}

/// Synthesis options minus the seed, which lives at the top level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthesisSection {
    pub length: usize,
    pub restarts: usize,
    pub max_iters: u64,
    pub leakage_weight: f64,
    pub tol_stop: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Vec<usize>>,
    pub nonnegative: bool,
    pub batch: usize,
}

impl Default for SynthesisSection {
    fn default() -> Self {
        let d = SynthesisOptions::default();
        Self {
            length: d.length,
            restarts: d.restarts,
            max_iters: d.max_iters,
            leakage_weight: d.leakage_weight,
            tol_stop: d.tol_stop,
            pattern: d.pattern,
            nonnegative: d.nonnegative,
            batch: d.batch,
        }
    }
}

impl SynthesisSection {
    pub fn options(&self, seed: u64) -> SynthesisOptions {
        SynthesisOptions {
            length: self.length,
            restarts: self.restarts,
            max_iters: self.max_iters,
            leakage_weight: self.leakage_weight,
            seed,
            tol_stop: self.tol_stop,
            pattern: self.pattern.clone(),
            nonnegative: self.nonnegative,
            batch: self.batch,
        }
    }
}

/// Extra synthesis runs at other sequence lengths, reported as CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub lengths: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

impl OutputSection {
    pub fn is_empty(&self) -> bool {
        self.json.is_none() && self.csv.is_none()
    }
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub task: Task,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub system: SystemSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub conserved: Vec<ConservedLabel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conserved_files: Vec<MatrixFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector: Option<SectorSection>,
    #[serde(default)]
    pub synthesis: SynthesisSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<PulseSequence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "OutputSection::is_empty")]
    pub output: OutputSection,
    pub controls: Vec<HamiltonianTerm>,
}

/// Everything a task needs, materialized and checked.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub sys: SpinSystem,
    pub controls: ControlSet,
    pub conserved: Vec<ConservedOperator>,
    pub code: Option<LogicalCode>,
    pub target: Option<SquareMatrix>,
}

impl ExperimentConfig {
    /// Parses a TOML document. Relative file references resolve against `base_dir`.
    pub fn from_toml_str(text: &str, origin: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.into(),
            message: e.message().to_string(),
        })?;
        if let Some(base) = base_dir {
            cfg.resolve_paths(base);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text, &path.display().to_string(), path.parent())
    }

    /// Parses a config echoed inside a JSON report.
    pub fn from_json_value(value: &serde_json::Value) -> Result<Self> {
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse {
            path: "config_echo".into(),
            message: e.to_string(),
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidInput(format!("cannot serialize config: {e}")))
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for f in &mut self.conserved_files {
            fix(&mut f.path);
        }
        if let Some(t) = &mut self.target {
            if let Some(f) = &mut t.file {
                fix(f);
            }
        }
        if let Some(p) = &mut self.output.json {
            fix(p);
        }
        if let Some(p) = &mut self.output.csv {
            fix(p);
        }
    }

    /// Validates the document and materializes its operators.
    pub fn prepare(&self) -> Result<Prepared> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        let tol = &self.tolerances;
        for (name, v) in [
            ("commutation", tol.commutation),
            ("sector", tol.sector),
            ("closure", tol.closure),
            ("audit", tol.audit),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("tolerances.{name}"), "must be a positive finite number"));
            }
        }
        let sys = SpinSystem::new(self.system.n_qubits).map_err(|e| e.at("system.n_qubits"))?;
        if self.controls.is_empty() {
            return Err(Error::config("controls", "at least one control term is required"));
        }
        for (i, term) in self.controls.iter().enumerate() {
            term.validate(sys).map_err(|e| e.at(format!("controls[{i}]")))?;
        }
        let controls = ControlSet::new(sys, self.controls.clone()).map_err(|e| e.at("controls"))?;
        let conserved = self.conserved_operators(sys)?;
        let code = self.code.as_ref().map(|c| build_code(c, sys)).transpose()?;
        let target = self.build_target(sys, code.as_ref())?;
        if let Some(seq) = &self.sequence {
            for (i, p) in seq.pulses.iter().enumerate() {
                if p.control >= controls.len() {
                    return Err(Error::InvalidControlIndex {
                        index: p.control,
                        available: controls.len(),
                    }
                    .at(format!("sequence.pattern[{i}]")));
                }
            }
        }
        self.check_task_requirements(&conserved, code.as_ref(), target.as_ref(), &controls)?;
        Ok(Prepared {
            sys,
            controls,
            conserved,
            code,
            target,
        })
    }

    fn conserved_operators(&self, sys: SpinSystem) -> Result<Vec<ConservedOperator>> {
        let mut out = Vec::new();
        for (i, label) in self.conserved.iter().enumerate() {
            let op = ConservedOperator::named(sys, label).ok_or_else(|| {
                Error::config(format!("conserved[{i}]"), "custom operators go in conserved_files")
            })?;
            out.push(op);
        }
        for (i, f) in self.conserved_files.iter().enumerate() {
            let field = format!("conserved_files[{i}]");
            let m = read_matrix(&f.path).map_err(|e| e.at(&field))?;
            if m.dim() != sys.dim() {
                return Err(Error::DimensionMismatch {
                    expected: sys.dim(),
                    found: m.dim(),
                }
                .at(&field));
            }
            out.push(ConservedOperator::custom(f.label.clone(), m).map_err(|e| e.at(&field))?);
        }
        Ok(out)
    }

    fn build_target(&self, sys: SpinSystem, code: Option<&LogicalCode>) -> Result<Option<SquareMatrix>> {
        let Some(t) = &self.target else {
            return Ok(None);
        };
        let physical = self.task == Task::CertifyObstruction;
        let dim = match (physical, code) {
            (true, _) => sys.dim(),
            (false, Some(c)) => c.dim_logical(),
            (false, None) => return Err(Error::config("code", "a logical target needs a code")),
        };
        let m = match (&t.gate, &t.file) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(Error::config("target", "give exactly one of `gate` or `file`"));
            }
            (None, Some(path)) => read_matrix(path).map_err(|e| e.at("target.file"))?,
            (Some(name), None) if physical => {
                physical_gate(sys, name, t.qubits.as_deref()).map_err(|e| e.at("target"))?
            }
            (Some(name), None) => {
                if t.qubits.is_some() {
                    return Err(Error::config("target.qubits", "only used for physical targets"));
                }
                let k = dim.trailing_zeros() as usize;
                gates::by_name(name, k).ok_or_else(|| {
                    Error::config("target.gate", format!("no {k}-qubit gate named `{name}`"))
                })?
            }
        };
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.dim(),
            }
            .at("target"));
        }
        if m.unitarity_deviation() > 1e-8 {
            return Err(Error::config("target", "target matrix is not unitary"));
        }
        Ok(Some(m))
    }

    fn check_task_requirements(
        &self,
        conserved: &[ConservedOperator],
        code: Option<&LogicalCode>,
        target: Option<&SquareMatrix>,
        controls: &ControlSet,
    ) -> Result<()> {
        let need = |ok: bool, field: &str, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::config(field, format!("task `{}` needs {what}", self.task.as_str())))
            }
        };
        match self.task {
            Task::CheckSymmetry | Task::Decompose => need(!conserved.is_empty(), "conserved", "conserved operators"),
            Task::CertifyObstruction => {
                need(!conserved.is_empty(), "conserved", "candidate conserved operators")?;
                need(target.is_some(), "target", "a target gate")
            }
            Task::Closure => {
                need(!conserved.is_empty(), "conserved", "conserved operators")?;
                let sector = self.sector.as_ref();
                need(sector.is_some(), "sector", "a sector selection")?;
                let n = sector.map_or(0, |s| s.eigenvalues.len());
                if n != conserved.len() {
                    return Err(Error::config(
                        "sector.eigenvalues",
                        format!("{n} values for {} conserved operators", conserved.len()),
                    ));
                }
                Ok(())
            }
            Task::Synthesize => {
                need(code.is_some(), "code", "a code")?;
                need(target.is_some(), "target", "a logical target gate")?;
                let s = &self.synthesis;
                if s.length == 0 || s.restarts == 0 || s.batch == 0 {
                    return Err(Error::config("synthesis", "length, restarts and batch must be >= 1"));
                }
                if let Some(p) = &s.pattern {
                    if p.is_empty() {
                        return Err(Error::config("synthesis.pattern", "pattern is empty"));
                    }
                    if let Some(i) = p.iter().position(|&c| c >= controls.len()) {
                        return Err(Error::InvalidControlIndex {
                            index: p[i],
                            available: controls.len(),
                        }
                        .at(format!("synthesis.pattern[{i}]")));
                    }
                }
                if let Some(sw) = &self.sweep {
                    if sw.lengths.contains(&0) {
                        return Err(Error::config("sweep.lengths", "lengths must be >= 1"));
                    }
                }
                Ok(())
            }
            Task::Verify => {
                need(code.is_some(), "code", "a code")?;
                need(target.is_some(), "target", "a logical target gate")?;
                need(self.sequence.is_some(), "sequence", "a pulse sequence")
            }
        }
    }
}

fn read_matrix(path: &Path) -> Result<SquareMatrix> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn physical_gate(sys: SpinSystem, name: &str, qubits: Option<&[usize]>) -> Result<SquareMatrix> {
    let name = name.to_ascii_lowercase();
    let two = |default: [usize; 2]| -> Result<[usize; 2]> {
        match qubits {
            None => Ok(default),
            Some(&[a, b]) => Ok([a, b]),
            Some(q) => Err(Error::InvalidInput(format!("`{name}` acts on 2 qubits, got {}", q.len()))),
        }
    };
    let one = || -> Result<usize> {
        match qubits {
            None => Ok(0),
            Some(&[a]) => Ok(a),
            Some(q) => Err(Error::InvalidInput(format!("`{name}` acts on 1 qubit, got {}", q.len()))),
        }
    };
    match name.as_str() {
        "cnot" | "cx" => {
            let [a, b] = two([0, 1])?;
            cnot(sys, a, b)
        }
        "swap" => {
            let [a, b] = two([0, 1])?;
            swap(sys, a, b)
        }
        "cz" => {
            let [a, b] = two([0, 1])?;
            sys.check_site(a)?;
            sys.check_site(b)?;
            let (ma, mb) = (sys.bit(a), sys.bit(b));
            let diag: Vec<f64> = (0..sys.dim())
                .map(|i| if i & ma != 0 && i & mb != 0 { -1.0 } else { 1.0 })
                .collect();
            Ok(SquareMatrix::from_real_diagonal(&diag))
        }
        "x" | "y" | "z" => pauli_on_site(sys, one()?, Axis::from_char(name.chars().next().unwrap_or('?')).expect("axis")),
        "h" | "hadamard" => {
            let q = one()?;
            pauli_on_site(sys, q, Axis::X)?
                .add(&pauli_on_site(sys, q, Axis::Z)?)
                .map(|m| m.scale_real(std::f64::consts::FRAC_1_SQRT_2))
        }
        "identity" | "i" => Ok(SquareMatrix::identity(sys.dim())),
        _ => Err(Error::InvalidInput(format!("unknown physical gate `{name}`"))),
    }
}

fn build_code(section: &CodeSection, sys: SpinSystem) -> Result<LogicalCode> {
    if section.blocks.is_empty() {
        return Err(Error::config("code.blocks", "at least one block is required"));
    }
    let mut seen = Vec::new();
    for (b, block) in section.blocks.iter().enumerate() {
        for &q in block {
            sys.check_site(q).map_err(|e| e.at(format!("code.blocks[{b}]")))?;
            if seen.contains(&q) {
                return Err(Error::InvalidCode(format!("blocks overlap on qubit {q}")).at("code.blocks"));
            }
            seen.push(q);
        }
    }
    let mut codes = Vec::new();
    for (b, block) in section.blocks.iter().enumerate() {
        let field = format!("code.blocks[{b}]");
        let kind = match (section.provenance, block.len()) {
            (Some(p), _) => p,
            (None, 2) => Provenance::TwoQubit,
            (None, 3) => Provenance::ThreeQubit,
            (None, 4) => Provenance::FourQubit,
            (None, n) => {
                return Err(Error::InvalidCode(format!("no built-in code on {n} qubits")).at(field));
            }
        };
        let code = match (kind, block.as_slice()) {
            (Provenance::TwoQubit, &[i, j]) => code_two_qubit(i, j, sys),
            (Provenance::ThreeQubit, q) if q.len() == 3 => {
                code_three_qubit(SpinSystem::new(3)?).and_then(|c| c.relocate(sys, q))
            }
            (Provenance::FourQubit, q) if q.len() == 4 => {
                code_four_qubit(SpinSystem::new(4)?).and_then(|c| c.relocate(sys, q))
            }
            (Provenance::Custom, _) => Err(Error::InvalidCode("custom codes cannot be built from blocks".into())),
            (p, q) => Err(Error::InvalidCode(format!("{p:?} code cannot sit on {} qubits", q.len()))),
        }
        .map_err(|e| e.at(&field))?;
        codes.push(code);
    }
    if codes.len() == 1 {
        // Qubits outside a lone block stay in |0⟩.
        return Ok(codes.remove(0));
    }
    compose_codes(&codes, sys).map_err(|e| e.at("code.blocks"))
}
