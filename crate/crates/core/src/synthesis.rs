//! Pulse sequences realizing an encoded gate on a code space.
//!
//! A sequence is an ordered list of `(control, duration)` pairs; pulse 0
//! acts first, so the realized unitary is `U = U_{L−1} ⋯ U_1 U_0` with
//! `U_k = exp(−i·t_k·H_{c_k})`. The objective only looks at the code block:
//!
//! ```text
//! infidelity = 1 − |Tr(T†·V†UV)| / 2^k
//! value      = infidelity + λ·‖(I − VV†)UV‖²_F
//! ```
//!
//! Gradients are exact: with `F_k = U_k⋯U_0 V` and `B_k = V†U_{L−1}⋯U_{k+1}`,
//! `∂(V†UV)/∂t_k = B_k·(−iH_{c_k})·F_k`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use argmin::core::{CostFunction, Executor, Gradient, State};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::neldermead::NelderMead;
use argmin::solver::quasinewton::LBFGS;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{leakage, LogicalCode};
use crate::error::{ensure_dim, Error, Result};
use crate::matrix::{commutator_norm, HermitianEigen, SquareMatrix, C64, I};
use crate::spin::{ConservedLabel, ConservedOperator};
use crate::symmetry::{conserved_check, ControlSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub control: usize,
    pub duration: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PulseSequence {
    pub pulses: Vec<Pulse>,
}

impl PulseSequence {
    pub fn new(pulses: Vec<Pulse>) -> Self {
        Self { pulses }
    }

    pub fn from_pattern(pattern: &[usize], durations: &[f64]) -> Result<Self> {
        if pattern.len() != durations.len() {
            return Err(Error::InvalidInput(format!(
                "pattern has {} entries but {} durations were given",
                pattern.len(),
                durations.len()
            )));
        }
        Ok(Self::new(
            pattern
                .iter()
                .zip(durations)
                .map(|(&control, &duration)| Pulse { control, duration })
                .collect(),
        ))
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn pattern(&self) -> Vec<usize> {
        self.pulses.iter().map(|p| p.control).collect()
    }

    pub fn durations(&self) -> Vec<f64> {
        self.pulses.iter().map(|p| p.duration).collect()
    }

    pub fn then(mut self, control: usize, duration: f64) -> Self {
        self.pulses.push(Pulse { control, duration });
        self
    }

    fn validate(&self, controls: &ControlSet) -> Result<()> {
        for p in &self.pulses {
            if p.control >= controls.len() {
                return Err(Error::InvalidControlIndex {
                    index: p.control,
                    available: controls.len(),
                });
            }
            if !p.duration.is_finite() {
                return Err(Error::InvalidInput("pulse duration is not finite".into()));
            }
        }
        Ok(())
    }

    /// Plain-text pulse table: index, control name, raw and reduced duration.
    pub fn to_table(&self, controls: &ControlSet) -> String {
        let periods = control_periods(controls).unwrap_or_else(|_| vec![None; controls.len()]);
        let mut out = String::from("#   control          duration        reduced\n");
        for (k, p) in self.pulses.iter().enumerate() {
            let name = controls
                .terms()
                .get(p.control)
                .map(|t| t.name())
                .unwrap_or_else(|| "?".into());
            let reduced = reduce_duration(p.duration, periods.get(p.control).copied().flatten());
            let _ = writeln!(out, "{k:<3} {name:<16} {:>+14.10} {:>+14.10}", p.duration, reduced);
        }
        out
    }
}

impl Serialize for PulseSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            pattern: Vec<usize>,
            durations: Vec<f64>,
        }
        Wire {
            pattern: self.pattern(),
            durations: self.durations(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PulseSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Wire {
            pattern: Vec<usize>,
            durations: Vec<f64>,
        }
        let w = Wire::deserialize(d)?;
        PulseSequence::from_pattern(&w.pattern, &w.durations).map_err(serde::de::Error::custom)
    }
}

/// Period of `t ↦ exp(−itH)` up to a global phase, if the spectrum is commensurate.
pub fn phase_period(eigenvalues: &[f64]) -> Option<f64> {
    let lo = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let gaps: Vec<f64> = eigenvalues.iter().map(|v| v - lo).filter(|g| *g > 1e-9).collect();
    let smallest = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    if !smallest.is_finite() {
        return None;
    }
    // Look for a common unit g/m with every gap an integer multiple of it.
    (1..=24).find_map(|m| {
        let unit = smallest / m as f64;
        gaps.iter()
            .all(|g| ((g / unit) - (g / unit).round()).abs() < 1e-7)
            .then_some(TAU / unit)
    })
}

fn reduce_duration(t: f64, period: Option<f64>) -> f64 {
    match period {
        Some(p) => {
            let r = t.rem_euclid(p);
            if r > p / 2.0 {
                r - p
            } else {
                r
            }
        }
        None => t,
    }
}

fn control_periods(controls: &ControlSet) -> Result<Vec<Option<f64>>> {
    controls
        .matrices()
        .iter()
        .map(|h| HermitianEigen::new(h, 1e-10).map(|e| phase_period(&e.values)))
        .collect()
}

/// Eigendecompositions of the controls, computed once per call.
struct Propagators {
    eig: Vec<HermitianEigen>,
    hams: Vec<DMatrix<C64>>,
}

impl Propagators {
    fn new(controls: &ControlSet) -> Result<Self> {
        Ok(Self {
            eig: controls
                .matrices()
                .iter()
                .map(|h| HermitianEigen::new(h, 1e-10))
                .collect::<Result<_>>()?,
            hams: controls.matrices().iter().map(|h| h.inner().clone()).collect(),
        })
    }

    fn step(&self, control: usize, t: f64) -> DMatrix<C64> {
        self.eig[control].evolve(t).inner().clone()
    }
}

/// Realized unitary of `seq`. Pulse 0 acts first.
pub fn apply_sequence(controls: &ControlSet, seq: &PulseSequence) -> Result<SquareMatrix> {
    seq.validate(controls)?;
    let props = Propagators::new(controls)?;
    let d = controls.dim();
    let u = seq
        .pulses
        .iter()
        .fold(DMatrix::identity(d, d), |acc, p| props.step(p.control, p.duration) * acc);
    Ok(SquareMatrix::from_inner(u))
}

/// Each prefix product `U_k⋯U_0`, for audits.
fn prefix_unitaries(controls: &ControlSet, seq: &PulseSequence) -> Result<Vec<SquareMatrix>> {
    seq.validate(controls)?;
    let props = Propagators::new(controls)?;
    let d = controls.dim();
    let mut acc = DMatrix::identity(d, d);
    let mut out = Vec::with_capacity(seq.len());
    for p in &seq.pulses {
        acc = props.step(p.control, p.duration) * acc;
        out.push(SquareMatrix::from_inner(acc.clone()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub infidelity: f64,
    pub leakage: f64,
    pub value: f64,
}

fn check_problem(controls: &ControlSet, code: &LogicalCode, target: &SquareMatrix) -> Result<()> {
    ensure_dim(controls.dim(), code.dim_physical())?;
    ensure_dim(code.dim_logical(), target.dim())
}

fn objective_of(u: &SquareMatrix, code: &LogicalCode, target: &SquareMatrix, lambda: f64) -> Result<ObjectiveValue> {
    let report = leakage(u, code, Some(target))?;
    let infidelity = (1.0 - report.subspace_fidelity.unwrap_or(0.0)).max(0.0);
    Ok(ObjectiveValue {
        infidelity,
        leakage: report.leakage_norm,
        value: infidelity + lambda * report.leakage_norm.powi(2),
    })
}

/// Phase-invariant code-block infidelity plus weighted squared leakage.
pub fn objective(
    controls: &ControlSet,
    code: &LogicalCode,
    target: &SquareMatrix,
    seq: &PulseSequence,
    lambda: f64,
) -> Result<ObjectiveValue> {
    check_problem(controls, code, target)?;
    let u = apply_sequence(controls, seq)?;
    objective_of(&u, code, target, lambda)
}

pub const DEFAULT_LEAKAGE_WEIGHT: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthesisOptions {
    /// Sequence length `L`.
    pub length: usize,
    pub restarts: usize,
    /// Iteration cap for each local solve.
    pub max_iters: u64,
    /// `λ` in `value = infidelity + λ·leakage²`.
    pub leakage_weight: f64,
    pub seed: u64,
    /// Stop launching restarts once the best value is at or below this.
    pub tol_stop: f64,
    /// Pinned control pattern, cycled to length `L`. Round-robin when absent.
    pub pattern: Option<Vec<usize>>,
    /// Restrict to nonnegative durations (`t = s²` internally).
    pub nonnegative: bool,
    /// Restarts evaluated concurrently between stopping checks.
    pub batch: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            length: 12,
            restarts: 16,
            max_iters: 400,
            leakage_weight: DEFAULT_LEAKAGE_WEIGHT,
            seed: 0,
            tol_stop: 1e-12,
            pattern: None,
            nonnegative: false,
            batch: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub best_infidelity: f64,
    pub leakage_norm: f64,
    pub value: f64,
    pub iterations: u64,
    pub restarts_used: usize,
    /// Index of the restart that produced `sequence`, when synthesized.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_restart: Option<usize>,
    pub converged: bool,
    pub sequence: PulseSequence,
    /// Durations folded into one phase period of each control, for reading.
    pub reduced_durations: Vec<f64>,
    /// Max over prefixes and audited operators of `‖[U_prefix, Q]‖_F`.
    pub symmetry_audit: f64,
    pub audited: Vec<ConservedLabel>,
    /// The objective compares only the code block; the action on the
    /// orthogonal complement is unconstrained.
    pub objective_scope: String,
}

const OBJECTIVE_SCOPE: &str = "code_block";

/// Recomputes a sequence's numbers from scratch and audits every prefix.
pub fn verify_sequence(
    controls: &ControlSet,
    code: &LogicalCode,
    target: &SquareMatrix,
    seq: &PulseSequence,
    conserved: &[ConservedOperator],
    lambda: f64,
) -> Result<SynthesisReport> {
    check_problem(controls, code, target)?;
    for q in conserved {
        ensure_dim(controls.dim(), q.matrix.dim())?;
    }
    let prefixes = prefix_unitaries(controls, seq)?;
    let mut audit: f64 = 0.0;
    for u in &prefixes {
        for q in conserved {
            audit = audit.max(commutator_norm(u, &q.matrix)?);
        }
    }
    let u = prefixes
        .last()
        .cloned()
        .unwrap_or_else(|| SquareMatrix::identity(controls.dim()));
    let obj = objective_of(&u, code, target, lambda)?;
    let periods = control_periods(controls)?;
    Ok(SynthesisReport {
        best_infidelity: obj.infidelity,
        leakage_norm: obj.leakage,
        value: obj.value,
        iterations: 0,
        restarts_used: 0,
        best_restart: None,
        converged: false,
        reduced_durations: seq
            .pulses
            .iter()
            .map(|p| reduce_duration(p.duration, periods[p.control]))
            .collect(),
        sequence: seq.clone(),
        symmetry_audit: audit,
        audited: conserved.iter().map(|q| q.label.clone()).collect(),
        objective_scope: OBJECTIVE_SCOPE.into(),
    })
}

/// Objective over the duration vector for a fixed control pattern.
#[derive(Clone)]
struct Landscape<'a> {
    props: &'a Propagators,
    pattern: Vec<usize>,
    code: DMatrix<C64>,
    code_adj: DMatrix<C64>,
    target_adj: DMatrix<C64>,
    lambda: f64,
    nonnegative: bool,
}

impl Landscape<'_> {
    fn durations(&self, params: &[f64]) -> Vec<f64> {
        if self.nonnegative {
            params.iter().map(|s| s * s).collect()
        } else {
            params.to_vec()
        }
    }

    fn evaluate(&self, params: &[f64], want_grad: bool) -> (f64, Vec<f64>) {
        let times = self.durations(params);
        let steps: Vec<DMatrix<C64>> = self
            .pattern
            .iter()
            .zip(&times)
            .map(|(&c, &t)| self.props.step(c, t))
            .collect();
        // forward[k] = U_k ⋯ U_0 V
        let mut forward = Vec::with_capacity(steps.len());
        let mut f = self.code.clone();
        for u in &steps {
            f = u * f;
            forward.push(f.clone());
        }
        let w = &self.code_adj * &f;
        let dl = w.nrows() as f64;
        let overlap = (&self.target_adj * &w).trace();
        let mag = overlap.norm();
        let kept: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        let leak_sq = (dl - kept).max(0.0);
        let value = (1.0 - mag / dl) + self.lambda * leak_sq;
        if !want_grad {
            return (value, Vec::new());
        }

        let mut grad = vec![0.0; steps.len()];
        let mut back = self.code_adj.clone(); // V† U_{L−1} ⋯ U_{k+1}
        for k in (0..steps.len()).rev() {
            let dw = &back * (&self.props.hams[self.pattern[k]] * &forward[k]) * (-I);
            let d_overlap = (&self.target_adj * &dw).trace();
            let d_mag = if mag > 1e-300 {
                (overlap.conj() * d_overlap).re / mag
            } else {
                0.0
            };
            let d_kept: f64 = 2.0 * w.iter().zip(dw.iter()).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
            let mut g = -d_mag / dl - self.lambda * d_kept;
            if self.nonnegative {
                g *= 2.0 * params[k];
            }
            grad[k] = g;
            back = &back * &steps[k];
        }
        (value, grad)
    }
}

impl CostFunction for Landscape<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        finite(p)?;
        Ok(self.evaluate(p, false).0)
    }
}

impl Gradient for Landscape<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, p: &Self::Param) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        finite(p)?;
        Ok(self.evaluate(p, true).1)
    }
}

// The line search can step to NaN near stationary points; stop the solve there.
fn finite(p: &[f64]) -> std::result::Result<(), argmin::core::Error> {
    if p.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(argmin::core::Error::msg("non-finite parameters"))
    }
}

struct LocalResult {
    params: Vec<f64>,
    value: f64,
    iterations: u64,
}

fn run_lbfgs(land: &Landscape<'_>, init: Vec<f64>, max_iters: u64, target: f64) -> Option<LocalResult> {
    let solver = LBFGS::new(MoreThuenteLineSearch::new(), 10)
        .with_tolerance_grad(1e-14)
        .ok()?
        .with_tolerance_cost(0.0)
        .ok()?;
    let res = Executor::new(land.clone(), solver)
        .configure(|s| s.param(init).max_iters(max_iters).target_cost(target))
        .run()
        .ok()?;
    let state = res.state();
    Some(LocalResult {
        params: state.get_best_param()?.clone(),
        value: state.get_best_cost(),
        iterations: state.get_iter(),
    })
}

fn run_nelder_mead(land: &Landscape<'_>, start: &[f64], max_iters: u64, target: f64) -> Option<LocalResult> {
    let mut simplex = vec![start.to_vec()];
    for k in 0..start.len() {
        let mut v = start.to_vec();
        v[k] += 0.1;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex).with_sd_tolerance(1e-15).ok()?;
    let res = Executor::new(land.clone(), solver)
        .configure(|s| s.max_iters(max_iters).target_cost(target))
        .run()
        .ok()?;
    let state = res.state();
    Some(LocalResult {
        params: state.get_best_param()?.clone(),
        value: state.get_best_cost(),
        iterations: state.get_iter(),
    })
}

/// L-BFGS from `init`; if it stalls above `target`, Nelder–Mead then a second L-BFGS pass.
fn local_search(land: &Landscape<'_>, init: Vec<f64>, max_iters: u64, target: f64) -> LocalResult {
    let mut best = LocalResult {
        value: land.evaluate(&init, false).0,
        params: init.clone(),
        iterations: 0,
    };
    let mut iterations = 0;
    let adopt = |best: &mut LocalResult, r: Option<LocalResult>, iterations: &mut u64| {
        if let Some(r) = r {
            *iterations += r.iterations;
            if r.value < best.value {
                best.params = r.params;
                best.value = r.value;
            }
        }
    };
    adopt(&mut best, run_lbfgs(land, init, max_iters, target), &mut iterations);
    if best.value > target {
        let start = best.params.clone();
        adopt(&mut best, run_nelder_mead(land, &start, max_iters * 4, target), &mut iterations);
        let start = best.params.clone();
        adopt(&mut best, run_lbfgs(land, start, max_iters, target), &mut iterations);
    }
    best.iterations = iterations;
    best
}

fn restart_pattern(opts: &SynthesisOptions, n_controls: usize, restart: usize) -> Vec<usize> {
    match &opts.pattern {
        Some(p) => (0..opts.length).map(|k| p[k % p.len()]).collect(),
        None => (0..opts.length).map(|k| (k + restart) % n_controls).collect(),
    }
}

/// Angular-momentum operators conserved by every control, used for the audit.
fn conserved_spin_ops(controls: &ControlSet) -> Result<Vec<ConservedOperator>> {
    let candidates = ConservedOperator::angular_momentum(controls.sys());
    let report = conserved_check(controls, &candidates, 1e-10)?;
    Ok(candidates
        .into_iter()
        .zip(report)
        .filter(|(_, r)| r.conserved)
        .map(|(q, _)| q)
        .collect())
}

/// Multi-start local search for a sequence acting as `target` on `code`.
///
/// Restarts run in fixed-size batches; each batch runs concurrently and the
/// best result is selected by value, then restart index, so the outcome does
/// not depend on thread scheduling.
pub fn synthesize(
    controls: &ControlSet,
    code: &LogicalCode,
    target: &SquareMatrix,
    opts: &SynthesisOptions,
) -> Result<SynthesisReport> {
    check_problem(controls, code, target)?;
    if opts.length == 0 || opts.restarts == 0 {
        return Err(Error::InvalidInput("synthesis needs length >= 1 and restarts >= 1".into()));
    }
    if let Some(p) = &opts.pattern {
        if p.is_empty() {
            return Err(Error::InvalidInput("pinned pattern is empty".into()));
        }
        if let Some(&bad) = p.iter().find(|&&c| c >= controls.len()) {
            return Err(Error::InvalidControlIndex {
                index: bad,
                available: controls.len(),
            });
        }
    }
    if !(opts.leakage_weight >= 0.0 && opts.leakage_weight.is_finite()) {
        return Err(Error::InvalidInput("leakage weight must be finite and nonnegative".into()));
    }

    let props = Propagators::new(controls)?;
    let base = Landscape {
        props: &props,
        pattern: Vec::new(),
        code: code.isometry.inner().clone(),
        code_adj: code.isometry.inner().adjoint(),
        target_adj: target.inner().adjoint(),
        lambda: opts.leakage_weight,
        nonnegative: opts.nonnegative,
    };

    let batch = opts.batch.max(1);
    let mut best: Option<(f64, usize, Vec<usize>, Vec<f64>)> = None;
    let mut iterations = 0;
    let mut used = 0;
    while used < opts.restarts {
        let upto = (used + batch).min(opts.restarts);
        let outcomes: Vec<(usize, Vec<usize>, LocalResult)> = (used..upto)
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(r as u64);
                let init: Vec<f64> = (0..opts.length)
                    .map(|_| {
                        let t: f64 = rng.random_range(0.0..TAU);
                        if opts.nonnegative {
                            t.sqrt()
                        } else {
                            t
                        }
                    })
                    .collect();
                let pattern = restart_pattern(opts, controls.len(), r);
                let land = Landscape {
                    pattern: pattern.clone(),
                    ..base.clone()
                };
                let res = local_search(&land, init, opts.max_iters, opts.tol_stop);
                (r, pattern, res)
            })
            .collect();
        used = upto;
        for (r, pattern, res) in outcomes {
            iterations += res.iterations;
            let better = match &best {
                None => true,
                Some((v, idx, _, _)) => res.value < *v || (res.value == *v && r < *idx),
            };
            if better {
                let times = base.durations(&res.params);
                best = Some((res.value, r, pattern, times));
            }
        }
        if best.as_ref().is_some_and(|b| b.0 <= opts.tol_stop) {
            break;
        }
    }

    let (value, restart, pattern, times) = best.expect("at least one restart");
    let seq = PulseSequence::from_pattern(&pattern, &times)?;
    let audit_ops = conserved_spin_ops(controls)?;
    let mut report = verify_sequence(controls, code, target, &seq, &audit_ops, opts.leakage_weight)?;
    report.iterations = iterations;
    report.restarts_used = used;
    report.best_restart = Some(restart);
    report.converged = value <= opts.tol_stop;
    Ok(report)
}
