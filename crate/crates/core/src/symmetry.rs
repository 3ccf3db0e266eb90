//! Conserved quantities, invariant sectors and unreachability certificates.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::matrix::{c, commutator_norm, HermitianEigen, Isometry, SquareMatrix, C64};
use crate::spin::{materialize, ConservedLabel, ConservedOperator, HamiltonianTerm, SpinSystem};

/// Default clustering tolerance for sector eigenvalues.
pub const SECTOR_TOL: f64 = 1e-8;

/// The available control Hamiltonians together with their matrices.
#[derive(Debug, Clone)]
pub struct ControlSet {
    sys: SpinSystem,
    terms: Vec<HamiltonianTerm>,
    materialized: Vec<SquareMatrix>,
}

impl ControlSet {
    pub fn new(sys: SpinSystem, terms: Vec<HamiltonianTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("control set must not be empty".into()));
        }
        let materialized = terms
            .iter()
            .map(|t| materialize(sys, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            sys,
            terms,
            materialized,
        })
    }

    /// Every Heisenberg pair `(i, j)`, `i < j`, with coupling `j_coupling`.
    pub fn all_heisenberg_pairs(sys: SpinSystem, j_coupling: f64) -> Result<Self> {
        let n = sys.n_qubits();
        let terms = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |k| HamiltonianTerm::heisenberg(i, k, j_coupling)))
            .collect();
        Self::new(sys, terms)
    }

    pub fn sys(&self) -> SpinSystem {
        self.sys
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    pub fn matrices(&self) -> &[SquareMatrix] {
        &self.materialized
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.sys.dim()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub label: ConservedLabel,
    pub conserved: bool,
    pub max_commutator_norm: f64,
}

/// Largest `‖[H_c, Q]‖_F` over all controls.
fn max_commutator(controls: &ControlSet, q: &SquareMatrix) -> Result<(f64, Vec<f64>)> {
    let norms = controls
        .matrices()
        .iter()
        .map(|h| commutator_norm(h, q))
        .collect::<Result<Vec<_>>>()?;
    Ok((norms.iter().copied().fold(0.0, f64::max), norms))
}

/// Marks each candidate conserved iff it commutes with every control within `tol`.
pub fn conserved_check(
    controls: &ControlSet,
    candidates: &[ConservedOperator],
    tol: f64,
) -> Result<Vec<ConservationReport>> {
    candidates
        .iter()
        .map(|q| {
            ensure_dim(controls.dim(), q.matrix.dim())?;
            let (max, _) = max_commutator(controls, &q.matrix)?;
            Ok(ConservationReport {
                label: q.label.clone(),
                conserved: max <= tol,
                max_commutator_norm: max,
            })
        })
        .collect()
}

/// A simultaneous eigenspace of a commuting set of conserved operators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetrySector {
    /// One eigenvalue per conserved operator, in the order given to [`sector_decompose`].
    pub eigenvalues: Vec<f64>,
    pub isometry: Isometry,
}

impl SymmetrySector {
    pub fn dim(&self) -> usize {
        self.isometry.cols()
    }

    /// True when every eigenvalue matches `values` within `tol`.
    pub fn matches(&self, values: &[f64], tol: f64) -> bool {
        values.len() == self.eigenvalues.len()
            && self.eigenvalues.iter().zip(values).all(|(a, b)| (a - b).abs() <= tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeOptions {
    pub tol: f64,
    pub seed: u64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            tol: SECTOR_TOL,
            seed: 0,
        }
    }
}

const DECOMPOSE_ATTEMPTS: usize = 8;

/// Splits the Hilbert space of `sys` into joint eigenspaces of `conserved`.
///
/// A random real combination of the operators is diagonalized; each
/// eigenvector is labelled by its Rayleigh quotients, which are clustered per
/// operator with tolerance `tol`. The result is validated by reconstruction
/// and retried with a fresh combination if an accidental degeneracy mixed two
/// sectors. Sectors come out sorted by eigenvalue tuple, descending.
pub fn sector_decompose(
    sys: SpinSystem,
    conserved: &[ConservedOperator],
    opts: DecomposeOptions,
) -> Result<Vec<SymmetrySector>> {
    let dim = sys.dim();
    for q in conserved {
        ensure_dim(dim, q.matrix.dim())?;
        q.matrix.require_hermitian(opts.tol)?;
    }
    for (a, qa) in conserved.iter().enumerate() {
        for qb in &conserved[a + 1..] {
            let norm = commutator_norm(&qa.matrix, &qb.matrix)?;
            if norm > opts.tol {
                return Err(Error::NonCommuting {
                    first: qa.label.to_string(),
                    second: qb.label.to_string(),
                    norm,
                });
            }
        }
    }
    if conserved.is_empty() {
        let iso = Isometry::from_inner_unchecked(DMatrix::identity(dim, dim));
        return Ok(vec![SymmetrySector {
            eigenvalues: vec![],
            isometry: iso,
        }]);
    }

    let mut worst = f64::INFINITY;
    for attempt in 0..DECOMPOSE_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(attempt as u64));
        let mut mix = SquareMatrix::zeros(dim);
        for q in conserved {
            let w: f64 = rng.random_range(0.5..1.5);
            mix = mix.add(&q.matrix.scale_real(w))?;
        }
        let eig = HermitianEigen::new(&mix, 1e-8)?;
        let sectors = group_eigenvectors(&eig.vectors, conserved, opts.tol);
        let residual = reconstruction_residual(&sectors, conserved);
        if residual <= 1e-8 {
            return Ok(sectors);
        }
        worst = worst.min(residual);
    }
    Err(Error::DecompositionFailed {
        attempts: DECOMPOSE_ATTEMPTS,
        residual: worst,
    })
}

fn rayleigh(q: &SquareMatrix, v: nalgebra::DVectorView<'_, C64>) -> f64 {
    (v.adjoint() * q.inner() * v)[(0, 0)].re
}

/// Cluster sorted values; returns cluster index and mean for each input.
fn cluster(values: &[f64], tol: f64) -> (Vec<usize>, Vec<f64>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ids = vec![0; values.len()];
    let mut members: Vec<Vec<f64>> = Vec::new();
    let mut prev: Option<f64> = None;
    for &k in &order {
        let v = values[k];
        if prev.is_none_or(|p| v - p > tol) {
            members.push(Vec::new());
        }
        members.last_mut().expect("pushed").push(v);
        ids[k] = members.len() - 1;
        prev = Some(v);
    }
    let means = members
        .iter()
        .map(|m| m.iter().sum::<f64>() / m.len() as f64)
        .collect();
    (ids, means)
}

fn group_eigenvectors(
    vectors: &DMatrix<C64>,
    conserved: &[ConservedOperator],
    tol: f64,
) -> Vec<SymmetrySector> {
    let n = vectors.ncols();
    let clustered: Vec<(Vec<usize>, Vec<f64>)> = conserved
        .iter()
        .map(|q| {
            let vals: Vec<f64> = (0..n).map(|k| rayleigh(&q.matrix, vectors.column(k))).collect();
            cluster(&vals, tol)
        })
        .collect();

    let mut keys: Vec<Vec<usize>> = (0..n)
        .map(|k| clustered.iter().map(|(ids, _)| ids[k]).collect())
        .collect::<Vec<_>>();
    keys.sort();
    keys.dedup();
    // cluster ids increase with eigenvalue, so reversing the lexicographic
    // order of ids gives descending eigenvalue tuples
    keys.reverse();

    keys.into_iter()
        .map(|key| {
            let cols: Vec<usize> = (0..n)
                .filter(|&k| clustered.iter().zip(&key).all(|((ids, _), &id)| ids[k] == id))
                .collect();
            let m = DMatrix::from_fn(vectors.nrows(), cols.len(), |r, j| vectors[(r, cols[j])]);
            SymmetrySector {
                eigenvalues: clustered.iter().zip(&key).map(|((_, means), &id)| means[id]).collect(),
                isometry: Isometry::from_inner_unchecked(m),
            }
        })
        .collect()
}

fn reconstruction_residual(sectors: &[SymmetrySector], conserved: &[ConservedOperator]) -> f64 {
    let mut worst: f64 = 0.0;
    for s in sectors {
        let v = s.isometry.inner();
        for (q, &lambda) in conserved.iter().zip(&s.eigenvalues) {
            let r = q.matrix.inner() * v - v * c(lambda, 0.0);
            worst = worst.max(r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
        }
        worst = worst.max(s.isometry.orthonormality_deviation());
    }
    worst
}

/// An operator compressed to a subspace, with the norm of what escapes it.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub matrix: SquareMatrix,
    /// `‖(I − VV†)·op·V‖_F`.
    pub leakage: f64,
}

/// `V†·op·V` on the sector; never fails on leaky operators.
pub fn restrict(op: &SquareMatrix, sector: &SymmetrySector) -> Result<Restriction> {
    restrict_to(op, &sector.isometry)
}

pub fn restrict_to(op: &SquareMatrix, isometry: &Isometry) -> Result<Restriction> {
    let (matrix, leakage) = isometry.compress(op)?;
    Ok(Restriction { matrix, leakage })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Unreachable,
}

/// Proof that a target gate cannot be generated by a control set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    pub conserved_label: ConservedLabel,
    /// `‖[H_c, Q]‖_F` for each control, all within tolerance.
    pub control_commutator_norms: Vec<f64>,
    /// `‖[target, Q]‖_F`, above tolerance.
    pub target_commutator_norm: f64,
    pub tol: f64,
    pub verdict: Verdict,
}

impl ObstructionCertificate {
    pub fn is_valid(&self) -> bool {
        self.control_commutator_norms.iter().all(|&n| n <= self.tol)
            && self.target_commutator_norm > self.tol
    }
}

/// Certificate for the first candidate conserved by every control but broken by `target`.
pub fn obstruction_certificate(
    controls: &ControlSet,
    target: &SquareMatrix,
    candidates: &[ConservedOperator],
    tol: f64,
) -> Result<Option<ObstructionCertificate>> {
    Ok(obstruction_certificates(controls, target, candidates, tol)?.into_iter().next())
}

/// Certificates for every certifying candidate, in candidate order.
pub fn obstruction_certificates(
    controls: &ControlSet,
    target: &SquareMatrix,
    candidates: &[ConservedOperator],
    tol: f64,
) -> Result<Vec<ObstructionCertificate>> {
    ensure_dim(controls.dim(), target.dim())?;
    let mut out = Vec::new();
    for q in candidates {
        ensure_dim(controls.dim(), q.matrix.dim())?;
        let (max, norms) = max_commutator(controls, &q.matrix)?;
        if max > tol {
            continue;
        }
        let target_norm = commutator_norm(target, &q.matrix)?;
        if target_norm > tol {
            out.push(ObstructionCertificate {
                conserved_label: q.label.clone(),
                control_commutator_norms: norms,
                target_commutator_norm: target_norm,
                tol,
                verdict: Verdict::Unreachable,
            });
        }
    }
    Ok(out)
}
