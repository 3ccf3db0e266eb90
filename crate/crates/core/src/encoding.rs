//! Logical codes living inside invariant subspaces.
//!
//! A code is an isometry from the `2^k` logical space into the `2^n`
//! physical space. Logical labels are bit strings with logical qubit 0 most
//! significant, matching the physical convention in [`crate::spin`].

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::matrix::{c, HermitianEigen, Isometry, SquareMatrix, C64};
use crate::spin::{
    materialize, total_spin_component, total_spin_squared, Axis, HamiltonianTerm, SpinSystem,
};
use crate::symmetry::{sector_decompose, DecomposeOptions, SymmetrySector};

const ISOMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    TwoQubit,
    ThreeQubit,
    FourQubit,
    Custom,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogicalCode {
    pub n_physical: usize,
    pub k_logical: usize,
    /// `2^n × 2^k`, columns are the codewords in label order.
    pub isometry: Isometry,
    pub codeword_labels: Vec<String>,
    pub provenance: Provenance,
    /// Physical qubits of each logical block, in logical-qubit order.
    pub blocks: Vec<Vec<usize>>,
    /// True when degenerate-sector codewords were fixed by the exchange-eigenbasis gauge.
    pub gauge_fixed: bool,
}

fn logical_labels(k: usize) -> Vec<String> {
    (0..1usize << k).map(|b| format!("{b:0k$b}")).collect()
}

impl LogicalCode {
    pub fn dim_logical(&self) -> usize {
        1 << self.k_logical
    }

    pub fn dim_physical(&self) -> usize {
        1 << self.n_physical
    }

    pub fn codeword(&self, index: usize) -> Vec<C64> {
        self.isometry.column(index)
    }

    /// Physical qubits touched by the code.
    pub fn support(&self) -> Vec<usize> {
        self.blocks.iter().flatten().copied().collect()
    }

    /// `V·gate·V†`: the logical operator written on the physical space.
    pub fn embed(&self, logical_gate: &SquareMatrix) -> Result<SquareMatrix> {
        self.isometry.embed(logical_gate)
    }

    /// Isometry on the code's own support, rows indexed by support bits in block order.
    ///
    /// Fails when a codeword has weight on a configuration where a
    /// non-support qubit is not `|0⟩`.
    fn local_isometry(&self, sys: SpinSystem) -> Result<DMatrix<C64>> {
        ensure_dim(sys.n_qubits(), self.n_physical)?;
        let support = self.support();
        let local_dim = 1usize << support.len();
        let full = self.isometry.inner();
        let rows_of = |local: usize| -> usize {
            support.iter().enumerate().fold(0, |acc, (pos, &q)| {
                if local & (1 << (support.len() - 1 - pos)) != 0 {
                    acc | sys.bit(q)
                } else {
                    acc
                }
            })
        };
        let local = DMatrix::from_fn(local_dim, self.dim_logical(), |r, col| full[(rows_of(r), col)]);
        let captured: f64 = local.iter().map(|z| z.norm_sqr()).sum();
        if (captured - self.dim_logical() as f64).abs() > 1e-10 {
            return Err(Error::InvalidCode(
                "codewords have weight outside their blocks' |0⟩ padding".into(),
            ));
        }
        Ok(local)
    }

    /// Moves a code onto different physical qubits of a (possibly larger) system.
    ///
    /// `qubits[s]` is the new position of the code's support qubit `s`
    /// (support in block order).
    pub fn relocate(&self, sys: SpinSystem, qubits: &[usize]) -> Result<LogicalCode> {
        let own_sys = SpinSystem::new(self.n_physical)?;
        let support = self.support();
        if qubits.len() != support.len() {
            return Err(Error::InvalidCode(format!(
                "relocation needs {} target qubits, got {}",
                support.len(),
                qubits.len()
            )));
        }
        check_distinct(sys, qubits)?;
        let local = self.local_isometry(own_sys)?;
        let mut pos = 0;
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let out = qubits[pos..pos + b.len()].to_vec();
                pos += b.len();
                out
            })
            .collect();
        let iso = place_blocks(sys, &[(&local, qubits.to_vec())])?;
        Ok(LogicalCode {
            n_physical: sys.n_qubits(),
            k_logical: self.k_logical,
            isometry: iso,
            codeword_labels: self.codeword_labels.clone(),
            provenance: self.provenance,
            blocks,
            gauge_fixed: self.gauge_fixed,
        })
    }
}

fn check_distinct(sys: SpinSystem, qubits: &[usize]) -> Result<()> {
    for (a, &q) in qubits.iter().enumerate() {
        sys.check_site(q)?;
        if qubits[..a].contains(&q) {
            return Err(Error::InvalidCode(format!("qubit {q} used twice")));
        }
    }
    Ok(())
}

/// Tensor product of local isometries placed on the given qubits; other qubits `|0⟩`.
fn place_blocks(sys: SpinSystem, blocks: &[(&DMatrix<C64>, Vec<usize>)]) -> Result<Isometry> {
    let logical_bits: Vec<usize> = blocks
        .iter()
        .map(|(m, _)| m.ncols().trailing_zeros() as usize)
        .collect();
    let k_total: usize = logical_bits.iter().sum();
    let all: Vec<usize> = blocks.iter().flat_map(|(_, q)| q.iter().copied()).collect();
    let dim = sys.dim();
    let padding_mask = (0..sys.n_qubits())
        .filter(|q| !all.contains(q))
        .fold(0, |acc, q| acc | sys.bit(q));
    let m = DMatrix::from_fn(dim, 1 << k_total, |row, col| {
        if row & padding_mask != 0 {
            return c(0.0, 0.0);
        }
        let mut amp = c(1.0, 0.0);
        let mut shift = k_total;
        for ((local, qubits), &kb) in blocks.iter().zip(&logical_bits) {
            shift -= kb;
            let logical = (col >> shift) & ((1 << kb) - 1);
            let local_row = qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
                if row & sys.bit(q) != 0 {
                    acc | (1 << (qubits.len() - 1 - pos))
                } else {
                    acc
                }
            });
            amp *= local[(local_row, logical)];
        }
        amp
    });
    Isometry::new(m, ISOMETRY_TOL)
}

/// `|0_L⟩ = |0⟩_i|1⟩_j`, `|1_L⟩ = |1⟩_i|0⟩_j`; remaining qubits fixed to `|0⟩`.
pub fn code_two_qubit(i: usize, j: usize, sys: SpinSystem) -> Result<LogicalCode> {
    check_distinct(sys, &[i, j])?;
    let word = |bi: bool, bj: bool| {
        let mut v = vec![c(0.0, 0.0); sys.dim()];
        let idx = (if bi { sys.bit(i) } else { 0 }) | (if bj { sys.bit(j) } else { 0 });
        v[idx] = c(1.0, 0.0);
        v
    };
    let iso = Isometry::from_columns(&[word(false, true), word(true, false)], ISOMETRY_TOL)?;
    Ok(LogicalCode {
        n_physical: sys.n_qubits(),
        k_logical: 1,
        isometry: iso,
        codeword_labels: logical_labels(1),
        provenance: Provenance::TwoQubit,
        blocks: vec![vec![i, j]],
        gauge_fixed: false,
    })
}

/// Rotates a 2-dim sector basis into the eigenbasis of the restricted
/// `heis(0,1)` (ascending), then makes each codeword's first nonzero
/// amplitude real positive.
fn gauge_fix(sys: SpinSystem, sector: &SymmetrySector) -> Result<Isometry> {
    let h01 = materialize(sys, &HamiltonianTerm::heisenberg(0, 1, 1.0))?;
    let (restricted, _) = sector.isometry.compress(&h01)?;
    let eig = HermitianEigen::new(&restricted, 1e-8)?;
    let mut m = sector.isometry.inner() * &eig.vectors;
    for col in 0..m.ncols() {
        let lead = m.column(col).iter().copied().find(|z| z.norm() > 1e-10);
        if let Some(z) = lead {
            let phase = z.conj() / z.norm();
            for r in 0..m.nrows() {
                m[(r, col)] *= phase;
            }
        }
    }
    Isometry::new(m, ISOMETRY_TOL)
}

fn sector_code(
    sys: SpinSystem,
    required_n: usize,
    target: [f64; 2],
    provenance: Provenance,
) -> Result<LogicalCode> {
    if sys.n_qubits() != required_n {
        return Err(Error::InvalidCode(format!(
            "{provenance:?} code needs exactly {required_n} qubits, got {}",
            sys.n_qubits()
        )));
    }
    let sectors = sector_decompose(
        sys,
        &[total_spin_squared(sys), total_spin_component(sys, Axis::Z)],
        DecomposeOptions::default(),
    )?;
    let sector = sectors
        .iter()
        .find(|s| s.matches(&target, 1e-8))
        .ok_or_else(|| Error::InvalidCode(format!("no sector with (S², Sz) = {target:?}")))?;
    if sector.dim() != 2 {
        return Err(Error::InvalidCode(format!(
            "sector (S², Sz) = {target:?} has dimension {}, expected 2",
            sector.dim()
        )));
    }
    Ok(LogicalCode {
        n_physical: required_n,
        k_logical: 1,
        isometry: gauge_fix(sys, sector)?,
        codeword_labels: logical_labels(1),
        provenance,
        blocks: vec![(0..required_n).collect()],
        gauge_fixed: true,
    })
}

/// The `(S = ½, Sz = +½)` doublet of three spins.
pub fn code_three_qubit(sys: SpinSystem) -> Result<LogicalCode> {
    sector_code(sys, 3, [0.75, 0.5], Provenance::ThreeQubit)
}

/// The two-dimensional total-singlet space of four spins.
pub fn code_four_qubit(sys: SpinSystem) -> Result<LogicalCode> {
    sector_code(sys, 4, [0.0, 0.0], Provenance::FourQubit)
}

/// Tensor product of codes on disjoint blocks that together cover `sys`.
pub fn compose_codes(codes: &[LogicalCode], sys: SpinSystem) -> Result<LogicalCode> {
    if codes.is_empty() {
        return Err(Error::InvalidCode("nothing to compose".into()));
    }
    let mut covered: Vec<usize> = Vec::new();
    for code in codes {
        for q in code.support() {
            sys.check_site(q)?;
            if covered.contains(&q) {
                return Err(Error::InvalidCode(format!("blocks overlap on qubit {q}")));
            }
            covered.push(q);
        }
    }
    if covered.len() != sys.n_qubits() {
        let missing: Vec<usize> = (0..sys.n_qubits()).filter(|q| !covered.contains(q)).collect();
        return Err(Error::InvalidCode(format!(
            "blocks do not cover qubits {missing:?}"
        )));
    }
    let locals = codes
        .iter()
        .map(|code| code.local_isometry(sys).map(|m| (m, code.support())))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<(&DMatrix<C64>, Vec<usize>)> = locals.iter().map(|(m, q)| (m, q.clone())).collect();
    let isometry = place_blocks(sys, &refs)?;

    let mut labels = vec![String::new()];
    for code in codes {
        labels = labels
            .iter()
            .flat_map(|prefix| code.codeword_labels.iter().map(move |l| format!("{prefix}{l}")))
            .collect();
    }
    Ok(LogicalCode {
        n_physical: sys.n_qubits(),
        k_logical: codes.iter().map(|c| c.k_logical).sum(),
        isometry,
        codeword_labels: labels,
        provenance: Provenance::Custom,
        blocks: codes.iter().flat_map(|c| c.blocks.iter().cloned()).collect(),
        gauge_fixed: codes.iter().any(|c| c.gauge_fixed),
    })
}

/// Validates a logical gate against the code and returns it as the synthesis objective.
pub fn encoded_target(code: &LogicalCode, logical_gate: &SquareMatrix) -> Result<SquareMatrix> {
    ensure_dim(code.dim_logical(), logical_gate.dim())?;
    if logical_gate.unitarity_deviation() > 1e-8 {
        return Err(Error::InvalidInput("logical target is not unitary".into()));
    }
    Ok(logical_gate.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    /// `‖(I − VV†)·U·V‖_F`.
    pub leakage_norm: f64,
    /// `|Tr(T†·V†UV)| / 2^k`, present when a target was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subspace_fidelity: Option<f64>,
}

pub fn leakage(u: &SquareMatrix, code: &LogicalCode, target: Option<&SquareMatrix>) -> Result<LeakageReport> {
    let (restricted, leak) = code.isometry.compress(u)?;
    let fidelity = match target {
        Some(t) => {
            ensure_dim(code.dim_logical(), t.dim())?;
            let overlap = t.adjoint().matmul(&restricted)?.trace();
            Some(overlap.norm() / code.dim_logical() as f64)
        }
        None => None,
    };
    Ok(LeakageReport {
        leakage_norm: leak,
        subspace_fidelity: fidelity,
    })
}

/// Standard logical gates in the logical basis.
pub mod gates {
    use super::*;

    pub fn identity(k: usize) -> SquareMatrix {
        SquareMatrix::identity(1 << k)
    }

    pub fn x() -> SquareMatrix {
        SquareMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("literal")
    }

    pub fn y() -> SquareMatrix {
        SquareMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
            .expect("literal")
    }

    pub fn z() -> SquareMatrix {
        SquareMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    pub fn hadamard() -> SquareMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        SquareMatrix::from_real_rows(&[&[h, h], &[h, -h]]).expect("literal")
    }

    /// Logical qubit 0 controls logical qubit 1.
    pub fn cnot() -> SquareMatrix {
        crate::spin::cnot(SpinSystem::new(2).expect("2 qubits"), 0, 1).expect("valid")
    }

    pub fn cz() -> SquareMatrix {
        SquareMatrix::from_real_diagonal(&[1.0, 1.0, 1.0, -1.0])
    }

    /// Looks a gate up by name: `identity`, `x`, `y`, `z`, `h`, `cnot`, `cz`.
    pub fn by_name(name: &str, k: usize) -> Option<SquareMatrix> {
        let g = match name.to_ascii_lowercase().as_str() {
            "identity" | "i" => identity(k),
            "x" => x(),
            "y" => y(),
            "z" => z(),
            "h" | "hadamard" => hadamard(),
            "cnot" | "cx" => cnot(),
            "cz" => cz(),
            _ => return None,
        };
        (g.dim() == 1 << k).then_some(g)
    }
}
