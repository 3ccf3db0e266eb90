//! Dynamical Lie algebra of a control set and the universality decision.
//!
//! Hermitian generators `H` enter as `iH`. The algebra is grown in
//! breadth-first rounds: every element added in the previous round is
//! commutated with every current element, residuals are orthonormalized
//! against the basis, and the loop ends when a round adds nothing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::matrix::{commutator, hs_inner, hs_orthonormalize, SquareMatrix, I};
use crate::symmetry::{restrict, ControlSet, SymmetrySector};

pub const CLOSURE_TOL: f64 = 1e-8;

/// Orthonormal basis (under `Re Tr(A†B)`) of a real Lie algebra of skew-Hermitian matrices.
#[derive(Debug, Clone)]
pub struct LieBasis {
    pub dim_space: usize,
    pub elements: Vec<SquareMatrix>,
    /// False when the element budget ran out before a round added nothing.
    pub closed: bool,
    /// Commutator rounds run after seeding.
    pub generation_depth: usize,
}

impl LieBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureOptions {
    pub tol: f64,
    /// Defaults to `d² + 8`.
    pub max_elements: Option<usize>,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        Self {
            tol: CLOSURE_TOL,
            max_elements: None,
        }
    }
}

pub fn lie_closure(generators: &[SquareMatrix], opts: ClosureOptions) -> Result<LieBasis> {
    let Some(first) = generators.first() else {
        return Err(Error::InvalidInput("no generators".into()));
    };
    let d = first.dim();
    for g in generators {
        ensure_dim(d, g.dim())?;
        g.require_hermitian(1e-10)?;
    }
    let ceiling = d * d;
    let budget = opts.max_elements.unwrap_or(ceiling + 8);

    let mut basis: Vec<SquareMatrix> = Vec::new();
    let mut exhausted = false;
    for g in generators {
        if basis.len() >= budget.min(ceiling) {
            exhausted = basis.len() < ceiling;
            break;
        }
        if let Some(e) = hs_orthonormalize(&basis, &g.scale(I), opts.tol)? {
            basis.push(e);
        }
    }

    let mut frontier: Vec<usize> = (0..basis.len()).collect();
    let mut depth = 0;
    while !frontier.is_empty() && !exhausted && basis.len() < ceiling {
        depth += 1;
        let snapshot = basis.len();
        let pairs: Vec<(usize, usize)> = frontier
            .iter()
            .flat_map(|&a| (0..snapshot).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b)
            .collect();
        let brackets: Vec<SquareMatrix> = pairs
            .par_iter()
            .map(|&(a, b)| commutator(&basis[a], &basis[b]).expect("same dim"))
            .collect();
        let mut added = Vec::new();
        for br in &brackets {
            if basis.len() >= ceiling {
                break;
            }
            if basis.len() >= budget {
                exhausted = true;
                break;
            }
            if let Some(e) = hs_orthonormalize(&basis, br, opts.tol)? {
                added.push(basis.len());
                basis.push(e);
            }
        }
        frontier = added;
    }

    Ok(LieBasis {
        dim_space: d,
        elements: basis,
        closed: !exhausted,
        generation_depth: depth,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub in_span: bool,
    /// Norm of the part of the (normalized) candidate outside the span.
    pub residual_norm: f64,
}

/// Projects a skew-Hermitian candidate onto the algebra.
pub fn contains_direction(basis: &LieBasis, candidate: &SquareMatrix, tol: f64) -> Result<Membership> {
    ensure_dim(basis.dim_space, candidate.dim())?;
    let norm = candidate.frobenius_norm();
    if candidate.skew_deviation() > 1e-8 * norm.max(1.0) {
        return Err(Error::InvalidInput("candidate direction is not skew-Hermitian".into()));
    }
    if norm == 0.0 {
        return Ok(Membership {
            in_span: true,
            residual_norm: 0.0,
        });
    }
    let unit = candidate.scale_real(1.0 / norm);
    let mut residual = unit.clone();
    for _ in 0..2 {
        for e in &basis.elements {
            let overlap = hs_inner(e, &residual)?;
            residual = residual.sub(&e.scale_real(overlap))?;
        }
    }
    let r = residual.frobenius_norm();
    Ok(Membership {
        in_span: r <= tol,
        residual_norm: r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Universality {
    Universal,
    UniversalUpToPhase,
    NotUniversal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalityVerdict {
    pub closure_dim: usize,
    pub full_unitary_dim: usize,
    pub full_special_dim: usize,
    /// Dimension of the algebra's projection onto the traceless subspace.
    pub traceless_dim: usize,
    pub verdict: Universality,
    /// The identity direction `iI` lies in the algebra.
    pub trace_component_present: bool,
    pub closed: bool,
    pub generation_depth: usize,
}

/// Classifies a closure by dimension counting.
pub fn classify(basis: &LieBasis, tol: f64) -> Result<UniversalityVerdict> {
    let d = basis.dim_space;
    let identity_dir = SquareMatrix::identity(d).scale(I);
    let trace_present = contains_direction(basis, &identity_dir, tol)?.in_span;
    // Projections stay independent unless the identity itself is in span.
    let traceless_dim = basis.dim() - usize::from(trace_present);
    let verdict = if basis.dim() == d * d {
        Universality::Universal
    } else if traceless_dim >= d * d - 1 {
        Universality::UniversalUpToPhase
    } else {
        Universality::NotUniversal
    };
    Ok(UniversalityVerdict {
        closure_dim: basis.dim(),
        full_unitary_dim: d * d,
        full_special_dim: d * d - 1,
        traceless_dim,
        verdict,
        trace_component_present: trace_present,
        closed: basis.closed,
        generation_depth: basis.generation_depth,
    })
}

/// Restricted control matrices, rejecting any control that leaks out of the sector.
pub fn restricted_controls(controls: &ControlSet, sector: &SymmetrySector, tol: f64) -> Result<Vec<SquareMatrix>> {
    controls
        .matrices()
        .iter()
        .enumerate()
        .map(|(index, h)| {
            let r = restrict(h, sector)?;
            if r.leakage > tol {
                return Err(Error::LeakyControl {
                    index,
                    leakage: r.leakage,
                    tol,
                });
            }
            // Symmetrize away roundoff so the closure's Hermiticity check is exact.
            Ok(r.matrix.add(&r.matrix.adjoint())?.scale_real(0.5))
        })
        .collect()
}

/// Restricts every control to `sector`, closes the algebra and classifies it.
pub fn universality_on_sector(
    controls: &ControlSet,
    sector: &SymmetrySector,
    tol: f64,
) -> Result<(UniversalityVerdict, LieBasis)> {
    let restricted = restricted_controls(controls, sector, tol)?;
    let basis = lie_closure(
        &restricted,
        ClosureOptions {
            tol,
            max_elements: None,
        },
    )?;
    Ok((classify(&basis, tol)?, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{code_two_qubit, compose_codes, gates};
    use crate::matrix::c;
    use crate::spin::{
        pauli_on_site, total_spin_component, total_spin_squared, Axis, HamiltonianTerm, SpinSystem,
    };
    use crate::symmetry::{sector_decompose, DecomposeOptions};

    fn x() -> SquareMatrix {
        gates::x()
    }

    fn z() -> SquareMatrix {
        gates::z()
    }

    fn closure_dim(gens: &[SquareMatrix]) -> usize {
        lie_closure(gens, ClosureOptions::default()).unwrap().dim()
    }

    fn pauli_basis(m: usize) -> Vec<SquareMatrix> {
        let s = SpinSystem::new(m).unwrap();
        let mut out = Vec::new();
        for code in 0..(1usize << (2 * m)) {
            let mut op = SquareMatrix::identity(1 << m);
            for site in 0..m {
                let digit = (code >> (2 * site)) & 3;
                if digit > 0 {
                    op = op.matmul(&pauli_on_site(s, site, Axis::ALL[digit - 1]).unwrap()).unwrap();
                }
            }
            out.push(op);
        }
        out
    }

    #[test]
    fn su2_from_x_and_z() {
        let basis = lie_closure(&[x(), z()], ClosureOptions::default()).unwrap();
        assert_eq!(basis.dim(), 3);
        assert!(basis.closed);
        let iy = gates::y().scale(I);
        let m = contains_direction(&basis, &iy, 1e-10).unwrap();
        assert!(m.in_span && m.residual_norm < 1e-12);
    }

    #[test]
    fn abelian_generator() {
        assert_eq!(closure_dim(&[z()]), 1);
        let basis = lie_closure(&[z()], ClosureOptions::default()).unwrap();
        let m = contains_direction(&basis, &x().scale(I), 1e-10).unwrap();
        assert!(!m.in_span);
        assert!((m.residual_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pair_code_generators_give_u2() {
        // {2X − I, 2Z}: brackets give iY, iX, iZ, and the identity component of 2X − I survives.
        let a = x().scale_real(2.0).sub(&SquareMatrix::identity(2)).unwrap();
        let b = z().scale_real(2.0);
        let basis = lie_closure(&[a, b], ClosureOptions::default()).unwrap();
        assert_eq!(basis.dim(), 4);
        let v = classify(&basis, 1e-8).unwrap();
        assert_eq!(v.verdict, Universality::Universal);
        assert!(v.trace_component_present);
    }

    #[test]
    fn full_pauli_sets_reach_the_ceiling() {
        for m in 1..=2 {
            let basis = lie_closure(&pauli_basis(m), ClosureOptions::default()).unwrap();
            let d = 1 << m;
            assert_eq!(basis.dim(), d * d);
            for e in &basis.elements {
                assert!(e.skew_deviation() < 1e-10);
            }
            for (a, ea) in basis.elements.iter().enumerate() {
                for eb in &basis.elements[a + 1..] {
                    assert!(hs_inner(ea, eb).unwrap().abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let basis = lie_closure(
            &[x(), z()],
            ClosureOptions {
                tol: 1e-8,
                max_elements: Some(2),
            },
        )
        .unwrap();
        assert_eq!(basis.dim(), 2);
        assert!(!basis.closed);
    }

    #[test]
    fn non_hermitian_generator_rejected() {
        let bad = SquareMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            lie_closure(&[bad], ClosureOptions::default()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn closure_invariant_under_generator_mixing() {
        let a = x().scale_real(2.0).sub(&SquareMatrix::identity(2)).unwrap();
        let b = z().scale_real(2.0);
        let mixed = [a.add(&b.scale_real(0.3)).unwrap(), a.scale_real(-1.2).add(&b).unwrap()];
        assert_eq!(closure_dim(&[a.clone(), b.clone()]), closure_dim(&mixed));
        assert!(closure_dim(&[a.clone()]) <= closure_dim(&[a, b]));
    }

    #[test]
    fn single_exchange_on_pair_sector_is_not_universal() {
        let s = SpinSystem::new(2).unwrap();
        let controls = ControlSet::new(s, vec![HamiltonianTerm::heisenberg(0, 1, 1.0)]).unwrap();
        let sectors = sector_decompose(s, &[total_spin_component(s, Axis::Z)], DecomposeOptions::default())
            .unwrap();
        let middle = sectors.iter().find(|x| x.dim() == 2).unwrap();
        let (v, _) = universality_on_sector(&controls, middle, 1e-8).unwrap();
        assert_eq!(v.verdict, Universality::NotUniversal);
        assert_eq!(v.closure_dim, 1);
    }

    #[test]
    fn three_qubit_exchange_generates_su2_on_doublet() {
        let s = SpinSystem::new(3).unwrap();
        let controls = ControlSet::all_heisenberg_pairs(s, 1.0).unwrap();
        let sectors = sector_decompose(
            s,
            &[total_spin_squared(s), total_spin_component(s, Axis::Z)],
            DecomposeOptions::default(),
        )
        .unwrap();
        let doublet = sectors.iter().find(|x| x.matches(&[0.75, 0.5], 1e-8)).unwrap();
        let (v, basis) = universality_on_sector(&controls, doublet, 1e-8).unwrap();
        assert!(v.closure_dim >= 3);
        assert!(matches!(v.verdict, Universality::Universal | Universality::UniversalUpToPhase));
        for p in [x(), gates::y(), z()] {
            assert!(contains_direction(&basis, &p.scale(I), 1e-8).unwrap().in_span);
        }
    }

    #[test]
    fn leaky_control_rejected() {
        let s = SpinSystem::new(4).unwrap();
        let code = compose_codes(
            &[code_two_qubit(0, 1, s).unwrap(), code_two_qubit(2, 3, s).unwrap()],
            s,
        )
        .unwrap();
        let sector = SymmetrySector {
            eigenvalues: vec![],
            isometry: code.isometry.clone(),
        };
        let controls = ControlSet::new(s, vec![HamiltonianTerm::heisenberg(1, 2, 1.0)]).unwrap();
        match universality_on_sector(&controls, &sector, 1e-8) {
            Err(Error::LeakyControl { index: 0, leakage, .. }) => assert!(leakage > 0.1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn desk_case_closure_contains_encoded_cnot_direction() {
        let s = SpinSystem::new(4).unwrap();
        let controls = ControlSet::new(
            s,
            vec![
                HamiltonianTerm::heisenberg(0, 1, 1.0),
                HamiltonianTerm::heisenberg(2, 3, 1.0),
                HamiltonianTerm::heisenberg(1, 2, 1.0),
                HamiltonianTerm::zeeman(0, 1, 1.0),
                HamiltonianTerm::zeeman(2, 3, 1.0),
            ],
        )
        .unwrap();
        let sectors = sector_decompose(s, &[total_spin_component(s, Axis::Z)], DecomposeOptions::default())
            .unwrap();
        let middle = sectors.iter().find(|x| x.matches(&[0.0], 1e-8)).unwrap();
        assert_eq!(middle.dim(), 6);
        let (v, basis) = universality_on_sector(&controls, middle, 1e-8).unwrap();
        assert!(v.closure_dim >= 35, "{v:?}");

        // CNOT_L = exp(−iπP), P = (I − CNOT)/2 projecting on (|10⟩ − |11⟩)/√2;
        // the generator in sector coordinates must lie in the algebra.
        let code = compose_codes(
            &[code_two_qubit(0, 1, s).unwrap(), code_two_qubit(2, 3, s).unwrap()],
            s,
        )
        .unwrap();
        let p = SquareMatrix::identity(4).sub(&gates::cnot()).unwrap().scale_real(0.5);
        let physical = code.embed(&p).unwrap();
        let (in_sector, leak) = middle.isometry.compress(&physical).unwrap();
        assert!(leak < 1e-12);
        let direction = in_sector.scale(c(0.0, std::f64::consts::PI));
        assert!(contains_direction(&basis, &direction, 1e-8).unwrap().in_span);
    }
}
