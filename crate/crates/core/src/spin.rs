//! Operators on n-qubit registers.
//!
//! Site 0 is the leftmost tensor factor and the most significant bit of a
//! basis index, so `|q0 q1 … q(n−1)⟩` has index `Σ q_s · 2^(n−1−s)`.
//! `Z|0⟩ = +|0⟩`. Spin operators carry the ½ normalization,
//! `S_α = ½ Σ_s σ_α^(s)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{c, SquareMatrix, C64};

/// Largest register supported by the dense kernels.
pub const MAX_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinSystem {
    n_qubits: usize,
}

impl SpinSystem {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidSystem(n_qubits));
        }
        Ok(Self { n_qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site < self.n_qubits {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange {
                site,
                n_qubits: self.n_qubits,
            })
        }
    }

    /// Mask selecting `site` in a basis index.
    pub fn bit(&self, site: usize) -> usize {
        1 << (self.n_qubits - 1 - site)
    }

    /// Basis index of a bit string such as `"0110"` (site 0 first).
    pub fn basis_index(&self, bits: &str) -> Result<usize> {
        if bits.len() != self.n_qubits || !bits.chars().all(|ch| ch == '0' || ch == '1') {
            return Err(Error::InvalidInput(format!(
                "`{bits}` is not a {}-bit string",
                self.n_qubits
            )));
        }
        Ok(usize::from_str_radix(bits, 2).expect("validated bit string"))
    }

    pub fn basis_label(&self, index: usize) -> String {
        format!("{index:0width$b}", width = self.n_qubits)
    }

    pub fn basis_state(&self, bits: &str) -> Result<Vec<C64>> {
        let idx = self.basis_index(bits)?;
        let mut v = vec![c(0.0, 0.0); self.dim()];
        v[idx] = c(1.0, 0.0);
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn from_char(ch: char) -> Option<Axis> {
        match ch.to_ascii_uppercase() {
            'X' => Some(Axis::X),
            'Y' => Some(Axis::Y),
            'Z' => Some(Axis::Z),
            _ => None,
        }
    }
}

/// `I ⊗ … ⊗ σ_axis ⊗ … ⊗ I` with σ on `site`.
pub fn pauli_on_site(sys: SpinSystem, site: usize, axis: Axis) -> Result<SquareMatrix> {
    sys.check_site(site)?;
    let mask = sys.bit(site);
    let dim = sys.dim();
    Ok(SquareMatrix::from_fn(dim, |row, col| {
        let up = col & mask == 0;
        match axis {
            Axis::X if row == col ^ mask => c(1.0, 0.0),
            // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
            Axis::Y if row == col ^ mask => {
                if up {
                    c(0.0, 1.0)
                } else {
                    c(0.0, -1.0)
                }
            }
            Axis::Z if row == col => {
                if up {
                    c(1.0, 0.0)
                } else {
                    c(-1.0, 0.0)
                }
            }
            _ => c(0.0, 0.0),
        }
    }))
}

/// Label of a conserved (or candidate conserved) operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConservedLabel {
    #[serde(rename = "Sx")]
    Sx,
    #[serde(rename = "Sy")]
    Sy,
    #[serde(rename = "Sz")]
    Sz,
    #[serde(rename = "S_squared")]
    SSquared,
    Custom(String),
}

impl fmt::Display for ConservedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConservedLabel::Sx => f.write_str("Sx"),
            ConservedLabel::Sy => f.write_str("Sy"),
            ConservedLabel::Sz => f.write_str("Sz"),
            ConservedLabel::SSquared => f.write_str("S_squared"),
            ConservedLabel::Custom(name) => f.write_str(name),
        }
    }
}

/// A Hermitian operator tested (or known) to commute with a control set.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservedOperator {
    pub label: ConservedLabel,
    pub matrix: SquareMatrix,
}

impl ConservedOperator {
    /// Wraps a user-supplied operator, checking Hermiticity within 1e−12.
    pub fn custom(name: impl Into<String>, matrix: SquareMatrix) -> Result<Self> {
        matrix.require_hermitian(1e-12)?;
        Ok(Self {
            label: ConservedLabel::Custom(name.into()),
            matrix,
        })
    }

    /// Builds one of the named spin operators on `sys`; `None` for custom labels.
    pub fn named(sys: SpinSystem, label: &ConservedLabel) -> Option<Self> {
        match label {
            ConservedLabel::Sx => Some(total_spin_component(sys, Axis::X)),
            ConservedLabel::Sy => Some(total_spin_component(sys, Axis::Y)),
            ConservedLabel::Sz => Some(total_spin_component(sys, Axis::Z)),
            ConservedLabel::SSquared => Some(total_spin_squared(sys)),
            ConservedLabel::Custom(_) => None,
        }
    }

    /// `Sx, Sy, Sz, S²` in that order.
    pub fn angular_momentum(sys: SpinSystem) -> Vec<Self> {
        vec![
            total_spin_component(sys, Axis::X),
            total_spin_component(sys, Axis::Y),
            total_spin_component(sys, Axis::Z),
            total_spin_squared(sys),
        ]
    }
}

fn spin_component_matrix(sys: SpinSystem, axis: Axis) -> SquareMatrix {
    (0..sys.n_qubits())
        .map(|s| pauli_on_site(sys, s, axis).expect("site in range"))
        .fold(SquareMatrix::zeros(sys.dim()), |acc, p| acc.add(&p).expect("same dim"))
        .scale_real(0.5)
}

/// `S_axis = ½ Σ_s σ_axis^(s)`.
pub fn total_spin_component(sys: SpinSystem, axis: Axis) -> ConservedOperator {
    let label = match axis {
        Axis::X => ConservedLabel::Sx,
        Axis::Y => ConservedLabel::Sy,
        Axis::Z => ConservedLabel::Sz,
    };
    ConservedOperator {
        label,
        matrix: spin_component_matrix(sys, axis),
    }
}

/// `S² = Sx² + Sy² + Sz²`, eigenvalues `S(S+1)`.
pub fn total_spin_squared(sys: SpinSystem) -> ConservedOperator {
    let matrix = Axis::ALL
        .iter()
        .map(|&a| {
            let s = spin_component_matrix(sys, a);
            s.matmul(&s).expect("same dim")
        })
        .fold(SquareMatrix::zeros(sys.dim()), |acc, m| acc.add(&m).expect("same dim"));
    ConservedOperator {
        label: ConservedLabel::SSquared,
        matrix,
    }
}

/// Symbolic description of one control Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianTerm {
    /// `J (X_i X_j + Y_i Y_j + Z_i Z_j)`
    Heisenberg { sites: [usize; 2], j: f64 },
    /// `J (X_i X_j + Y_i Y_j)`
    Xy { sites: [usize; 2], j: f64 },
    /// `J (X_i X_j + Y_i Y_j) + Jz Z_i Z_j`
    Xxz { sites: [usize; 2], j: f64, jz: f64 },
    /// `ε (Z_i − Z_j)`
    Zeeman { sites: [usize; 2], epsilon: f64 },
    /// `coefficient · Π_k σ_{axes[k]}^(sites[k])`
    PauliString {
        sites: Vec<usize>,
        axes: String,
        coefficient: f64,
    },
}

impl HamiltonianTerm {
    pub fn heisenberg(i: usize, k: usize, j: f64) -> Self {
        Self::Heisenberg { sites: [i, k], j }
    }

    pub fn xy(i: usize, k: usize, j: f64) -> Self {
        Self::Xy { sites: [i, k], j }
    }

    pub fn xxz(i: usize, k: usize, j: f64, jz: f64) -> Self {
        Self::Xxz { sites: [i, k], j, jz }
    }

    pub fn zeeman(i: usize, k: usize, epsilon: f64) -> Self {
        Self::Zeeman { sites: [i, k], epsilon }
    }

    pub fn pauli_string(factors: &[(usize, Axis)], coefficient: f64) -> Self {
        Self::PauliString {
            sites: factors.iter().map(|f| f.0).collect(),
            axes: factors
                .iter()
                .map(|f| match f.1 {
                    Axis::X => 'X',
                    Axis::Y => 'Y',
                    Axis::Z => 'Z',
                })
                .collect(),
            coefficient,
        }
    }

    pub fn sites(&self) -> Vec<usize> {
        match self {
            Self::Heisenberg { sites, .. }
            | Self::Xy { sites, .. }
            | Self::Xxz { sites, .. }
            | Self::Zeeman { sites, .. } => sites.to_vec(),
            Self::PauliString { sites, .. } => sites.clone(),
        }
    }

    /// Short human-readable name, e.g. `heis(0,1)`.
    pub fn name(&self) -> String {
        let pair = |p: &[usize; 2]| format!("{},{}", p[0], p[1]);
        match self {
            Self::Heisenberg { sites, .. } => format!("heis({})", pair(sites)),
            Self::Xy { sites, .. } => format!("xy({})", pair(sites)),
            Self::Xxz { sites, .. } => format!("xxz({})", pair(sites)),
            Self::Zeeman { sites, .. } => format!("zeeman({})", pair(sites)),
            Self::PauliString { sites, axes, .. } => {
                let parts: Vec<String> = axes
                    .chars()
                    .zip(sites)
                    .map(|(a, s)| format!("{a}{s}"))
                    .collect();
                format!("pauli({})", parts.join(" "))
            }
        }
    }

    pub fn validate(&self, sys: SpinSystem) -> Result<()> {
        let sites = self.sites();
        for &s in &sites {
            sys.check_site(s)?;
        }
        for (a, &s) in sites.iter().enumerate() {
            if sites[..a].contains(&s) {
                return Err(Error::InvalidTerm(format!(
                    "{}: site {s} appears more than once",
                    self.name()
                )));
            }
        }
        let finite = |x: f64, what: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidTerm(format!("{}: {what} is not finite", self.name())))
            }
        };
        match self {
            Self::Heisenberg { j, .. } | Self::Xy { j, .. } => finite(*j, "J"),
            Self::Xxz { j, jz, .. } => finite(*j, "J").and(finite(*jz, "Jz")),
            Self::Zeeman { epsilon, .. } => finite(*epsilon, "epsilon"),
            Self::PauliString {
                sites,
                axes,
                coefficient,
            } => {
                if sites.is_empty() {
                    return Err(Error::InvalidTerm("pauli string needs at least one site".into()));
                }
                if axes.chars().count() != sites.len() {
                    return Err(Error::InvalidTerm(format!(
                        "pauli string has {} axes for {} sites",
                        axes.chars().count(),
                        sites.len()
                    )));
                }
                if let Some(bad) = axes.chars().find(|&ch| Axis::from_char(ch).is_none()) {
                    return Err(Error::InvalidTerm(format!("unknown Pauli axis `{bad}`")));
                }
                finite(*coefficient, "coefficient")
            }
        }
    }
}

fn pair_product(sys: SpinSystem, i: usize, j: usize, axis: Axis) -> SquareMatrix {
    pauli_on_site(sys, i, axis)
        .expect("validated")
        .matmul(&pauli_on_site(sys, j, axis).expect("validated"))
        .expect("same dim")
}

/// Materializes a control term as a `2^n × 2^n` Hermitian matrix.
pub fn materialize(sys: SpinSystem, term: &HamiltonianTerm) -> Result<SquareMatrix> {
    term.validate(sys)?;
    let xx_yy = |i, j| {
        pair_product(sys, i, j, Axis::X)
            .add(&pair_product(sys, i, j, Axis::Y))
            .expect("same dim")
    };
    let m = match term {
        HamiltonianTerm::Heisenberg { sites: [i, k], j } => xx_yy(*i, *k)
            .add(&pair_product(sys, *i, *k, Axis::Z))?
            .scale_real(*j),
        HamiltonianTerm::Xy { sites: [i, k], j } => xx_yy(*i, *k).scale_real(*j),
        HamiltonianTerm::Xxz { sites: [i, k], j, jz } => xx_yy(*i, *k)
            .scale_real(*j)
            .add(&pair_product(sys, *i, *k, Axis::Z).scale_real(*jz))?,
        HamiltonianTerm::Zeeman { sites: [i, k], epsilon } => pauli_on_site(sys, *i, Axis::Z)?
            .sub(&pauli_on_site(sys, *k, Axis::Z)?)?
            .scale_real(*epsilon),
        HamiltonianTerm::PauliString {
            sites,
            axes,
            coefficient,
        } => {
            let mut acc = SquareMatrix::identity(sys.dim());
            for (&s, ch) in sites.iter().zip(axes.chars()) {
                let axis = Axis::from_char(ch).expect("validated");
                acc = acc.matmul(&pauli_on_site(sys, s, axis)?)?;
            }
            acc.scale_real(*coefficient)
        }
    };
    Ok(m)
}

/// Permutation matrix sending basis index `col` to `f(col)`.
fn permutation(dim: usize, f: impl Fn(usize) -> usize) -> SquareMatrix {
    SquareMatrix::from_fn(dim, |row, col| if row == f(col) { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

/// CNOT flipping `target` when `control` is `|1⟩`.
pub fn cnot(sys: SpinSystem, control: usize, target: usize) -> Result<SquareMatrix> {
    sys.check_site(control)?;
    sys.check_site(target)?;
    if control == target {
        return Err(Error::InvalidInput("CNOT control and target must differ".into()));
    }
    let (cm, tm) = (sys.bit(control), sys.bit(target));
    Ok(permutation(sys.dim(), |b| if b & cm != 0 { b ^ tm } else { b }))
}

/// SWAP of qubits `i` and `j`.
pub fn swap(sys: SpinSystem, i: usize, j: usize) -> Result<SquareMatrix> {
    sys.check_site(i)?;
    sys.check_site(j)?;
    let (im, jm) = (sys.bit(i), sys.bit(j));
    Ok(permutation(sys.dim(), |b| {
        if (b & im == 0) != (b & jm == 0) {
            b ^ im ^ jm
        } else {
            b
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{commutator_norm, frobenius_distance, HermitianEigen};

    fn sys(n: usize) -> SpinSystem {
        SpinSystem::new(n).unwrap()
    }

    /// Rounded eigenvalues with multiplicities.
    fn spectrum(m: &SquareMatrix) -> Vec<(f64, usize)> {
        let eig = HermitianEigen::new(m, 1e-12).unwrap();
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &v in &eig.values {
            let r = (v * 1e6).round() / 1e6;
            match out.last_mut() {
                Some((last, count)) if (*last - r).abs() < 1e-6 => *count += 1,
                _ => out.push((r, 1)),
            }
        }
        out
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn system_bounds() {
        assert!(SpinSystem::new(0).is_err());
        assert!(SpinSystem::new(MAX_QUBITS + 1).is_err());
        assert_eq!(sys(4).dim(), 16);
    }

    #[test]
    fn pauli_examples() {
        let z = pauli_on_site(sys(1), 0, Axis::Z).unwrap();
        assert_eq!(z, SquareMatrix::from_real_diagonal(&[1.0, -1.0]));

        let s2 = sys(2);
        let x1 = pauli_on_site(s2, 1, Axis::X).unwrap();
        // |00⟩ → |01⟩
        assert_eq!(x1.get(s2.basis_index("01").unwrap(), 0), c(1.0, 0.0));

        let y0 = pauli_on_site(sys(3), 0, Axis::Y).unwrap();
        assert_eq!(y0.matmul(&y0).unwrap(), SquareMatrix::identity(8));

        assert!(pauli_on_site(sys(2), 2, Axis::X).is_err());
    }

    #[test]
    fn pauli_algebra_on_and_off_site() {
        let s = sys(3);
        for site in 0..3 {
            for a in Axis::ALL {
                for b in Axis::ALL {
                    let pa = pauli_on_site(s, site, a).unwrap();
                    let pb = pauli_on_site(s, site, b).unwrap();
                    if a != b {
                        let anti = pa.matmul(&pb).unwrap().add(&pb.matmul(&pa).unwrap()).unwrap();
                        assert_eq!(anti.frobenius_norm(), 0.0);
                    }
                    let other = pauli_on_site(s, (site + 1) % 3, b).unwrap();
                    assert_eq!(commutator_norm(&pa, &other).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn spin_component_spectra() {
        let sz1 = total_spin_component(sys(1), Axis::Z).matrix;
        assert_eq!(sz1, SquareMatrix::from_real_diagonal(&[0.5, -0.5]));

        let s2 = sys(2);
        let sz2 = total_spin_component(s2, Axis::Z).matrix;
        let idx = s2.basis_index("01").unwrap();
        assert_eq!(sz2.get(idx, idx), c(0.0, 0.0));

        // Multiplicity of Sz = n/2 − k is C(n, k).
        let sz4 = total_spin_component(sys(4), Axis::Z).matrix;
        let expected: Vec<(f64, usize)> =
            (0..=4).rev().map(|k| (2.0 - k as f64, binomial(4, k))).collect();
        assert_eq!(spectrum(&sz4), expected);

        let sx3 = total_spin_component(sys(3), Axis::X).matrix;
        let expected: Vec<(f64, usize)> =
            (0..=3).rev().map(|k| (1.5 - k as f64, binomial(3, k))).collect();
        assert_eq!(spectrum(&sx3), expected);
    }

    #[test]
    fn spin_squared_spectra() {
        let s1 = total_spin_squared(sys(1)).matrix;
        assert!(frobenius_distance(&s1, &SquareMatrix::identity(2).scale_real(0.75)).unwrap() < 1e-15);
        assert_eq!(spectrum(&total_spin_squared(sys(2)).matrix), vec![(0.0, 1), (2.0, 3)]);
        let four = spectrum(&total_spin_squared(sys(4)).matrix);
        assert_eq!(four, vec![(0.0, 2), (2.0, 9), (6.0, 5)]);
    }

    #[test]
    fn heisenberg_pair_is_two_swap_minus_identity() {
        let s = sys(2);
        let h = materialize(s, &HamiltonianTerm::heisenberg(0, 1, 1.0)).unwrap();
        let oracle = swap(s, 0, 1).unwrap().scale_real(2.0).sub(&SquareMatrix::identity(4)).unwrap();
        assert!(frobenius_distance(&h, &oracle).unwrap() < 1e-15);
        assert_eq!(spectrum(&h), vec![(-3.0, 1), (1.0, 3)]);
    }

    #[test]
    fn zeeman_and_xy_entries() {
        let s = sys(2);
        let z = materialize(s, &HamiltonianTerm::zeeman(0, 1, 1.0)).unwrap();
        assert_eq!(z, SquareMatrix::from_real_diagonal(&[0.0, 2.0, -2.0, 0.0]));

        let xy = materialize(s, &HamiltonianTerm::xy(0, 1, 1.0)).unwrap();
        let expected = SquareMatrix::from_real_rows(&[
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 2.0, 0.0],
            &[0.0, 2.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!(frobenius_distance(&xy, &expected).unwrap() < 1e-15);
    }

    #[test]
    fn pauli_string_term() {
        let s = sys(3);
        let t = HamiltonianTerm::pauli_string(&[(0, Axis::X), (2, Axis::Z)], 0.5);
        let m = materialize(s, &t).unwrap();
        let expected = pauli_on_site(s, 0, Axis::X)
            .unwrap()
            .matmul(&pauli_on_site(s, 2, Axis::Z).unwrap())
            .unwrap()
            .scale_real(0.5);
        assert_eq!(m, expected);
        assert_eq!(t.name(), "pauli(X0 Z2)");
    }

    #[test]
    fn invalid_terms_rejected() {
        let s = sys(2);
        assert!(matches!(
            materialize(s, &HamiltonianTerm::heisenberg(0, 2, 1.0)),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            materialize(s, &HamiltonianTerm::xy(1, 1, 1.0)),
            Err(Error::InvalidTerm(_))
        ));
        let bad = HamiltonianTerm::PauliString {
            sites: vec![0, 1],
            axes: "XQ".into(),
            coefficient: 1.0,
        };
        assert!(matches!(materialize(s, &bad), Err(Error::InvalidTerm(_))));
        assert!(materialize(s, &HamiltonianTerm::zeeman(0, 1, f64::NAN)).is_err());
    }

    #[test]
    fn term_serde_shape() {
        let t: HamiltonianTerm =
            toml::from_str("kind = \"xxz\"\nsites = [0, 2]\nj = 1.0\njz = 0.5").unwrap();
        assert_eq!(t, HamiltonianTerm::xxz(0, 2, 1.0, 0.5));
        assert!(toml::from_str::<HamiltonianTerm>("kind = \"xy\"\nsites = [0, 1]\nj = 1.0\njz = 2.0").is_err());
        assert!(toml::from_str::<HamiltonianTerm>("kind = \"zeeman\"\nsites = [0, 1]").is_err());
    }

    #[test]
    fn cnot_examples() {
        let s = sys(2);
        let g = cnot(s, 0, 1).unwrap();
        assert_eq!(g.get(s.basis_index("11").unwrap(), s.basis_index("10").unwrap()), c(1.0, 0.0));
        assert_eq!(g.matmul(&g).unwrap(), SquareMatrix::identity(4));

        let s3 = sys(3);
        let g3 = cnot(s3, 0, 2).unwrap();
        assert_eq!(g3.get(s3.basis_index("100").unwrap(), s3.basis_index("101").unwrap()), c(1.0, 0.0));
        assert!(cnot(s, 1, 1).is_err());
        assert!(cnot(s, 0, 5).is_err());
    }

    #[test]
    fn cnot_breaks_sz_conservation() {
        let s = sys(2);
        let sz = total_spin_component(s, Axis::Z).matrix;
        let norm = commutator_norm(&cnot(s, 0, 1).unwrap(), &sz).unwrap();
        assert!((norm - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn exchange_terms_conserve_angular_momentum() {
        for n in 2..=4 {
            let s = sys(n);
            let spin = ConservedOperator::angular_momentum(s);
            let sz = total_spin_component(s, Axis::Z).matrix;
            let sx = total_spin_component(s, Axis::X).matrix;
            for i in 0..n {
                for k in (i + 1)..n {
                    let h = materialize(s, &HamiltonianTerm::heisenberg(i, k, 0.8)).unwrap();
                    assert!(h.hermitian_check(1e-12).is_hermitian);
                    for q in &spin {
                        assert!(commutator_norm(&h, &q.matrix).unwrap() <= 1e-12);
                    }
                    for axial in [
                        HamiltonianTerm::xy(i, k, 0.7),
                        HamiltonianTerm::xxz(i, k, 0.7, 1.3),
                        HamiltonianTerm::zeeman(i, k, 0.9),
                    ] {
                        let m = materialize(s, &axial).unwrap();
                        assert!(m.hermitian_check(1e-12).is_hermitian);
                        assert!(commutator_norm(&m, &sz).unwrap() <= 1e-12);
                        assert!(commutator_norm(&m, &sx).unwrap() > 0.1);
                    }
                }
            }
        }
    }
}
