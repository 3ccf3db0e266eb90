//! Dense complex linear algebra: the numeric carrier for every operator,
//! unitary and isometry in the crate.
//!
//! Matrices are immutable values. Every operation returns a fresh matrix, so
//! values can be shared across threads without coordination.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ensure_dim, Error, Result};

pub type C64 = Complex64;

/// Default absolute Frobenius-norm tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A dense `dim × dim` complex matrix.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix(DMatrix<C64>);

/// Result of testing a matrix for Hermiticity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermitianCheck {
    pub is_hermitian: bool,
    /// `‖A − A†‖_F`.
    pub deviation: f64,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |r, col| if r == col { diag[r] } else { C64::new(0.0, 0.0) })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| c(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Builds a matrix from rows, rejecting ragged or non-finite input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidInput("matrix must have at least one row".into()));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Ragged { dim });
            }
            for (col, z) in row.iter().enumerate() {
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: r, col });
                }
            }
        }
        Ok(Self::from_fn(dim, |r, col| rows[r][col]))
    }

    /// Real-valued convenience constructor, mostly for tests and small literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub(crate) fn from_inner(m: DMatrix<C64>) -> Self {
        debug_assert!(m.is_square());
        Self(m)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|col| self.0[(r, col)]).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 * &other.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn hermitian_check(&self, tol: f64) -> HermitianCheck {
        let deviation = (&self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        HermitianCheck {
            is_hermitian: deviation <= tol,
            deviation,
        }
    }

    /// `‖A† + A‖_F`; zero for skew-Hermitian matrices.
    pub fn skew_deviation(&self) -> f64 {
        (&self.0 + self.0.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖U†U − I‖_F`.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim();
        (self.0.adjoint() * &self.0 - DMatrix::<C64>::identity(d, d))
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn require_hermitian(&self, tol: f64) -> Result<()> {
        let check = self.hermitian_check(tol);
        if check.is_hermitian {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                deviation: check.deviation,
                tol,
            })
        }
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SquareMatrix({}x{})", self.dim(), self.dim())?;
        for r in 0..self.dim() {
            write!(f, "\n  [")?;
            for col in 0..self.dim() {
                let z = self.0[(r, col)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            write!(f, " ]")?;
        }
        Ok(())
    }
}

/// `ab − ba`.
pub fn commutator(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix> {
    ensure_dim(a.dim(), b.dim())?;
    Ok(SquareMatrix(&a.0 * &b.0 - &b.0 * &a.0))
}

/// `‖ab − ba‖_F`.
pub fn commutator_norm(a: &SquareMatrix, b: &SquareMatrix) -> Result<f64> {
    commutator(a, b).map(|m| m.frobenius_norm())
}

pub fn frobenius_distance(a: &SquareMatrix, b: &SquareMatrix) -> Result<f64> {
    ensure_dim(a.dim(), b.dim())?;
    Ok((&a.0 - &b.0).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}

/// Hilbert–Schmidt inner product `Re Tr(A†B)`.
pub fn hs_inner(a: &SquareMatrix, b: &SquareMatrix) -> Result<f64> {
    ensure_dim(a.dim(), b.dim())?;
    Ok(a.0.iter().zip(b.0.iter()).map(|(x, y)| (x.conj() * y).re).sum())
}

/// Projects `candidate` off the span of an orthonormal `basis` (real inner
/// product `Re Tr(A†B)`) and returns the normalized residual, or `None` when
/// the residual norm is at most `tol`.
///
/// Two Gram–Schmidt passes are made so that the output stays orthogonal to
/// the basis at roundoff level even when the candidate is nearly in span.
pub fn hs_orthonormalize(
    basis: &[SquareMatrix],
    candidate: &SquareMatrix,
    tol: f64,
) -> Result<Option<SquareMatrix>> {
    for b in basis {
        ensure_dim(candidate.dim(), b.dim())?;
    }
    let mut r = candidate.0.clone();
    for _ in 0..2 {
        for b in basis {
            let overlap: f64 = b.0.iter().zip(r.iter()).map(|(x, y)| (x.conj() * y).re).sum();
            r -= &b.0 * c(overlap, 0.0);
        }
    }
    let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm <= tol {
        return Ok(None);
    }
    Ok(Some(SquareMatrix(r / c(norm, 0.0))))
}

/// Eigendecomposition `h = Q Λ Q†` of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    pub fn new(h: &SquareMatrix, tol: f64) -> Result<Self> {
        h.require_hermitian(tol)?;
        let sym = (&h.0 + h.0.adjoint()) * c(0.5, 0.0);
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..h.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(h.dim(), h.dim(), |r, col| eig.eigenvectors[(r, order[col])]);
        Ok(Self { values, vectors })
    }

    /// `exp(−i t h)`.
    pub fn evolve(&self, t: f64) -> SquareMatrix {
        self.map_spectrum(|l| (-I * l * t).exp())
    }

    /// Applies `f` to the spectrum: `Q f(Λ) Q†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> SquareMatrix {
        let mut scaled = self.vectors.clone();
        for (col, &l) in self.values.iter().enumerate() {
            let v = f(l);
            for r in 0..scaled.nrows() {
                scaled[(r, col)] *= v;
            }
        }
        SquareMatrix(scaled * self.vectors.adjoint())
    }
}

/// `exp(−i t h)` for Hermitian `h`, computed through the eigendecomposition.
pub fn expm_hermitian(h: &SquareMatrix, t: f64) -> Result<SquareMatrix> {
    Ok(HermitianEigen::new(h, DEFAULT_TOL)?.evolve(t))
}

/// A `rows × cols` matrix with orthonormal columns.
#[derive(Clone, PartialEq)]
pub struct Isometry(DMatrix<C64>);

impl Isometry {
    /// Wraps `m`, checking `m†m = I` within `tol`.
    pub fn new(m: DMatrix<C64>, tol: f64) -> Result<Self> {
        let iso = Self(m);
        let dev = iso.orthonormality_deviation();
        if dev > tol {
            return Err(Error::InvalidCode(format!(
                "columns are not orthonormal (deviation {dev:.3e})"
            )));
        }
        Ok(iso)
    }

    pub(crate) fn from_inner_unchecked(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn from_columns(columns: &[Vec<C64>], tol: f64) -> Result<Self> {
        let rows = columns.first().map(Vec::len).unwrap_or(0);
        if columns.iter().any(|col| col.len() != rows) {
            return Err(Error::InvalidInput("isometry columns differ in length".into()));
        }
        Self::new(
            DMatrix::from_fn(rows, columns.len(), |r, col| columns[col][r]),
            tol,
        )
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    /// Physical (row) dimension.
    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    /// Subspace (column) dimension.
    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn column(&self, k: usize) -> Vec<C64> {
        self.0.column(k).iter().copied().collect()
    }

    /// `‖V†V − I‖_F`.
    pub fn orthonormality_deviation(&self) -> f64 {
        let k = self.cols();
        (self.0.adjoint() * &self.0 - DMatrix::<C64>::identity(k, k))
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Projector `VV†` onto the column space.
    pub fn projector(&self) -> SquareMatrix {
        SquareMatrix(&self.0 * self.0.adjoint())
    }

    /// `V† A V` and `‖(I − VV†) A V‖_F`.
    pub fn compress(&self, op: &SquareMatrix) -> Result<(SquareMatrix, f64)> {
        ensure_dim(self.rows(), op.dim())?;
        let av = &op.0 * &self.0;
        let restricted = self.0.adjoint() * &av;
        let outside = &av - &self.0 * &restricted;
        let leak = outside.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Ok((SquareMatrix(restricted), leak))
    }

    /// `V A V†` for a `cols × cols` operator.
    pub fn embed(&self, op: &SquareMatrix) -> Result<SquareMatrix> {
        ensure_dim(self.cols(), op.dim())?;
        Ok(SquareMatrix(&self.0 * &op.0 * self.0.adjoint()))
    }

    /// `V†W`: coordinates of another subspace's columns in this one.
    pub fn overlap(&self, other: &Isometry) -> Result<DMatrix<C64>> {
        ensure_dim(self.rows(), other.rows())?;
        Ok(self.0.adjoint() * &other.0)
    }
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Isometry({}x{})", self.rows(), self.cols())
    }
}

fn pairs_from(m: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|col| [m[(r, col)].re, m[(r, col)].im]).collect())
        .collect()
}

fn matrix_from_pairs(rows: &[Vec<[f64; 2]>]) -> std::result::Result<DMatrix<C64>, String> {
    let nrows = rows.len();
    let ncols = rows.first().map(Vec::len).unwrap_or(0);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err("ragged matrix rows".into());
    }
    if rows.iter().flatten().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err("non-finite matrix entry".into());
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, col| c(rows[r][col][0], rows[r][col][1])))
}

/// Serialized as nested rows of `[re, im]` pairs.
impl Serialize for SquareMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        pairs_from(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SquareMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let m = matrix_from_pairs(&rows).map_err(serde::de::Error::custom)?;
        if !m.is_square() || m.nrows() == 0 {
            return Err(serde::de::Error::custom("matrix must be square and nonempty"));
        }
        Ok(SquareMatrix(m))
    }
}

impl Serialize for Isometry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        pairs_from(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let m = matrix_from_pairs(&rows).map_err(serde::de::Error::custom)?;
        Isometry::new(m, 1e-8).map_err(serde::de::Error::custom)
    }
}
