//! Dense complex kernels: SVD-based pseudo-inverse, Hermitian eigendecomposition,
//! range/null-space bases and extremal values of Hermitian PSD pencils.
//!
//! Everything here works on small dense matrices (a few hundred rows at most).
//! Rank decisions use the cutoff `max(max(rows, cols) * eps * sigma_max, tol.abs)`.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative and absolute tolerances shared by every check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-9,
            abs: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        if !(rel > 0.0 && rel.is_finite()) || !(abs > 0.0 && abs.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerances must be positive and finite (rel={rel}, abs={abs})"
            )));
        }
        Ok(Tolerance { rel, abs })
    }

    /// Same absolute floor, different relative tolerance.
    pub fn with_rel(self, rel: f64) -> Result<Self> {
        Tolerance::new(rel, self.abs)
    }

    /// `value <= rel * max(1, scale)`.
    pub fn within(&self, value: f64, scale: f64) -> bool {
        value <= self.rel * scale.max(1.0)
    }

    /// Singular values (or PSD eigenvalues) at or below this are treated as zero.
    pub fn rank_cutoff(&self, largest: f64, dim: usize) -> f64 {
        (dim.max(1) as f64 * f64::EPSILON * largest).max(self.abs)
    }
}

/// A dense complex matrix with finite entries and positive dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap(CMatrix);

impl LinearMap {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "linear map must have positive dimensions, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("linear map".into()));
        }
        Ok(LinearMap(matrix))
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} map, got {}",
                rows * cols,
                entries.len()
            )));
        }
        LinearMap::new(CMatrix::from_row_slice(rows, cols, &entries))
    }

    /// Real row-major entries embedded with zero imaginary parts.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        LinearMap::from_row_major(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "linear map dimensions must be positive");
        LinearMap(CMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "linear map dimensions must be positive");
        LinearMap(CMatrix::identity(n, n))
    }

    pub fn diag(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "linear map dimensions must be positive");
        let d = DVector::from_iterator(values.len(), values.iter().map(|&x| C64::new(x, 0.0)));
        LinearMap(CMatrix::from_diagonal(&d))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// Row-major copy of the entries.
    pub fn entries(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> LinearMap {
        LinearMap(self.0.adjoint())
    }

    /// `self * other`.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(LinearMap(&self.0 * &other.0))
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &LinearMap, b: f64) -> Result<LinearMap> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(LinearMap(
            self.0.map(|z| z * a) + other.0.map(|z| z * b),
        ))
    }

    pub fn apply(&self, f: &CVector) -> Result<CVector> {
        if f.len() != self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} applied to a {}x{} map",
                f.len(),
                self.rows(),
                self.cols()
            )));
        }
        Ok(&self.0 * f)
    }

    /// Operator (spectral) norm.
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == C64::new(0.0, 0.0))
    }
}

impl From<LinearMap> for CMatrix {
    fn from(map: LinearMap) -> Self {
        map.0
    }
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    thin_svd(m).sigma.first().copied().unwrap_or(0.0)
}

fn to_faer(m: &CMatrix) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin SVD with singular values sorted in decreasing order.
pub struct ThinSvd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

pub fn thin_svd(m: &CMatrix) -> ThinSvd {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return ThinSvd {
            u: CMatrix::zeros(m.nrows(), 0),
            sigma: Vec::new(),
            v: CMatrix::zeros(m.ncols(), 0),
        };
    }
    // nalgebra's complex SVD loses accuracy on wide inputs; faer's does not
    let svd = to_faer(m)
        .thin_svd()
        .expect("SVD of a finite matrix converges");
    let sigma: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    let (u, v) = (from_faer(svd.U()), from_faer(svd.V()));
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    ThinSvd {
        u: select_columns(&u, &order),
        sigma: order.iter().map(|&i| sigma[i]).collect(),
        v: select_columns(&v, &order),
    }
}

fn select_columns(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), idx.len(), |i, j| m[(i, idx[j])])
}

fn rank_from_sigma(sigma: &[f64], rows: usize, cols: usize, tol: &Tolerance) -> usize {
    let largest = sigma.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_cutoff(largest, rows.max(cols));
    sigma.iter().take_while(|&&s| s > cutoff).count()
}

pub fn numerical_rank(m: &CMatrix, tol: &Tolerance) -> usize {
    let svd = thin_svd(m);
    rank_from_sigma(&svd.sigma, m.nrows(), m.ncols(), tol)
}

/// Orthonormal basis of the column space (rows x rank).
pub fn range_basis(m: &CMatrix, tol: &Tolerance) -> CMatrix {
    let svd = thin_svd(m);
    let r = rank_from_sigma(&svd.sigma, m.nrows(), m.ncols(), tol);
    svd.u.columns(0, r).into_owned()
}

/// Orthonormal basis of the kernel (cols x (cols - rank)).
pub fn null_basis(m: &CMatrix, tol: &Tolerance) -> CMatrix {
    let n = m.ncols();
    // pad with zero rows so the right singular vectors span all of C^n
    let padded = if m.nrows() < n {
        let mut p = CMatrix::zeros(n, n);
        p.rows_mut(0, m.nrows()).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = thin_svd(&padded);
    let r = rank_from_sigma(&svd.sigma, m.nrows(), m.ncols(), tol);
    svd.v.columns(r, n - r).into_owned()
}

/// Moore-Penrose inverse with an explicit singular-value cutoff.
pub fn pinv_with_cutoff(m: &CMatrix, cutoff: f64) -> CMatrix {
    let svd = thin_svd(m);
    let mut out = CMatrix::zeros(m.ncols(), m.nrows());
    for (k, &s) in svd.sigma.iter().enumerate() {
        if s <= cutoff {
            break;
        }
        out += (svd.v.column(k) * svd.u.column(k).adjoint()).map(|z| z / s);
    }
    out
}

pub fn pinv_matrix(m: &CMatrix, tol: &Tolerance) -> CMatrix {
    let largest = spectral_norm(m);
    pinv_with_cutoff(m, tol.rank_cutoff(largest, m.nrows().max(m.ncols())))
}

/// Moore-Penrose pseudo-inverse. The zero map yields the zero map.
pub fn pseudo_inverse(m: &LinearMap, tol: &Tolerance) -> LinearMap {
    LinearMap(pinv_matrix(m.matrix(), tol))
}

/// Residuals of the four Penrose identities, each relative to `max(1, ||M||)`.
pub fn penrose_residuals(m: &CMatrix, p: &CMatrix) -> [f64; 4] {
    let scale = spectral_norm(m).max(1.0);
    let mp = m * p;
    let pm = p * m;
    [
        spectral_norm(&(&mp * m - m)) / scale,
        spectral_norm(&(&pm * p - p)) / scale.max(spectral_norm(p)),
        spectral_norm(&(&mp - mp.adjoint())) / scale,
        spectral_norm(&(&pm - pm.adjoint())) / scale,
    ]
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

fn ensure_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

fn ensure_hermitian(m: &CMatrix, tol: &Tolerance) -> Result<()> {
    ensure_square(m)?;
    let asymmetry = (m - m.adjoint()).norm();
    if asymmetry > tol.rel * m.norm().max(1.0) {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(())
}

/// Eigendecomposition of the Hermitian part of `m`, without the Hermitian check.
pub fn eigh(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    if n == 0 {
        return HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    let eig = to_faer(&h)
        .self_adjoint_eigen(Side::Lower)
        .expect("Hermitian eigensolver converges on finite input");
    let values: Vec<f64> = eig.S().column_vector().iter().map(|z| z.re).collect();
    let vectors = from_faer(eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    HermitianEigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: select_columns(&vectors, &order),
    }
}

pub fn hermitian_eigs(m: &LinearMap, tol: &Tolerance) -> Result<HermitianEigen> {
    ensure_hermitian(m.matrix(), tol)?;
    Ok(eigh(m.matrix()))
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    eigh(m).min()
}

/// `||(I - P_{ran L2}) L1||`.
pub fn range_residual(l1: &CMatrix, l2: &CMatrix, tol: &Tolerance) -> f64 {
    let q = range_basis(l2, tol);
    let projected = &q * (q.adjoint() * l1);
    spectral_norm(&(l1 - projected))
}

pub fn range_included(l1: &LinearMap, l2: &LinearMap, tol: &Tolerance) -> Result<bool> {
    if l1.rows() != l2.rows() {
        return Err(Error::DimensionMismatch(format!(
            "range inclusion needs equal row counts, got {} and {}",
            l1.rows(),
            l2.rows()
        )));
    }
    Ok(range_included_matrix(l1.matrix(), l2.matrix(), tol))
}

pub fn range_included_matrix(l1: &CMatrix, l2: &CMatrix, tol: &Tolerance) -> bool {
    tol.within(range_residual(l1, l2, tol), spectral_norm(l1))
}

/// A bound that is either a finite number or absent because nothing constrains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Unconstrained,
}

impl Bound {
    pub fn finite(self) -> Option<f64> {
        match self {
            Bound::Finite(x) => Some(x),
            Bound::Unconstrained => None,
        }
    }

    pub fn is_unconstrained(self) -> bool {
        matches!(self, Bound::Unconstrained)
    }
}

/// Extremal values of a Hermitian PSD pencil `(num, den)`.
///
/// `min_ratio = sup{λ : λ·den ⪯ num}` and `max_ratio = inf{μ : num ⪯ μ·den}`.
/// `restricted` holds the smallest and largest generalized eigenvalues of the
/// pencil compressed to `ran(den)`; these coincide with the two extremes only
/// when `ran(den)` is invariant under `num`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PencilExtremes {
    pub min_ratio: Bound,
    pub max_ratio: Bound,
    pub restricted: Option<(f64, f64)>,
}

struct PsdFactor {
    basis: CMatrix,
    values: Vec<f64>,
    norm: f64,
}

fn psd_factor(m: &CMatrix, tol: &Tolerance) -> Result<PsdFactor> {
    let eig = eigh(m);
    let norm = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if eig.min() < -(tol.rel * norm + tol.abs) {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min(),
        });
    }
    let cutoff = tol.rank_cutoff(norm, m.nrows());
    let keep: Vec<usize> = (0..eig.values.len())
        .filter(|&i| eig.values[i] > cutoff)
        .collect();
    Ok(PsdFactor {
        basis: select_columns(&eig.vectors, &keep),
        values: keep.iter().map(|&i| eig.values[i]).collect(),
        norm,
    })
}

/// Largest generalized eigenvalue of `(a, b)` over `ran(b)`, plus the smallest.
fn compressed_extremes(a: &CMatrix, b: &PsdFactor) -> (f64, f64) {
    let scale: Vec<f64> = b.values.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut w = b.basis.adjoint() * a * &b.basis;
    for i in 0..w.nrows() {
        for j in 0..w.ncols() {
            w[(i, j)] *= scale[i] * scale[j];
        }
    }
    let eig = eigh(&w);
    (eig.min().max(0.0), eig.max().max(0.0))
}

fn outside_range(m: &CMatrix, basis: &CMatrix) -> f64 {
    spectral_norm(&(m - basis * (basis.adjoint() * m)))
}

pub fn pencil_extremes_matrix(num: &CMatrix, den: &CMatrix, tol: &Tolerance) -> Result<PencilExtremes> {
    ensure_hermitian(num, tol)?;
    ensure_hermitian(den, tol)?;
    if num.nrows() != den.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "pencil operands are {}x{} and {}x{}",
            num.nrows(),
            num.ncols(),
            den.nrows(),
            den.ncols()
        )));
    }
    let fnum = psd_factor(num, tol)?;
    let fden = psd_factor(den, tol)?;
    if fden.values.is_empty() {
        return Ok(PencilExtremes {
            min_ratio: Bound::Unconstrained,
            max_ratio: Bound::Unconstrained,
            restricted: None,
        });
    }

    let restricted = compressed_extremes(num, &fden);

    let max_ratio = if outside_range(num, &fden.basis) <= tol.rel * fnum.norm + tol.abs {
        Bound::Finite(restricted.1)
    } else {
        Bound::Unconstrained
    };

    // sup{λ : λ den ⪯ num} = 1 / max{<den f, f> / <num f, f>}, which is finite
    // only when ran(den) ⊆ ran(num); otherwise no positive λ works.
    let min_ratio = if fnum.values.is_empty()
        || outside_range(den, &fnum.basis) > tol.rel * fden.norm + tol.abs
    {
        Bound::Finite(0.0)
    } else {
        let (_, theta) = compressed_extremes(den, &fnum);
        Bound::Finite(1.0 / theta)
    };

    Ok(PencilExtremes {
        min_ratio,
        max_ratio,
        restricted: Some(restricted),
    })
}

pub fn pencil_extremes(num: &LinearMap, den: &LinearMap, tol: &Tolerance) -> Result<PencilExtremes> {
    pencil_extremes_matrix(num.matrix(), den.matrix(), tol)
}

/// `m m*`.
pub fn gram(m: &CMatrix) -> CMatrix {
    m * m.adjoint()
}

/// Inner product `<a, b>` linear in the first argument.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    b.dotc(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn pinv_of_diagonal() {
        let p = pseudo_inverse(&LinearMap::diag(&[2.0, 1.0]), &Tolerance::default());
        assert!((p.matrix()[(0, 0)] - c(0.5)).norm() < 1e-15);
        assert!((p.matrix()[(1, 1)] - c(1.0)).norm() < 1e-15);
        assert!(p.matrix()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn pinv_of_zero_is_zero_transposed() {
        let p = pseudo_inverse(&LinearMap::zeros(2, 3), &Tolerance::default());
        assert_eq!((p.rows(), p.cols()), (3, 2));
        assert!(p.is_zero());
    }

    #[test]
    fn pinv_rank_deficient_real() {
        // [[1,0],[0,1],[0,1]] -> [[1,0,0],[0,.5,.5]]
        let a = LinearMap::from_real(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        let p = pseudo_inverse(&a, &Tolerance::default());
        let expected = [1.0, 0.0, 0.0, 0.0, 0.5, 0.5];
        for (z, e) in p.entries().iter().zip(expected) {
            assert!((z - c(e)).norm() < 1e-14);
        }
    }

    #[test]
    fn eigs_of_diagonal_and_identity() {
        let tol = Tolerance::default();
        let e = hermitian_eigs(&LinearMap::diag(&[4.0, 1.0]), &tol).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] - 4.0).abs() < 1e-14);
        let e = hermitian_eigs(&LinearMap::identity(3), &tol).unwrap();
        assert!(e.values.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn eigs_rejects_non_square_and_non_hermitian() {
        let tol = Tolerance::default();
        assert!(matches!(
            hermitian_eigs(&LinearMap::zeros(2, 3), &tol),
            Err(Error::NonSquare { .. })
        ));
        let m = LinearMap::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hermitian_eigs(&m, &tol), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigs_two_by_two_hand_formula() {
        // [[2, 1-i],[1+i, 3]]: trace 5, det 6 - 2 = 4 -> (5 ± 3)/2
        let m = LinearMap::from_row_major(
            2,
            2,
            vec![c(2.0), C64::new(1.0, -1.0), C64::new(1.0, 1.0), c(3.0)],
        )
        .unwrap();
        let e = hermitian_eigs(&m, &Tolerance::default()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-13);
        assert!((e.values[1] - 4.0).abs() < 1e-13);
    }

    #[test]
    fn range_inclusion_basic() {
        let tol = Tolerance::default();
        let i2 = LinearMap::identity(2);
        assert!(range_included(&i2, &i2, &tol).unwrap());
        let e1 = LinearMap::from_real(2, 1, &[1.0, 0.0]).unwrap();
        let e2 = LinearMap::from_real(2, 1, &[0.0, 1.0]).unwrap();
        assert!(!range_included(&e1, &e2, &tol).unwrap());
        assert!(matches!(
            range_included(&e1, &LinearMap::identity(3), &tol),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn pencil_diag_against_identity() {
        let tol = Tolerance::default();
        let p = pencil_extremes(&LinearMap::diag(&[1.0, 4.0]), &LinearMap::identity(2), &tol).unwrap();
        assert_eq!(p.min_ratio.finite().map(|x| (x - 1.0).abs() < 1e-12), Some(true));
        assert_eq!(p.max_ratio.finite().map(|x| (x - 4.0).abs() < 1e-12), Some(true));
    }

    #[test]
    fn pencil_with_singular_denominator() {
        let tol = Tolerance::default();
        let p = pencil_extremes(&LinearMap::diag(&[1.0, 4.0]), &LinearMap::diag(&[1.0, 0.0]), &tol)
            .unwrap();
        let (lo, hi) = p.restricted.unwrap();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        assert!((p.min_ratio.finite().unwrap() - 1.0).abs() < 1e-12);
        // diag(1,4) ⪯ μ diag(1,0) has no solution
        assert_eq!(p.max_ratio, Bound::Unconstrained);
    }

    #[test]
    fn pencil_zero_denominator_is_unconstrained() {
        let tol = Tolerance::default();
        let p = pencil_extremes(&LinearMap::identity(2), &LinearMap::zeros(2, 2), &tol).unwrap();
        assert_eq!(p.min_ratio, Bound::Unconstrained);
        assert_eq!(p.max_ratio, Bound::Unconstrained);
    }

    #[test]
    fn pencil_min_sees_cross_terms() {
        // S = [[2,1],[1,2]], KK* = diag(1,0): sup λ = 1 / (S^{-1})_{11} = 1.5,
        // while the compression to e1 alone would give 2.
        let tol = Tolerance::default();
        let s = LinearMap::from_real(2, 2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let p = pencil_extremes(&s, &LinearMap::diag(&[1.0, 0.0]), &tol).unwrap();
        assert!((p.min_ratio.finite().unwrap() - 1.5).abs() < 1e-12);
        assert!((p.restricted.unwrap().0 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pencil_rejects_indefinite() {
        let tol = Tolerance::default();
        let r = pencil_extremes(&LinearMap::diag(&[1.0, -1.0]), &LinearMap::identity(2), &tol);
        assert!(matches!(r, Err(Error::NotPsd { .. })));
    }

    #[test]
    fn null_basis_of_wide_matrix() {
        let m = LinearMap::from_real(1, 3, &[1.0, 1.0, 0.0]).unwrap();
        let n = null_basis(m.matrix(), &Tolerance::default());
        assert_eq!(n.ncols(), 2);
        assert!(spectral_norm(&(m.matrix() * &n)) < 1e-14);
    }

    #[test]
    fn linear_map_rejects_nan_and_bad_shapes() {
        assert!(LinearMap::from_real(1, 1, &[f64::NAN]).is_err());
        assert!(LinearMap::from_real(2, 2, &[1.0]).is_err());
        assert!(LinearMap::new(CMatrix::zeros(0, 2)).is_err());
    }
}
