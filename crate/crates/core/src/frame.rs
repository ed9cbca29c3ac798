//! Operator families, their analysis/synthesis/frame operators and the
//! c-K-g-frame decision with optimal bounds.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::block::{same_space, BlockVector, MeasurePoints};
use crate::error::{Error, Result};
use crate::linalg::{
    gram, min_eigenvalue, pencil_extremes_matrix, spectral_norm, Bound, CMatrix, CVector,
    LinearMap, Tolerance,
};

/// A family `{Λ_i}` with `Λ_i : C^n → C^{d_i}`, one matrix per node.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFamily {
    space: Arc<MeasurePoints>,
    domain_dim: usize,
    blocks: Vec<CMatrix>,
}

impl OperatorFamily {
    pub fn new(space: Arc<MeasurePoints>, domain_dim: usize, blocks: Vec<CMatrix>) -> Result<Self> {
        if domain_dim == 0 {
            return Err(Error::DimensionMismatch("domain dimension must be positive".into()));
        }
        if blocks.len() != space.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} blocks for {} nodes",
                blocks.len(),
                space.len()
            )));
        }
        for (i, (b, &d)) in blocks.iter().zip(space.block_dims()).enumerate() {
            if b.nrows() != d || b.ncols() != domain_dim {
                return Err(Error::DimensionMismatch(format!(
                    "block {i} is {}x{}, expected {d}x{domain_dim}",
                    b.nrows(),
                    b.ncols()
                )));
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite(format!("family block {i}")));
            }
        }
        Ok(OperatorFamily {
            space,
            domain_dim,
            blocks,
        })
    }

    pub fn zeros(space: Arc<MeasurePoints>, domain_dim: usize) -> Self {
        let blocks = space
            .block_dims()
            .iter()
            .map(|&d| CMatrix::zeros(d, domain_dim))
            .collect();
        OperatorFamily {
            space,
            domain_dim,
            blocks,
        }
    }

    /// Rebuild a family from its flattened analysis matrix (`D x n`).
    pub fn from_analysis_matrix(space: Arc<MeasurePoints>, analysis: &CMatrix) -> Result<Self> {
        if analysis.nrows() != space.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "analysis matrix has {} rows, measure has total dimension {}",
                analysis.nrows(),
                space.total_dim()
            )));
        }
        let blocks = (0..space.len())
            .map(|i| {
                let s = space.weights()[i].sqrt();
                analysis
                    .rows(space.offset(i), space.block_dims()[i])
                    .map(|z| z / s)
            })
            .collect();
        OperatorFamily::new(space, analysis.ncols(), blocks)
    }

    pub fn space(&self) -> &Arc<MeasurePoints> {
        &self.space
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix {
        &self.blocks[i]
    }

    /// Flattened analysis operator `T*` as a `D x n` matrix (rows `√μ_i Λ_i`).
    pub fn analysis_matrix(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.space.total_dim(), self.domain_dim);
        for (i, b) in self.blocks.iter().enumerate() {
            let s = self.space.weights()[i].sqrt();
            out.rows_mut(self.space.offset(i), b.nrows())
                .copy_from(&b.map(|z| z * s));
        }
        out
    }

    /// Flattened synthesis operator `T` (`n x D`).
    pub fn synthesis_matrix(&self) -> CMatrix {
        self.analysis_matrix().adjoint()
    }

    /// `{Λ_i U}`.
    pub fn compose_right(&self, u: &LinearMap) -> Result<Self> {
        if u.rows() != self.domain_dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose a family on C^{} with a {}x{} map",
                self.domain_dim,
                u.rows(),
                u.cols()
            )));
        }
        let blocks = self.blocks.iter().map(|b| b * u.matrix()).collect();
        OperatorFamily::new(self.space.clone(), u.cols(), blocks)
    }

    /// `{Λ_i + Γ_i}`.
    pub fn add(&self, other: &OperatorFamily) -> Result<Self> {
        self.check_compatible(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a + b)
            .collect();
        OperatorFamily::new(self.space.clone(), self.domain_dim, blocks)
    }

    pub fn scaled(&self, c: f64) -> Self {
        OperatorFamily {
            space: self.space.clone(),
            domain_dim: self.domain_dim,
            blocks: self.blocks.iter().map(|b| b.map(|z| z * c)).collect(),
        }
    }

    /// Node `perm[k]` becomes node `k`.
    pub fn permuted(&self, space: Arc<MeasurePoints>, perm: &[usize]) -> Result<Self> {
        OperatorFamily::new(
            space,
            self.domain_dim,
            perm.iter().map(|&i| self.blocks[i].clone()).collect(),
        )
    }

    pub(crate) fn check_compatible(&self, other: &OperatorFamily) -> Result<()> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        if self.domain_dim != other.domain_dim {
            return Err(Error::DimensionMismatch(format!(
                "families act on C^{} and C^{}",
                self.domain_dim, other.domain_dim
            )));
        }
        Ok(())
    }

    /// `Σ μ_i Λ_i* Γ_i`, i.e. `T_Λ T_Γ*`.
    pub fn cross_operator(&self, other: &OperatorFamily) -> Result<CMatrix> {
        self.check_compatible(other)?;
        let mut out = CMatrix::zeros(self.domain_dim, self.domain_dim);
        for ((a, b), &w) in self.blocks.iter().zip(&other.blocks).zip(self.space.weights()) {
            out += (a.adjoint() * b).map(|z| z * w);
        }
        Ok(out)
    }

    /// `Σ μ_i ||Λ_i f||^2`.
    pub fn energy(&self, f: &CVector) -> f64 {
        self.blocks
            .iter()
            .zip(self.space.weights())
            .map(|(b, &w)| w * (b * f).norm_squared())
            .sum()
    }
}

/// `T*f`: block `i` is `Λ_i f`.
pub fn analysis(family: &OperatorFamily, f: &CVector) -> Result<BlockVector> {
    if f.len() != family.domain_dim {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for a family on C^{}",
            f.len(),
            family.domain_dim
        )));
    }
    BlockVector::new(
        family.space.clone(),
        family.blocks.iter().map(|b| b * f).collect(),
    )
}

/// `T F = Σ μ_i Λ_i* F_i`.
pub fn synthesis(family: &OperatorFamily, coeffs: &BlockVector) -> Result<CVector> {
    if !same_space(&family.space, coeffs.space()) {
        return Err(Error::SpaceMismatch);
    }
    let mut out = CVector::zeros(family.domain_dim);
    for ((b, v), &w) in family
        .blocks
        .iter()
        .zip(coeffs.blocks())
        .zip(family.space.weights())
    {
        out += (b.adjoint() * v).map(|z| z * w);
    }
    Ok(out)
}

/// `S = Σ μ_i Λ_i* Λ_i`.
pub fn frame_operator(family: &OperatorFamily) -> LinearMap {
    let s = family
        .cross_operator(family)
        .expect("a family is compatible with itself");
    // exact Hermitian symmetry
    let s = (&s + s.adjoint()).map(|z| z * 0.5);
    LinearMap::new(s).expect("finite family gives a finite frame operator")
}

/// Verdict and optimal bounds of `A ||K* f||^2 <= Σ μ_i ||Λ_i f||^2 <= B ||f||^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameCertificate {
    pub is_bessel: bool,
    pub bessel_bound: f64,
    pub lower_bound: Bound,
    pub is_ckg_frame: bool,
    pub is_tight: bool,
    pub is_parseval: bool,
    pub residuals: BTreeMap<String, f64>,
}

impl FrameCertificate {
    /// True when `(a, b)` are admissible bounds: `a <= A_opt` and `b >= B`.
    pub fn admits(&self, a: f64, b: f64, tol: &Tolerance) -> bool {
        let lower_ok = match self.lower_bound {
            Bound::Unconstrained => true,
            Bound::Finite(opt) => a <= opt + tol.rel * opt.max(1.0),
        };
        lower_ok && b + tol.rel * b.max(1.0) >= self.bessel_bound
    }

    pub fn lower(&self) -> Option<f64> {
        self.lower_bound.finite()
    }
}

pub fn frame_bounds(
    family: &OperatorFamily,
    k: &LinearMap,
    tol: &Tolerance,
) -> Result<FrameCertificate> {
    let n = family.domain_dim;
    if k.rows() != n || k.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "K is {}x{}, family acts on C^{n}",
            k.rows(),
            k.cols()
        )));
    }
    let s = frame_operator(family);
    let kk = gram(k.matrix());
    frame_bounds_from_parts(s.matrix(), &kk, k.is_zero(), tol)
}

pub(crate) fn frame_bounds_from_parts(
    s: &CMatrix,
    kk: &CMatrix,
    k_is_zero: bool,
    tol: &Tolerance,
) -> Result<FrameCertificate> {
    let n = s.nrows();
    let pencil = pencil_extremes_matrix(s, kk, tol)?;
    let b = crate::linalg::eigh(s).max().max(0.0);
    let lower = pencil.min_ratio;

    let mut residuals = BTreeMap::new();
    let identity = CMatrix::identity(n, n);
    residuals.insert(
        "upper_violation".to_string(),
        (-min_eigenvalue(&(identity.map(|z| z * b) - s))).max(0.0),
    );
    if let Bound::Finite(a) = lower {
        let gap = s - kk.map(|z| z * a);
        residuals.insert(
            "lower_violation".to_string(),
            (-min_eigenvalue(&gap)).max(0.0),
        );
        residuals.insert("tight_residual".to_string(), spectral_norm(&gap));
    }
    if let Some((lo, hi)) = pencil.restricted {
        residuals.insert("compressed_min".to_string(), lo);
        residuals.insert("compressed_max".to_string(), hi);
    }

    let is_ckg_frame = match lower {
        Bound::Unconstrained => true,
        Bound::Finite(a) => a > tol.abs,
    };
    let is_tight = !k_is_zero
        && match lower {
            Bound::Finite(a) => is_ckg_frame && (a - b).abs() <= tol.rel * a.max(b),
            Bound::Unconstrained => false,
        };
    let is_parseval = is_tight
        && match lower {
            Bound::Finite(a) => (a - 1.0).abs() <= tol.rel && (b - 1.0).abs() <= tol.rel,
            Bound::Unconstrained => false,
        };

    Ok(FrameCertificate {
        is_bessel: true,
        bessel_bound: b,
        lower_bound: lower,
        is_ckg_frame,
        is_tight,
        is_parseval,
        residuals,
    })
}

/// Largest eigenvalue of the frame operator, i.e. the optimal Bessel bound.
pub fn bessel_bound(family: &OperatorFamily) -> f64 {
    let s = frame_operator(family);
    crate::linalg::eigh(s.matrix()).max().max(0.0)
}

#[cfg(test)]
pub(crate) fn c(re: f64) -> crate::linalg::C64 {
    crate::linalg::C64::new(re, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(weights: &[f64], dims: &[usize]) -> Arc<MeasurePoints> {
        Arc::new(MeasurePoints::new(weights.to_vec(), dims.to_vec()).unwrap())
    }

    fn real(rows: usize, cols: usize, v: &[f64]) -> CMatrix {
        CMatrix::from_row_slice(rows, cols, &v.iter().map(|&x| c(x)).collect::<Vec<_>>())
    }

    fn vec2(a: f64, b: f64) -> CVector {
        CVector::from_vec(vec![c(a), c(b)])
    }

    #[test]
    fn analysis_of_identity_family() {
        let fam = OperatorFamily::new(space(&[1.0], &[2]), 2, vec![CMatrix::identity(2, 2)]).unwrap();
        let a = analysis(&fam, &vec2(1.0, 0.0)).unwrap();
        assert_eq!(a.block(0), &vec2(1.0, 0.0));
        let zero = OperatorFamily::zeros(space(&[1.0, 2.0], &[1, 3]), 2);
        let a = analysis(&zero, &vec2(3.0, -1.0)).unwrap();
        assert_eq!(a.norm_sq(), 0.0);
        assert!(matches!(
            analysis(&fam, &CVector::zeros(3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn synthesis_weights_enter_once() {
        let sp = space(&[1.0], &[2]);
        let fam = OperatorFamily::new(sp.clone(), 2, vec![CMatrix::identity(2, 2)]).unwrap();
        let f = BlockVector::new(sp, vec![vec2(0.0, 1.0)]).unwrap();
        assert_eq!(synthesis(&fam, &f).unwrap(), vec2(0.0, 1.0));

        let sp = space(&[2.0], &[2]);
        let fam = OperatorFamily::new(sp.clone(), 2, vec![CMatrix::identity(2, 2)]).unwrap();
        let f = BlockVector::new(sp, vec![vec2(1.0, 0.0)]).unwrap();
        assert_eq!(synthesis(&fam, &f).unwrap(), vec2(2.0, 0.0));
    }

    #[test]
    fn synthesis_rejects_foreign_coefficients() {
        let fam = OperatorFamily::new(space(&[1.0], &[2]), 2, vec![CMatrix::identity(2, 2)]).unwrap();
        let other = BlockVector::zeros(space(&[5.0], &[2]));
        assert_eq!(synthesis(&fam, &other), Err(Error::SpaceMismatch));
    }

    #[test]
    fn frame_operator_examples() {
        let fam = OperatorFamily::new(
            space(&[1.0, 1.0], &[1, 1]),
            2,
            vec![real(1, 2, &[1.0, 0.0]), real(1, 2, &[0.0, 1.0])],
        )
        .unwrap();
        assert_eq!(frame_operator(&fam), LinearMap::identity(2));

        let fam = OperatorFamily::new(space(&[1.0], &[2]), 2, vec![real(2, 2, &[1.0, 0.0, 0.0, 2.0])]).unwrap();
        assert_eq!(frame_operator(&fam), LinearMap::diag(&[1.0, 4.0]));
    }

    #[test]
    fn parseval_certificate() {
        let fam = OperatorFamily::new(space(&[1.0], &[2]), 2, vec![CMatrix::identity(2, 2)]).unwrap();
        let cert = frame_bounds(&fam, &LinearMap::identity(2), &Tolerance::default()).unwrap();
        assert!(cert.is_ckg_frame && cert.is_tight && cert.is_parseval);
        assert!((cert.lower().unwrap() - 1.0).abs() < 1e-12);
        assert!((cert.bessel_bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_only_constrains_its_range() {
        let fam = OperatorFamily::new(space(&[1.0], &[2]), 2, vec![real(2, 2, &[1.0, 0.0, 0.0, 2.0])]).unwrap();
        let cert = frame_bounds(&fam, &LinearMap::diag(&[1.0, 0.0]), &Tolerance::default()).unwrap();
        assert!((cert.lower().unwrap() - 1.0).abs() < 1e-12);
        assert!((cert.bessel_bound - 4.0).abs() < 1e-12);
        assert!(!cert.is_tight);
    }

    #[test]
    fn zero_k_is_unconstrained() {
        let fam = OperatorFamily::new(space(&[0.5], &[1]), 2, vec![real(1, 2, &[1.0, 1.0])]).unwrap();
        let cert = frame_bounds(&fam, &LinearMap::zeros(2, 2), &Tolerance::default()).unwrap();
        assert_eq!(cert.lower_bound, Bound::Unconstrained);
        assert!(cert.is_ckg_frame && !cert.is_tight && !cert.is_parseval);
    }

    #[test]
    fn range_violation_is_not_a_frame() {
        // S = diag(1, 0) cannot dominate any multiple of KK* = I
        let fam = OperatorFamily::new(space(&[1.0], &[1]), 2, vec![real(1, 2, &[1.0, 0.0])]).unwrap();
        let cert = frame_bounds(&fam, &LinearMap::identity(2), &Tolerance::default()).unwrap();
        assert_eq!(cert.lower_bound, Bound::Finite(0.0));
        assert!(!cert.is_ckg_frame);
    }

    #[test]
    fn frame_bounds_checks_k_shape() {
        let fam = OperatorFamily::new(space(&[1.0], &[2]), 2, vec![CMatrix::identity(2, 2)]).unwrap();
        assert!(matches!(
            frame_bounds(&fam, &LinearMap::identity(3), &Tolerance::default()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn family_shapes_are_validated() {
        let r = OperatorFamily::new(space(&[1.0], &[2]), 2, vec![CMatrix::identity(3, 2)]);
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
        let r = OperatorFamily::new(space(&[1.0, 1.0], &[2, 2]), 2, vec![CMatrix::identity(2, 2)]);
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn flattened_round_trip() {
        let sp = space(&[0.25, 4.0], &[1, 2]);
        let fam = OperatorFamily::new(
            sp.clone(),
            2,
            vec![real(1, 2, &[1.0, -2.0]), real(2, 2, &[0.5, 0.0, 3.0, 1.0])],
        )
        .unwrap();
        let back = OperatorFamily::from_analysis_matrix(sp, &fam.analysis_matrix()).unwrap();
        for (a, b) in fam.blocks().iter().zip(back.blocks()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
