//! Dual c-K-g-Bessel families: verification, the canonical (minimal synthesis
//! norm) dual, the norm floor `||T_Γ||² ≥ 1/A` and duals on `ran(K)`.

use crate::douglas::douglas_solve;
use crate::error::{Error, Result};
use crate::frame::{bessel_bound, frame_bounds, frame_operator, FrameCertificate, OperatorFamily};
use crate::linalg::{null_basis, range_basis, spectral_norm, Bound, CMatrix, LinearMap, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    /// `||K - Σ μ_i Λ_i* Γ_i||`.
    pub duality_residual: f64,
    /// Largest eigenvalue of `S_Γ`.
    pub gamma_bessel_bound: f64,
    /// `||T_Γ||²` from the singular values of the flattened synthesis operator.
    pub synthesis_norm_sq: f64,
    /// `1/A_opt` of the primal family; 0 when `K = 0`, `None` when it is not a c-K-g-frame.
    pub floor: Option<f64>,
    /// Optimal lower bound of the primal family.
    pub primal_lower_bound: Bound,
    pub is_valid: bool,
}

fn check_k(family: &OperatorFamily, k: &LinearMap) -> Result<()> {
    let n = family.domain_dim();
    if k.rows() != n || k.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "K is {}x{}, family acts on C^{n}",
            k.rows(),
            k.cols()
        )));
    }
    Ok(())
}

fn floor_from(lower: Bound, tol: &Tolerance) -> Option<f64> {
    match lower {
        Bound::Unconstrained => Some(0.0),
        Bound::Finite(a) if a > tol.abs => Some(1.0 / a),
        Bound::Finite(_) => None,
    }
}

pub fn verify_dual(
    lambda: &OperatorFamily,
    gamma: &OperatorFamily,
    k: &LinearMap,
    tol: &Tolerance,
) -> Result<DualCertificate> {
    lambda.check_compatible(gamma)?;
    check_k(lambda, k)?;
    let reproduced = lambda.cross_operator(gamma)?;
    let duality_residual = spectral_norm(&(k.matrix() - reproduced));
    let gamma_bessel_bound = bessel_bound(gamma);
    let synthesis_norm_sq = spectral_norm(&gamma.analysis_matrix()).powi(2);
    let primal = frame_bounds(lambda, k, tol)?;
    let floor = floor_from(primal.lower_bound, tol);
    let is_valid = tol.within(duality_residual, k.norm())
        && floor.is_some_and(|fl| synthesis_norm_sq >= fl - tol.rel * fl.max(1.0));
    Ok(DualCertificate {
        duality_residual,
        gamma_bessel_bound,
        synthesis_norm_sq,
        floor,
        primal_lower_bound: primal.lower_bound,
        is_valid,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalDual {
    pub family: OperatorFamily,
    pub certificate: DualCertificate,
    /// `||Φ||² = inf{μ : KK* ⪯ μ S}` from the Douglas pencil.
    pub phi_norm_sq: f64,
}

/// The dual `Θ_i g = (Φ* g)(ω_i)` with `Φ* = T_Λ† K`, the minimal-norm solution of `K = T_Λ Φ*`.
pub fn canonical_dual(
    lambda: &OperatorFamily,
    k: &LinearMap,
    tol: &Tolerance,
) -> Result<CanonicalDual> {
    check_k(lambda, k)?;
    let synthesis = LinearMap::new(lambda.synthesis_matrix())?;
    let solution = match douglas_solve(k, &synthesis, tol) {
        Ok(s) => s,
        Err(Error::RangeNotIncluded { residual }) => return Err(Error::NotKgFrame { residual }),
        Err(e) => return Err(e),
    };
    let family = OperatorFamily::from_analysis_matrix(lambda.space().clone(), solution.u.matrix())?;
    let certificate = verify_dual(lambda, &family, k, tol)?;
    Ok(CanonicalDual {
        family,
        certificate,
        phi_norm_sq: solution.norm_sq,
    })
}

/// `1/A_opt`: every dual satisfies `||T_Γ||² >= dual_norm_floor`.
pub fn dual_norm_floor(lambda: &OperatorFamily, k: &LinearMap, tol: &Tolerance) -> Result<f64> {
    let cert = frame_bounds(lambda, k, tol)?;
    match cert.lower_bound {
        Bound::Unconstrained => Err(Error::Unconstrained),
        Bound::Finite(a) if a > tol.abs => Ok(1.0 / a),
        Bound::Finite(_) => Err(Error::NotKgFrame {
            residual: cert.residuals.get("upper_violation").copied().unwrap_or(0.0),
        }),
    }
}

/// Moves a dual along the kernel of `T_Λ`: `Θ'_flat = Θ_flat + (I - T_Λ† T_Λ) W`.
///
/// The result is again a dual of `Λ`; `w` is `D x n` in the flattened picture.
pub fn perturb_dual(
    lambda: &OperatorFamily,
    dual: &OperatorFamily,
    w: &CMatrix,
    tol: &Tolerance,
) -> Result<OperatorFamily> {
    lambda.check_compatible(dual)?;
    let d = lambda.space().total_dim();
    if w.nrows() != d || w.ncols() != lambda.domain_dim() {
        return Err(Error::DimensionMismatch(format!(
            "perturbation is {}x{}, expected {d}x{}",
            w.nrows(),
            w.ncols(),
            lambda.domain_dim()
        )));
    }
    let kernel = null_basis(&lambda.synthesis_matrix(), tol);
    let shifted = dual.analysis_matrix() + &kernel * (kernel.adjoint() * w);
    OperatorFamily::from_analysis_matrix(lambda.space().clone(), &shifted)
}

/// Lower bound `1/(B_Γ ||K||²)` certified for a Bessel family that has a dual
/// on `ran(K)` and whose frame operator leaves `ran(K)` invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceDualOutcome {
    pub certificate: FrameCertificate,
    pub conclusion_bound: Bound,
    pub gamma_bessel_bound: f64,
    /// `||(I - QQ*) S Q||` for an orthonormal basis `Q` of `ran(K)`.
    pub invariance_residual: f64,
    /// `||Q* T_Λ T_Γ* Q - I||`.
    pub duality_residual: f64,
    pub holds: bool,
}

pub fn subspace_dual_bound(
    lambda: &OperatorFamily,
    gamma: &OperatorFamily,
    k: &LinearMap,
    tol: &Tolerance,
) -> Result<SubspaceDualOutcome> {
    lambda.check_compatible(gamma)?;
    check_k(lambda, k)?;
    let certificate = frame_bounds(lambda, k, tol)?;
    let q = range_basis(k.matrix(), tol);
    if q.ncols() == 0 {
        let holds = certificate.is_ckg_frame;
        return Ok(SubspaceDualOutcome {
            certificate,
            conclusion_bound: Bound::Unconstrained,
            gamma_bessel_bound: bessel_bound(gamma),
            invariance_residual: 0.0,
            duality_residual: 0.0,
            holds,
        });
    }

    let s = frame_operator(lambda);
    let sq = s.matrix() * &q;
    let invariance_residual = spectral_norm(&(&sq - &q * (q.adjoint() * &sq)));
    if !tol.within(invariance_residual, s.norm()) {
        return Err(Error::HypothesisFailed(format!(
            "frame operator does not leave ran(K) invariant (residual {invariance_residual:.3e})"
        )));
    }

    let cross = lambda.cross_operator(gamma)?;
    let compressed = q.adjoint() * &cross * &q;
    let identity = CMatrix::identity(q.ncols(), q.ncols());
    let duality_residual = spectral_norm(&(compressed - identity));
    if !tol.within(duality_residual, spectral_norm(&cross)) {
        return Err(Error::HypothesisFailed(format!(
            "second family is not a dual on ran(K) (residual {duality_residual:.3e})"
        )));
    }

    let gamma_bound = bessel_bound(gamma);
    let bound = 1.0 / (gamma_bound * k.norm().powi(2));
    let holds = match certificate.lower_bound {
        Bound::Finite(a) => a >= bound - tol.rel * bound.max(1.0),
        Bound::Unconstrained => true,
    };
    Ok(SubspaceDualOutcome {
        certificate,
        conclusion_bound: Bound::Finite(bound),
        gamma_bessel_bound: gamma_bound,
        invariance_residual,
        duality_residual,
        holds,
    })
}
