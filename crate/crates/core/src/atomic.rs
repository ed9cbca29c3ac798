//! Atomic cg-systems and the constructions that produce new ones.
//!
//! A family is atomic for `K` when every `Kf` is synthesized from coefficients
//! `φ_f` with `||φ_f||_2 <= C ||f||`. The witness used throughout is the
//! minimal-norm coefficient map `f ↦ T_Λ† K f`, which is the analysis operator
//! of the canonical dual.

use crate::duals::{canonical_dual, verify_dual};
use crate::error::{Error, Result};
use crate::frame::{analysis, bessel_bound, frame_bounds, frame_operator, FrameCertificate, OperatorFamily};
use crate::linalg::{
    eigh, gram, min_eigenvalue, pencil_extremes_matrix, pinv_matrix, range_basis,
    range_included_matrix, spectral_norm, thin_svd, Bound, CMatrix, CVector, LinearMap, Tolerance,
};
use crate::block::BlockVector;

/// A formula lower bound next to the optimal one computed from the pencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub formula: Bound,
    pub empirical: Bound,
    pub holds: bool,
}

impl BoundCheck {
    /// The formula is a valid lower bound when it does not exceed the optimum.
    pub fn lower(formula: Bound, empirical: Bound, tol: &Tolerance) -> Self {
        let holds = match (formula, empirical) {
            (_, Bound::Unconstrained) => true,
            (Bound::Unconstrained, Bound::Finite(_)) => false,
            (Bound::Finite(f), Bound::Finite(e)) => e >= f - tol.rel * f.max(1.0),
        };
        BoundCheck {
            formula,
            empirical,
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicCertificate {
    pub is_atomic: bool,
    /// `||T_Θ||` of the canonical dual; 0 when not atomic.
    pub minimal_c: f64,
    pub equivalence_agrees: bool,
    pub frame: FrameCertificate,
    /// `||K - T_Λ T_Θ*||` for the constructed coefficient map.
    pub reconstruction_residual: Option<f64>,
}

impl AtomicCertificate {
    /// `minimal_c² · A_opt`, which equals 1 for the minimal-norm witness.
    pub fn c_times_bound(&self) -> Option<f64> {
        self.frame.lower().map(|a| self.minimal_c.powi(2) * a)
    }
}

pub fn atomic_check(lambda: &OperatorFamily, k: &LinearMap, tol: &Tolerance) -> Result<AtomicCertificate> {
    let frame = frame_bounds(lambda, k, tol)?;
    let (is_atomic, minimal_c, reconstruction_residual) = match canonical_dual(lambda, k, tol) {
        Ok(dual) => {
            let res = dual.certificate.duality_residual;
            let ok = tol.within(res, k.norm());
            let c = spectral_norm(&dual.family.analysis_matrix());
            (ok, if ok { c } else { 0.0 }, Some(res))
        }
        Err(Error::NotKgFrame { .. }) => (false, 0.0, None),
        Err(e) => return Err(e),
    };
    Ok(AtomicCertificate {
        is_atomic,
        minimal_c,
        equivalence_agrees: is_atomic == frame.is_ckg_frame,
        frame,
        reconstruction_residual,
    })
}

/// Minimal-norm coefficients `φ_f` with `T_Λ φ_f = K f`.
pub fn coefficient_map(
    lambda: &OperatorFamily,
    k: &LinearMap,
    f: &CVector,
    tol: &Tolerance,
) -> Result<BlockVector> {
    let dual = match canonical_dual(lambda, k, tol) {
        Ok(d) => d,
        Err(Error::NotKgFrame { .. }) => return Err(Error::NotAtomic("K".into())),
        Err(e) => return Err(e),
    };
    if !tol.within(dual.certificate.duality_residual, k.norm()) {
        return Err(Error::NotAtomic("K".into()));
    }
    analysis(&dual.family, f)
}

fn require_square(name: &str, m: &LinearMap, n: usize) -> Result<()> {
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{name} is {}x{}, expected {n}x{n}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraOutcome {
    pub k1: FrameCertificate,
    pub k2: FrameCertificate,
    /// For `αK1 + βK2`: formula `A1 A2 / (2(α² A2 + β² A1))`.
    pub sum: BoundCheck,
    pub sum_certificate: FrameCertificate,
    /// For `K1 K2`: formula `A1 / ||K2*||²`.
    pub product: BoundCheck,
    pub product_certificate: FrameCertificate,
}

pub fn operator_algebra_bounds(
    lambda: &OperatorFamily,
    k1: &LinearMap,
    k2: &LinearMap,
    alpha: f64,
    beta: f64,
    tol: &Tolerance,
) -> Result<AlgebraOutcome> {
    if alpha == 0.0 || beta == 0.0 || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "coefficients must be nonzero reals (alpha={alpha}, beta={beta})"
        )));
    }
    let n = lambda.domain_dim();
    require_square("K1", k1, n)?;
    require_square("K2", k2, n)?;
    let c1 = frame_bounds(lambda, k1, tol)?;
    if !c1.is_ckg_frame {
        return Err(Error::NotAtomic("K1".into()));
    }
    let c2 = frame_bounds(lambda, k2, tol)?;
    if !c2.is_ckg_frame {
        return Err(Error::NotAtomic("K2".into()));
    }
    let (a2s, b2s) = (alpha * alpha, beta * beta);
    let sum_formula = match (c1.lower_bound, c2.lower_bound) {
        (Bound::Finite(a1), Bound::Finite(a2)) => Bound::Finite(a1 * a2 / (2.0 * (a2s * a2 + b2s * a1))),
        // limits as one of the bounds grows without bound
        (Bound::Unconstrained, Bound::Finite(a2)) => Bound::Finite(a2 / (2.0 * b2s)),
        (Bound::Finite(a1), Bound::Unconstrained) => Bound::Finite(a1 / (2.0 * a2s)),
        (Bound::Unconstrained, Bound::Unconstrained) => Bound::Unconstrained,
    };
    let k2_norm = k2.norm();
    let product_formula = match c1.lower_bound {
        Bound::Finite(a1) if k2_norm > 0.0 => Bound::Finite(a1 / (k2_norm * k2_norm)),
        _ => Bound::Unconstrained,
    };

    let sum_op = k1.combine(alpha, k2, beta)?;
    let product_op = k1.compose(k2)?;
    let sum_certificate = frame_bounds(lambda, &sum_op, tol)?;
    let product_certificate = frame_bounds(lambda, &product_op, tol)?;
    Ok(AlgebraOutcome {
        sum: BoundCheck::lower(sum_formula, sum_certificate.lower_bound, tol),
        product: BoundCheck::lower(product_formula, product_certificate.lower_bound, tol),
        k1: c1,
        k2: c2,
        sum_certificate,
        product_certificate,
    })
}

/// Result of combining two families whose synthesis operators are orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CombineOutcome {
    pub family: OperatorFamily,
    pub certificate: FrameCertificate,
    pub lower: BoundCheck,
    /// Formula upper bound, when the construction provides one.
    pub upper_formula: Option<f64>,
    pub upper_holds: bool,
    /// `||S_combined - (U* S_Λ U + V* S_Γ V)|| / max(1, ||S_combined||)`.
    pub additivity_residual: f64,
    /// Constant `C = σ_min(U)²`, where applicable.
    pub bounded_below_constant: Option<f64>,
}

fn cross_vanishes(lambda: &OperatorFamily, gamma: &OperatorFamily, tol: &Tolerance) -> Result<()> {
    let cross = spectral_norm(&lambda.cross_operator(gamma)?);
    let scale = spectral_norm(&lambda.analysis_matrix()) * spectral_norm(&gamma.analysis_matrix());
    if !tol.within(cross, scale) {
        return Err(Error::HypothesisFailed(format!(
            "synthesis operators are not orthogonal (||T_Λ T_Γ*|| = {cross:.3e})"
        )));
    }
    Ok(())
}

fn require_frame(family: &OperatorFamily, k: &LinearMap, name: &str, tol: &Tolerance) -> Result<FrameCertificate> {
    let cert = frame_bounds(family, k, tol)?;
    if !cert.is_ckg_frame {
        return Err(Error::HypothesisFailed(format!("{name} is not atomic for K")));
    }
    Ok(cert)
}

fn additivity(
    combined: &LinearMap,
    lambda: &OperatorFamily,
    u: &LinearMap,
    gamma: &OperatorFamily,
    v: &LinearMap,
) -> f64 {
    let (u, v) = (u.matrix(), v.matrix());
    let split = u.adjoint() * frame_operator(lambda).matrix() * u
        + v.adjoint() * frame_operator(gamma).matrix() * v;
    spectral_norm(&(combined.matrix() - split)) / combined.norm().max(1.0)
}

/// `{Λ_i U + Γ_i V}` for `T_Λ T_Γ* = 0`, `U` bounded below and commuting with `K*`.
pub fn orthogonal_combine(
    lambda: &OperatorFamily,
    gamma: &OperatorFamily,
    u: &LinearMap,
    v: &LinearMap,
    k: &LinearMap,
    tol: &Tolerance,
) -> Result<CombineOutcome> {
    lambda.check_compatible(gamma)?;
    let n = lambda.domain_dim();
    require_square("U", u, n)?;
    require_square("V", v, n)?;
    require_square("K", k, n)?;
    cross_vanishes(lambda, gamma, tol)?;

    let sigma_min = thin_svd(u.matrix()).sigma.last().copied().unwrap_or(0.0);
    if sigma_min <= tol.abs.max(tol.rel * u.norm()) {
        return Err(Error::HypothesisFailed(format!(
            "U is not bounded below (smallest singular value {sigma_min:.3e})"
        )));
    }
    let ks = k.adjoint();
    let commutator = spectral_norm(&(u.matrix() * ks.matrix() - ks.matrix() * u.matrix()));
    if !tol.within(commutator, u.norm() * k.norm()) {
        return Err(Error::HypothesisFailed(format!(
            "U does not commute with K* (residual {commutator:.3e})"
        )));
    }
    let c1 = require_frame(lambda, k, "first family", tol)?;
    let c2 = require_frame(gamma, k, "second family", tol)?;

    let family = lambda.compose_right(u)?.add(&gamma.compose_right(v)?)?;
    let certificate = frame_bounds(&family, k, tol)?;
    let constant = sigma_min * sigma_min;
    let lower_formula = match c1.lower_bound {
        Bound::Finite(a1) => Bound::Finite(constant * a1),
        Bound::Unconstrained => Bound::Unconstrained,
    };
    let upper = c1.bessel_bound * u.norm().powi(2) + c2.bessel_bound * v.norm().powi(2);
    let additivity_residual = additivity(&frame_operator(&family), lambda, u, gamma, v);
    Ok(CombineOutcome {
        lower: BoundCheck::lower(lower_formula, certificate.lower_bound, tol),
        upper_holds: certificate.bessel_bound <= upper + tol.rel * upper.max(1.0),
        upper_formula: Some(upper),
        additivity_residual,
        bounded_below_constant: Some(constant),
        family,
        certificate,
    })
}

/// `{Λ_i U1 + Γ_i U2}` for `T_Λ T_Γ* = 0` with `ran(T_Λ) ⊆ ran(U1* T_Λ)` and
/// `ran(T_Γ) ⊆ ran(U2* T_Γ)`; lower bound `1/λ1 + 1/λ2`.
pub fn range_combine(
    lambda: &OperatorFamily,
    gamma: &OperatorFamily,
    u1: &LinearMap,
    u2: &LinearMap,
    k: &LinearMap,
    tol: &Tolerance,
) -> Result<CombineOutcome> {
    lambda.check_compatible(gamma)?;
    let n = lambda.domain_dim();
    require_square("U1", u1, n)?;
    require_square("U2", u2, n)?;
    require_square("K", k, n)?;
    cross_vanishes(lambda, gamma, tol)?;

    let t1 = lambda.synthesis_matrix();
    let t2 = gamma.synthesis_matrix();
    let m1 = u1.matrix().adjoint() * &t1;
    let m2 = u2.matrix().adjoint() * &t2;
    if !range_included_matrix(&t1, &m1, tol) {
        return Err(Error::HypothesisFailed("ran(T_Λ) ⊄ ran(U1* T_Λ)".into()));
    }
    if !range_included_matrix(&t2, &m2, tol) {
        return Err(Error::HypothesisFailed("ran(T_Γ) ⊄ ran(U2* T_Γ)".into()));
    }
    require_frame(lambda, k, "first family", tol)?;
    require_frame(gamma, k, "second family", tol)?;

    let kk = gram(k.matrix());
    let inverse_constant = |m: &CMatrix| -> Result<Bound> {
        let p = pencil_extremes_matrix(&kk, &gram(m), tol)?;
        Ok(match p.max_ratio {
            Bound::Finite(l) if l > 0.0 => Bound::Finite(1.0 / l),
            Bound::Finite(_) => Bound::Unconstrained,
            Bound::Unconstrained => Bound::Finite(0.0),
        })
    };
    let formula = match (inverse_constant(&m1)?, inverse_constant(&m2)?) {
        (Bound::Finite(a), Bound::Finite(b)) => Bound::Finite(a + b),
        _ => Bound::Unconstrained,
    };

    let family = lambda.compose_right(u1)?.add(&gamma.compose_right(u2)?)?;
    let certificate = frame_bounds(&family, k, tol)?;
    let additivity_residual = additivity(&frame_operator(&family), lambda, u1, gamma, u2);
    Ok(CombineOutcome {
        lower: BoundCheck::lower(formula, certificate.lower_bound, tol),
        upper_formula: None,
        upper_holds: true,
        additivity_residual,
        bounded_below_constant: None,
        family,
        certificate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbOutcome {
    pub family: OperatorFamily,
    pub certificate: FrameCertificate,
    pub original: FrameCertificate,
    /// `||S_new - (I+Uⁿ)* S (I+Uⁿ)|| / max(1, ||(I+Uⁿ)* S (I+Uⁿ)||)`.
    pub operator_residual: f64,
    /// Smallest eigenvalue of `S_new - A·KK*` (A the original optimal bound).
    pub dominance_margin: f64,
    pub holds: bool,
}

/// `{Λ_i (I + Uⁿ)}` for a positive `U` commuting with the frame operator.
pub fn positive_perturb(
    lambda: &OperatorFamily,
    u: &LinearMap,
    power: u32,
    k: &LinearMap,
    tol: &Tolerance,
) -> Result<PerturbOutcome> {
    if power == 0 {
        return Err(Error::InvalidParameter("power must be positive".into()));
    }
    let n = lambda.domain_dim();
    require_square("U", u, n)?;
    require_square("K", k, n)?;
    let um = u.matrix();
    let asym = spectral_norm(&(um - um.adjoint()));
    if !tol.within(asym, u.norm()) {
        return Err(Error::HypothesisFailed(format!("U is not Hermitian (asymmetry {asym:.3e})")));
    }
    let min_eig = min_eigenvalue(um);
    if min_eig < -(tol.rel * u.norm() + tol.abs) {
        return Err(Error::HypothesisFailed(format!("U is not positive (eigenvalue {min_eig:.3e})")));
    }
    let s = frame_operator(lambda);
    let sm = s.matrix();
    let commutator = spectral_norm(&(um * sm - sm * um));
    if !tol.within(commutator, u.norm() * s.norm()) {
        return Err(Error::HypothesisFailed(format!(
            "U does not commute with the frame operator (residual {commutator:.3e})"
        )));
    }
    let original = require_frame(lambda, k, "family", tol)?;

    let mut upow = CMatrix::identity(n, n);
    for _ in 0..power {
        upow = &upow * um;
    }
    let shift = LinearMap::new(CMatrix::identity(n, n) + upow)?;
    let family = lambda.compose_right(&shift)?;
    let direct = frame_operator(&family);
    let formula = shift.matrix().adjoint() * sm * shift.matrix();
    let operator_residual =
        spectral_norm(&(direct.matrix() - &formula)) / spectral_norm(&formula).max(1.0);
    let certificate = frame_bounds(&family, k, tol)?;

    let dominance_margin = match original.lower_bound {
        Bound::Finite(a) => eigh(&(direct.matrix() - gram(k.matrix()).map(|z| z * a))).min(),
        Bound::Unconstrained => eigh(direct.matrix()).min(),
    };
    let holds = dominance_margin >= -(tol.rel * direct.norm().max(1.0))
        && BoundCheck::lower(original.lower_bound, certificate.lower_bound, tol).holds;
    Ok(PerturbOutcome {
        family,
        certificate,
        original,
        operator_residual,
        dominance_margin,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedDual {
    /// `Θ_i = Γ_i K† Q`, acting on coordinates of `ran(K)` in the basis `Q`.
    pub family: OperatorFamily,
    /// Orthonormal basis of `ran(K)` (`n x r`).
    pub basis: CMatrix,
    /// Frame bounds of `Θ` as an ordinary cg-frame for `ran(K)`.
    pub certificate: FrameCertificate,
    /// `B_Γ ||K†||²`.
    pub upper_formula: f64,
    /// `||Σ μ_i Λ_i* Θ_i - Q||`.
    pub reconstruction_residual: f64,
    /// `||Σ μ_i Θ_i* Λ_i Q - I_r||`.
    pub adjoint_residual: f64,
    pub holds: bool,
}

pub fn restricted_dual_frame(
    lambda: &OperatorFamily,
    gamma: &OperatorFamily,
    k: &LinearMap,
    tol: &Tolerance,
) -> Result<RestrictedDual> {
    lambda.check_compatible(gamma)?;
    require_square("K", k, lambda.domain_dim())?;
    let q = range_basis(k.matrix(), tol);
    if q.ncols() == 0 {
        return Err(Error::ZeroOperator);
    }
    let dual = verify_dual(lambda, gamma, k, tol)?;
    if !tol.within(dual.duality_residual, k.norm()) {
        return Err(Error::NotADual {
            residual: dual.duality_residual,
        });
    }

    let kpinv = pinv_matrix(k.matrix(), tol);
    let w = &kpinv * &q;
    let r = q.ncols();
    let blocks: Vec<CMatrix> = gamma.blocks().iter().map(|g| g * &w).collect();
    let family = OperatorFamily::new(gamma.space().clone(), r, blocks)?;

    let weights = lambda.space().weights();
    let mut synth = CMatrix::zeros(lambda.domain_dim(), r);
    let mut adjoint_order = CMatrix::zeros(r, r);
    for i in 0..weights.len() {
        let (l, t) = (lambda.block(i), family.block(i));
        synth += (l.adjoint() * t).map(|z| z * weights[i]);
        adjoint_order += (t.adjoint() * l * &q).map(|z| z * weights[i]);
    }
    let reconstruction_residual = spectral_norm(&(synth - &q));
    let adjoint_residual = spectral_norm(&(adjoint_order - CMatrix::identity(r, r)));

    let certificate = frame_bounds(&family, &LinearMap::identity(r), tol)?;
    let upper_formula = bessel_bound(gamma) * spectral_norm(&kpinv).powi(2);
    let holds = tol.within(reconstruction_residual, 1.0)
        && tol.within(adjoint_residual, 1.0)
        && certificate.is_ckg_frame
        && certificate.bessel_bound <= upper_formula + tol.rel * upper_formula.max(1.0);
    Ok(RestrictedDual {
        family,
        basis: q,
        certificate,
        upper_formula,
        reconstruction_residual,
        adjoint_residual,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::MeasurePoints;
    use std::sync::Arc;

    fn identity_family() -> OperatorFamily {
        let sp = Arc::new(MeasurePoints::new(vec![1.0], vec![2]).unwrap());
        OperatorFamily::new(sp, 2, vec![CMatrix::identity(2, 2)]).unwrap()
    }

    #[test]
    fn identity_is_atomic_with_unit_constant() {
        let cert = atomic_check(&identity_family(), &LinearMap::identity(2), &Tolerance::default()).unwrap();
        assert!(cert.is_atomic && cert.equivalence_agrees);
        assert!((cert.minimal_c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_operator_is_atomic_with_zero_constant() {
        let fam = identity_family();
        let tol = Tolerance::default();
        let cert = atomic_check(&fam, &LinearMap::zeros(2, 2), &tol).unwrap();
        assert!(cert.is_atomic && cert.equivalence_agrees);
        assert_eq!(cert.minimal_c, 0.0);
        let f = CVector::from_vec(vec![crate::frame::c(1.0), crate::frame::c(-3.0)]);
        let phi = coefficient_map(&fam, &LinearMap::zeros(2, 2), &f, &tol).unwrap();
        assert_eq!(phi.norm_sq(), 0.0);
    }

    #[test]
    fn coefficient_map_requires_atomicity() {
        let sp = Arc::new(MeasurePoints::new(vec![1.0], vec![1]).unwrap());
        let fam = OperatorFamily::new(sp, 2, vec![CMatrix::from_row_slice(1, 2, &[crate::frame::c(1.0), crate::frame::c(0.0)])]).unwrap();
        let r = coefficient_map(&fam, &LinearMap::identity(2), &CVector::zeros(2), &Tolerance::default());
        assert_eq!(r, Err(Error::NotAtomic("K".into())));
        let cert = atomic_check(&fam, &LinearMap::identity(2), &Tolerance::default()).unwrap();
        assert!(!cert.is_atomic && !cert.frame.is_ckg_frame && cert.equivalence_agrees);
    }

    #[test]
    fn algebra_rejects_zero_coefficients() {
        let fam = identity_family();
        let i = LinearMap::identity(2);
        let r = operator_algebra_bounds(&fam, &i, &i, 0.0, 1.0, &Tolerance::default());
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn perturb_with_zero_is_identity_operation() {
        let fam = identity_family();
        let out = positive_perturb(&fam, &LinearMap::zeros(2, 2), 1, &LinearMap::identity(2), &Tolerance::default())
            .unwrap();
        assert_eq!(out.certificate, out.original);
        assert!(out.holds);
    }

    #[test]
    fn perturb_with_identity_quadruples() {
        let fam = identity_family();
        let out = positive_perturb(&fam, &LinearMap::identity(2), 1, &LinearMap::identity(2), &Tolerance::default())
            .unwrap();
        assert!((out.certificate.lower().unwrap() - 4.0).abs() < 1e-12);
        assert!(out.operator_residual < 1e-14);
    }

    #[test]
    fn perturb_rejects_non_positive() {
        let fam = identity_family();
        let r = positive_perturb(&fam, &LinearMap::diag(&[1.0, -1.0]), 1, &LinearMap::identity(2), &Tolerance::default());
        assert!(matches!(r, Err(Error::HypothesisFailed(_))));
    }

    #[test]
    fn restricted_dual_needs_nonzero_k_and_a_dual() {
        let fam = identity_family();
        let tol = Tolerance::default();
        assert_eq!(
            restricted_dual_frame(&fam, &fam, &LinearMap::zeros(2, 2), &tol),
            Err(Error::ZeroOperator)
        );
        let r = restricted_dual_frame(&fam, &fam.scaled(2.0), &LinearMap::identity(2), &tol);
        assert!(matches!(r, Err(Error::NotADual { .. })));
    }

    #[test]
    fn restricted_dual_with_identity() {
        let fam = identity_family();
        let out = restricted_dual_frame(&fam, &fam, &LinearMap::identity(2), &Tolerance::default()).unwrap();
        assert!(out.holds);
        assert!(out.reconstruction_residual < 1e-14);
    }
}
