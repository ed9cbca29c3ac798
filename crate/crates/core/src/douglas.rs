//! Range inclusion, majorization and factorization: `ran(L1) ⊆ ran(L2)` iff
//! `L1 L1* ⪯ λ² L2 L2*` for some λ iff `L1 = L2 U` for some `U`.
//!
//! The factor returned is `U = L2† L1`, the one with minimal norm, trivial
//! kernel extension (`N(U) = N(L1)`) and range inside `ran(L2*)`.

use crate::error::{Error, Result};
use crate::linalg::{
    gram, null_basis, numerical_rank, pencil_extremes_matrix, pinv_matrix, range_basis,
    range_residual, spectral_norm, Bound, LinearMap, Tolerance,
};

#[derive(Debug, Clone, PartialEq)]
pub struct DouglasSolution {
    pub u: LinearMap,
    /// `inf{μ : L1 L1* ⪯ μ L2 L2*}`, computed from the pencil, not from `u`.
    pub norm_sq: f64,
    /// `||L1 - L2 U||`.
    pub residual: f64,
    pub null_match: bool,
    pub range_ok: bool,
    /// `||U n||` over an orthonormal basis of `N(L1)`.
    pub null_residual: f64,
    /// `||(I - P_{ran L2*}) U||`.
    pub range_residual: f64,
}

fn check_rows(l1: &LinearMap, l2: &LinearMap) -> Result<()> {
    if l1.rows() != l2.rows() {
        return Err(Error::DimensionMismatch(format!(
            "L1 has {} rows, L2 has {}",
            l1.rows(),
            l2.rows()
        )));
    }
    Ok(())
}

pub fn douglas_solve(l1: &LinearMap, l2: &LinearMap, tol: &Tolerance) -> Result<DouglasSolution> {
    check_rows(l1, l2)?;
    let (a, b) = (l1.matrix(), l2.matrix());
    let l1_norm = l1.norm();

    let projection = range_residual(a, b, tol);
    if !tol.within(projection, l1_norm) {
        return Err(Error::RangeNotIncluded {
            residual: projection,
        });
    }

    let u = pinv_matrix(b, tol) * a;
    let residual = spectral_norm(&(a - b * &u));

    let pencil = pencil_extremes_matrix(&gram(a), &gram(b), tol)?;
    let norm_sq = match pencil.max_ratio {
        Bound::Finite(x) => x,
        // L2 = 0 forces L1 = 0 here
        Bound::Unconstrained if pencil.restricted.is_none() => 0.0,
        Bound::Unconstrained => {
            return Err(Error::RangeNotIncluded {
                residual: projection,
            })
        }
    };

    let u_norm = spectral_norm(&u);
    let kernel = null_basis(a, tol);
    let null_residual = if kernel.ncols() == 0 {
        0.0
    } else {
        spectral_norm(&(&u * &kernel))
    };
    let null_match =
        tol.within(null_residual, u_norm) && numerical_rank(a, tol) == numerical_rank(&u, tol);

    let co_range = range_basis(&b.adjoint(), tol);
    let range_residual = spectral_norm(&(&u - &co_range * (co_range.adjoint() * &u)));
    let range_ok = tol.within(range_residual, u_norm);

    Ok(DouglasSolution {
        u: LinearMap::new(u)?,
        norm_sq,
        residual,
        null_match,
        range_ok,
        null_residual,
        range_residual,
    })
}

/// The three equivalent conditions evaluated by independent routes.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub range_inclusion: bool,
    pub majorization: bool,
    pub factorization: bool,
    pub range_residual: f64,
    /// `inf{λ² : L1 L1* ⪯ λ² L2 L2*}` when finite.
    pub majorization_constant: Bound,
    pub factorization_residual: f64,
}

impl EquivalenceReport {
    pub fn agree(&self) -> bool {
        self.range_inclusion == self.majorization && self.majorization == self.factorization
    }
}

pub fn equivalence_check(
    l1: &LinearMap,
    l2: &LinearMap,
    tol: &Tolerance,
) -> Result<EquivalenceReport> {
    check_rows(l1, l2)?;
    let (a, b) = (l1.matrix(), l2.matrix());
    let scale = l1.norm();

    let range_res = range_residual(a, b, tol);
    let range_inclusion = tol.within(range_res, scale);

    let pencil = pencil_extremes_matrix(&gram(a), &gram(b), tol)?;
    let (majorization, constant) = match pencil.max_ratio {
        Bound::Finite(x) => (true, Bound::Finite(x)),
        // both sides vanish: 0 ⪯ λ² · 0 holds for every λ
        Bound::Unconstrained if pencil.restricted.is_none() && l1.is_zero() => {
            (true, Bound::Finite(0.0))
        }
        Bound::Unconstrained => (false, Bound::Unconstrained),
    };

    let u = pinv_matrix(b, tol) * a;
    let fact_res = spectral_norm(&(a - b * &u));
    let factorization = tol.within(fact_res, scale);

    Ok(EquivalenceReport {
        range_inclusion,
        majorization,
        factorization,
        range_residual: range_res,
        majorization_constant: constant,
        factorization_residual: fact_res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_factors_through_itself() {
        let i2 = LinearMap::identity(2);
        let sol = douglas_solve(&i2, &i2, &Tolerance::default()).unwrap();
        assert!((sol.u.matrix() - i2.matrix()).norm() < 1e-14);
        assert!((sol.norm_sq - 1.0).abs() < 1e-12);
        assert!(sol.null_match && sol.range_ok);
    }

    #[test]
    fn zero_left_operand() {
        let l2 = LinearMap::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let sol = douglas_solve(&LinearMap::zeros(2, 2), &l2, &Tolerance::default()).unwrap();
        assert!(sol.u.is_zero());
        assert_eq!(sol.norm_sq, 0.0);
        assert!(sol.null_match && sol.range_ok);
        let both_zero =
            douglas_solve(&LinearMap::zeros(2, 2), &LinearMap::zeros(2, 3), &Tolerance::default())
                .unwrap();
        assert_eq!(both_zero.norm_sq, 0.0);
        assert_eq!(both_zero.u.rows(), 3);
    }

    #[test]
    fn diagonal_case() {
        let sol = douglas_solve(
            &LinearMap::identity(2),
            &LinearMap::diag(&[2.0, 1.0]),
            &Tolerance::default(),
        )
        .unwrap();
        assert!((sol.u.matrix() - LinearMap::diag(&[0.5, 1.0]).matrix()).norm() < 1e-14);
        assert!((sol.norm_sq - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_ranges_rejected() {
        let l1 = LinearMap::from_real(2, 1, &[1.0, 0.0]).unwrap();
        let l2 = LinearMap::from_real(2, 1, &[0.0, 1.0]).unwrap();
        let err = douglas_solve(&l1, &l2, &Tolerance::default()).unwrap_err();
        match err {
            Error::RangeNotIncluded { residual } => assert!((residual - 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        let rep = equivalence_check(&l1, &l2, &Tolerance::default()).unwrap();
        assert_eq!(
            (rep.range_inclusion, rep.majorization, rep.factorization),
            (false, false, false)
        );
    }

    #[test]
    fn equal_operands_satisfy_all_three() {
        let l = LinearMap::from_real(3, 2, &[1.0, 0.0, 2.0, 1.0, 0.0, -1.0]).unwrap();
        let rep = equivalence_check(&l, &l, &Tolerance::default()).unwrap();
        assert!(rep.range_inclusion && rep.majorization && rep.factorization);
        assert!(rep.agree());
    }

    #[test]
    fn row_mismatch() {
        let r = douglas_solve(&LinearMap::identity(2), &LinearMap::identity(3), &Tolerance::default());
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }
}
