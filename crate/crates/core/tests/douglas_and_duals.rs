mod common;

use ckg_core::linalg::{eigh, gram, null_basis, spectral_norm, CMatrix, C64};
use ckg_core::random::{self, gaussian_matrix, with_singular_values, Shape};
use ckg_core::{
    canonical_dual, douglas_solve, dual_norm_floor, equivalence_check, frame_bounds,
    frame_operator, perturb_dual, subspace_dual_bound, verify_dual, Error, LinearMap,
    OperatorFamily, Tolerance,
};
use common::{close, random_shape, rng};
use proptest::prelude::*;
use rand::Rng;

/// `1/||S^{+1/2} K||²`, computed from the eigenvectors of `S` directly.
fn lower_bound_oracle(family: &OperatorFamily, k: &LinearMap) -> f64 {
    let s = frame_operator(family).into_matrix();
    let e = eigh(&s);
    let cutoff = 1e-10 * e.max();
    let n = s.nrows();
    let mut root_pinv = CMatrix::zeros(n, n);
    for (j, &v) in e.values.iter().enumerate() {
        if v > cutoff {
            let col = e.vectors.column(j);
            root_pinv += (col * col.adjoint()).map(|z| z / v.sqrt());
        }
    }
    1.0 / spectral_norm(&(root_pinv * k.matrix())).powi(2)
}

#[test]
fn douglas_factor_reproduces_and_is_minimal() {
    let tol = Tolerance::default();
    let mut r = rng(21);
    for _ in 0..200 {
        let rows = r.random_range(1..=6);
        let cols2 = r.random_range(1..=6);
        let rank = r.random_range(1..=rows.min(cols2));
        let l2 = with_singular_values(&mut r, rows, cols2, rank, 0.3, 3.0);
        let cols1 = r.random_range(1..=5);
        let x = gaussian_matrix(&mut r, cols2, cols1);
        let l1 = &l2 * &x;
        let (m1, m2) = (LinearMap::new(l1.clone()).unwrap(), LinearMap::new(l2.clone()).unwrap());
        let sol = douglas_solve(&m1, &m2, &tol).unwrap();
        assert!(sol.residual <= 1e-9 * spectral_norm(&l1).max(1.0));
        assert!(sol.null_match && sol.range_ok);
        // ||U||² from singular values agrees with the pencil constant
        assert!(close(sol.u.norm().powi(2), sol.norm_sq, 1e-8));
        let kernel = null_basis(&l2, &tol);
        for _ in 0..5 {
            if kernel.ncols() == 0 {
                break;
            }
            let other = sol.u.matrix() + &kernel * gaussian_matrix(&mut r, kernel.ncols(), cols1);
            assert!(spectral_norm(&(&l2 * &other - &l1)) <= 1e-9 * spectral_norm(&l1).max(1.0));
            assert!(spectral_norm(&other) >= sol.u.norm() * (1.0 - 1e-12));
        }
    }
}

#[test]
fn equivalences_agree_on_mixed_instances() {
    let tol = Tolerance::default();
    let mut r = rng(22);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..200 {
        let rows = r.random_range(2..=6);
        let rank = r.random_range(1..rows);
        let l2 = with_singular_values(&mut r, rows, rows, rank, 0.5, 2.0);
        let l1 = if r.random_bool(0.5) {
            &l2 * gaussian_matrix(&mut r, rows, 3)
        } else {
            with_singular_values(&mut r, rows, rows, rows, 0.5, 2.0)
        };
        let rep = equivalence_check(
            &LinearMap::new(l1).unwrap(),
            &LinearMap::new(l2).unwrap(),
            &tol,
        )
        .unwrap();
        assert!(rep.agree(), "{rep:?}");
        if rep.range_inclusion {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes > 50 && no > 50);
}

#[test]
fn canonical_dual_attains_the_floor() {
    let tol = Tolerance::default();
    let mut r = rng(23);
    for _ in 0..200 {
        let shape = random_shape(&mut r);
        let g = random::ckg(&mut r, &shape).unwrap();
        let dual = canonical_dual(&g.lambda, &g.k, &tol).unwrap();
        assert!(dual.certificate.is_valid);
        assert!(dual.certificate.duality_residual <= 1e-9 * g.k.norm().max(1.0));
        let a = lower_bound_oracle(&g.lambda, &g.k);
        let cert = frame_bounds(&g.lambda, &g.k, &tol).unwrap();
        assert!(close(cert.lower_bound.finite().unwrap(), a, 1e-8));
        assert!(close(dual.certificate.synthesis_norm_sq * a, 1.0, 1e-8));
        assert!(close(dual_norm_floor(&g.lambda, &g.k, &tol).unwrap(), 1.0 / a, 1e-8));
        assert!(close(dual.phi_norm_sq, 1.0 / a, 1e-8));
    }
}

#[test]
fn kernel_perturbations_stay_dual_and_above_floor() {
    let tol = Tolerance::default();
    let mut r = rng(24);
    for _ in 0..60 {
        let shape = random_shape(&mut r);
        let g = random::ckg(&mut r, &shape).unwrap();
        let dual = canonical_dual(&g.lambda, &g.k, &tol).unwrap();
        let floor = dual_norm_floor(&g.lambda, &g.k, &tol).unwrap();
        let d = g.lambda.space().total_dim();
        for _ in 0..20 {
            let w = gaussian_matrix(&mut r, d, shape.n);
            let moved = perturb_dual(&g.lambda, &dual.family, &w, &tol).unwrap();
            let cert = verify_dual(&g.lambda, &moved, &g.k, &tol).unwrap();
            assert!(cert.is_valid);
            assert!(cert.synthesis_norm_sq >= floor * (1.0 - 1e-9));
        }
        // a generic perturbation breaks duality
        let broken = g.lambda.add(&OperatorFamily::from_analysis_matrix(
            g.lambda.space().clone(),
            &gaussian_matrix(&mut r, d, shape.n),
        ).unwrap()).unwrap();
        let shifted = dual.family.add(&broken).unwrap();
        assert!(!verify_dual(&g.lambda, &shifted, &g.k, &tol).unwrap().is_valid);
    }
}

#[test]
fn non_frames_have_no_canonical_dual() {
    let tol = Tolerance::default();
    let mut r = rng(25);
    for _ in 0..30 {
        let shape = random_shape(&mut r);
        let g = random::not_a_frame(&mut r, &shape).unwrap();
        assert!(matches!(canonical_dual(&g.lambda, &g.k, &tol), Err(Error::NotKgFrame { .. })));
        assert!(matches!(dual_norm_floor(&g.lambda, &g.k, &tol), Err(Error::NotKgFrame { .. })));
        // any candidate fails verification
        let cert = verify_dual(&g.lambda, &g.lambda, &g.k, &tol).unwrap();
        assert!(!cert.is_valid && cert.floor.is_none());
    }
}

#[test]
fn zero_operator_floor_is_unconstrained() {
    let mut r = rng(26);
    let g = random::bessel(&mut r, &Shape::default()).unwrap();
    let zero = LinearMap::zeros(4, 4);
    assert_eq!(dual_norm_floor(&g.lambda, &zero, &Tolerance::default()), Err(Error::Unconstrained));
}

#[test]
fn subspace_duals_certify_their_bound() {
    let tol = Tolerance::default();
    let mut r = rng(27);
    let shape = Shape { n: 5, points: 8, max_block: 3 };
    for trial in 0..60 {
        let g = random::subspace(&mut r, &shape, trial % 3 == 0).unwrap();
        let gamma = g.gamma.as_ref().unwrap();
        let out = subspace_dual_bound(&g.lambda, gamma, &g.k, &tol).unwrap();
        assert!(out.holds, "{out:?}");
        let bound = out.conclusion_bound.finite().unwrap();
        assert!(out.certificate.lower_bound.finite().unwrap() >= bound * (1.0 - 1e-9));

        let rotated = random::rotated(&mut r, &g.lambda).unwrap();
        match subspace_dual_bound(&rotated, gamma, &g.k, &tol) {
            Err(Error::HypothesisFailed(msg)) => assert!(msg.contains("invariant"), "{msg}"),
            other => panic!("rotation kept invariance: {other:?}"),
        }
    }
}

#[test]
fn projection_dual_example() {
    // S = diag(2, 3) with K the projection onto e1 and Γ = Λ/2 on that line
    let tol = Tolerance::default();
    let space = std::sync::Arc::new(ckg_core::MeasurePoints::new(vec![1.0, 1.0], vec![1, 1]).unwrap());
    let c = |x: f64| C64::new(x, 0.0);
    let lambda = OperatorFamily::new(
        space.clone(),
        2,
        vec![CMatrix::from_row_slice(1, 2, &[c(2f64.sqrt()), c(0.0)]), CMatrix::from_row_slice(1, 2, &[c(0.0), c(3f64.sqrt())])],
    )
    .unwrap();
    let gamma = OperatorFamily::new(
        space,
        2,
        vec![CMatrix::from_row_slice(1, 2, &[c(0.5f64.sqrt()), c(0.0)]), CMatrix::zeros(1, 2)],
    )
    .unwrap();
    let k = LinearMap::diag(&[1.0, 0.0]);
    let out = subspace_dual_bound(&lambda, &gamma, &k, &tol).unwrap();
    // B_Γ = 1/2 so the bound is 2, and the optimum is exactly 2
    assert!((out.conclusion_bound.finite().unwrap() - 2.0).abs() < 1e-12);
    assert!((out.certificate.lower_bound.finite().unwrap() - 2.0).abs() < 1e-12);
    assert!(out.holds);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn canonical_dual_is_invariant_under_node_permutation(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let tol = Tolerance::default();
        let mut r = rng(seed);
        let shape = random_shape(&mut r);
        let g = random::ckg(&mut r, &shape).unwrap();
        let mut perm: Vec<usize> = (0..shape.points).collect();
        perm.shuffle(&mut r);
        let space = std::sync::Arc::new(g.lambda.space().permuted(&perm).unwrap());
        let moved = g.lambda.permuted(space, &perm).unwrap();
        let a = canonical_dual(&g.lambda, &g.k, &tol).unwrap();
        let b = canonical_dual(&moved, &g.k, &tol).unwrap();
        prop_assert!(close(a.certificate.synthesis_norm_sq, b.certificate.synthesis_norm_sq, 1e-9));
        for (k, &i) in perm.iter().enumerate() {
            prop_assert!((b.family.block(k) - a.family.block(i)).norm() < 1e-9);
        }
    }

    #[test]
    fn majorization_constant_matches_factor_norm(seed in any::<u64>()) {
        let tol = Tolerance::default();
        let mut r = rng(seed);
        let n = r.random_range(1..=5);
        let l2 = gaussian_matrix(&mut r, n, n + 1);
        let l1 = &l2 * gaussian_matrix(&mut r, n + 1, 2);
        let rep = equivalence_check(&LinearMap::new(l1.clone()).unwrap(), &LinearMap::new(l2.clone()).unwrap(), &tol).unwrap();
        let c = rep.majorization_constant.finite().unwrap();
        // c·L2L2* - L1L1* is PSD
        let gap = gram(&l2).map(|z| z * c) - gram(&l1);
        prop_assert!(eigh(&gap).min() >= -1e-9 * gap.norm().max(1.0));
    }
}
