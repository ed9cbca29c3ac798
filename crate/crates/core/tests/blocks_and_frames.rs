mod common;

use std::sync::Arc;

use ckg_core::linalg::{eigh, inner, spectral_norm, CMatrix, CVector};
use ckg_core::random::{self, gaussian_vector, Shape};
use ckg_core::{
    analysis, frame_bounds, frame_operator, synthesis, BlockVector, Bound, MeasurePoints,
    OperatorFamily, Tolerance,
};
use common::{random_shape, rng};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn random_blocks<R: Rng>(r: &mut R, space: &Arc<MeasurePoints>) -> BlockVector {
    let blocks = space
        .block_dims()
        .iter()
        .map(|&d| gaussian_vector(r, d))
        .collect();
    BlockVector::new(space.clone(), blocks).unwrap()
}

#[test]
fn flatten_is_an_isometry() {
    let mut r = rng(1);
    for _ in 0..100 {
        let shape = random_shape(&mut r);
        let space = Arc::new(random::measure(&mut r, &shape, &[]).unwrap());
        let (f, g) = (random_blocks(&mut r, &space), random_blocks(&mut r, &space));
        let direct = f.weighted_inner(&g).unwrap();
        let flat = inner(&f.flatten(), &g.flatten());
        assert!((direct - flat).norm() < 1e-12 * (1.0 + direct.norm()));
        let back = BlockVector::unflatten(space.clone(), &f.flatten()).unwrap();
        for (a, b) in back.blocks().iter().zip(f.blocks()) {
            assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
        }
    }
}

#[test]
fn synthesis_is_the_adjoint_of_analysis() {
    let mut r = rng(2);
    for _ in 0..50 {
        let shape = random_shape(&mut r);
        let g = random::bessel(&mut r, &shape).unwrap();
        let fam = &g.lambda;
        let f = gaussian_vector(&mut r, fam.domain_dim());
        let coeffs = random_blocks(&mut r, fam.space());
        let lhs = analysis(fam, &f).unwrap().weighted_inner(&coeffs).unwrap();
        let rhs = inner(&f, &synthesis(fam, &coeffs).unwrap());
        assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    }
}

#[test]
fn frame_operator_identities() {
    let mut r = rng(3);
    for _ in 0..50 {
        let shape = random_shape(&mut r);
        let g = random::bessel(&mut r, &shape).unwrap();
        let fam = &g.lambda;
        let s = frame_operator(fam);
        // ||T||² = ||S||
        let t_norm = spectral_norm(&fam.synthesis_matrix());
        assert!(common::close(t_norm * t_norm, s.norm(), 1e-10));
        let f = gaussian_vector(&mut r, fam.domain_dim());
        // <Sf, f> = Σ μ ||Λ_i f||²
        let energy = analysis(fam, &f).unwrap().norm_sq();
        assert!(common::close(inner(&s.apply(&f).unwrap(), &f).re, energy, 1e-10));
        // S f = T_Λ(T_Λ* f)
        let round = synthesis(fam, &analysis(fam, &f).unwrap()).unwrap();
        assert!((round - s.apply(&f).unwrap()).norm() < 1e-10 * (1.0 + energy));
        assert!(eigh(s.matrix()).min() >= -1e-12 * s.norm().max(1.0));
    }
}

#[test]
fn disjoint_union_adds_frame_operators() {
    let mut r = rng(4);
    for _ in 0..30 {
        let shape = random_shape(&mut r);
        let a = random::bessel(&mut r, &shape).unwrap().lambda;
        let b = random::bessel(&mut r, &shape).unwrap().lambda;
        let weights = [a.space().weights(), b.space().weights()].concat();
        let dims = [a.space().block_dims(), b.space().block_dims()].concat();
        let union_space = Arc::new(MeasurePoints::new(weights, dims).unwrap());
        let blocks = a.blocks().iter().chain(b.blocks()).cloned().collect();
        let union = OperatorFamily::new(union_space, shape.n, blocks).unwrap();
        let sum = frame_operator(&a).matrix() + frame_operator(&b).matrix();
        assert!((frame_operator(&union).matrix() - &sum).norm() < 1e-10 * sum.norm().max(1.0));
    }
}

#[test]
fn node_permutation_leaves_bounds_unchanged() {
    let tol = Tolerance::default();
    let mut r = rng(5);
    for _ in 0..30 {
        let shape = random_shape(&mut r);
        let g = random::ckg(&mut r, &shape).unwrap();
        let mut perm: Vec<usize> = (0..g.lambda.space().len()).collect();
        perm.shuffle(&mut r);
        let space = Arc::new(g.lambda.space().permuted(&perm).unwrap());
        let moved = g.lambda.permuted(space, &perm).unwrap();
        let before = frame_bounds(&g.lambda, &g.k, &tol).unwrap();
        let after = frame_bounds(&moved, &g.k, &tol).unwrap();
        assert!(common::close(before.bessel_bound, after.bessel_bound, 1e-9));
        assert!(common::close(
            before.lower_bound.finite().unwrap(),
            after.lower_bound.finite().unwrap(),
            1e-9
        ));
    }
}

#[test]
fn generated_frames_satisfy_their_bounds() {
    let tol = Tolerance::default();
    let mut r = rng(6);
    for _ in 0..100 {
        let shape = random_shape(&mut r);
        let g = random::ckg(&mut r, &shape).unwrap();
        let cert = frame_bounds(&g.lambda, &g.k, &tol).unwrap();
        assert!(cert.is_ckg_frame && cert.is_bessel);
        let Bound::Finite(a) = cert.lower_bound else { panic!() };
        let s = frame_operator(&g.lambda).into_matrix();
        let kk = g.k.matrix() * g.k.matrix().adjoint();
        let scale = s.norm().max(1.0);
        // sandwich A KK* ⪯ S ⪯ B I
        assert!(eigh(&(&s - kk.map(|z| z * a))).min() >= -1e-9 * scale);
        let b = cert.bessel_bound;
        assert!(eigh(&(CMatrix::identity(s.nrows(), s.nrows()).map(|z| z * b) - &s)).min() >= -1e-9 * scale);
        // and A is optimal
        let bumped = a * (1.0 + 1e-6);
        assert!(eigh(&(&s - kk.map(|z| z * bumped))).min() < 0.0);
    }
}

#[test]
fn not_a_frame_profile_is_rejected() {
    let tol = Tolerance::default();
    let mut r = rng(7);
    for _ in 0..50 {
        let shape = random_shape(&mut r);
        let g = random::not_a_frame(&mut r, &shape).unwrap();
        let cert = frame_bounds(&g.lambda, &g.k, &tol).unwrap();
        assert!(!cert.is_ckg_frame);
        assert_eq!(cert.lower_bound, Bound::Finite(0.0));
    }
}

#[test]
fn parseval_pair_halves_are_parseval() {
    let tol = Tolerance::default();
    let mut r = rng(8);
    let shape = Shape { n: 3, points: 6, max_block: 3 };
    for _ in 0..20 {
        let g = random::parseval_pair(&mut r, &shape).unwrap();
        for fam in [&g.lambda, g.gamma.as_ref().unwrap()] {
            let s = frame_operator(fam);
            assert!((s.matrix() - CMatrix::identity(3, 3)).norm() < 1e-12);
            let id = ckg_core::LinearMap::identity(3);
            assert!(frame_bounds(fam, &id, &tol).unwrap().is_parseval);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weighted_inner_is_conjugate_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = random_shape(&mut r);
        let space = Arc::new(random::measure(&mut r, &shape, &[]).unwrap());
        let (f, g) = (random_blocks(&mut r, &space), random_blocks(&mut r, &space));
        let fg = f.weighted_inner(&g).unwrap();
        let gf = g.weighted_inner(&f).unwrap();
        prop_assert!((fg - gf.conj()).norm() < 1e-12 * (1.0 + fg.norm()));
        prop_assert!(f.norm_sq() >= 0.0);
    }

    #[test]
    fn frame_bounds_scale_quadratically(seed in any::<u64>(), c in 0.1f64..10.0) {
        let tol = Tolerance::default();
        let mut r = rng(seed);
        let shape = random_shape(&mut r);
        let g = random::ckg(&mut r, &shape).unwrap();
        let scaled = g.lambda.scaled(c);
        let base = frame_bounds(&g.lambda, &g.k, &tol).unwrap();
        let cert = frame_bounds(&scaled, &g.k, &tol).unwrap();
        prop_assert!(common::close(cert.bessel_bound, c * c * base.bessel_bound, 1e-9));
        prop_assert!(common::close(
            cert.lower_bound.finite().unwrap(),
            c * c * base.lower_bound.finite().unwrap(),
            1e-8
        ));
    }

    #[test]
    fn analysis_energy_matches_flat_norm(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = random_shape(&mut r);
        let g = random::bessel(&mut r, &shape).unwrap();
        let f: CVector = gaussian_vector(&mut r, g.lambda.domain_dim());
        let coeffs = analysis(&g.lambda, &f).unwrap();
        let flat = g.lambda.analysis_matrix() * &f;
        prop_assert!(common::close(coeffs.norm_sq(), flat.norm_squared(), 1e-10));
    }
}
