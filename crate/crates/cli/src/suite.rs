//! Property suites over freshly generated instances, one per construction.

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use ckg_core::linalg::{eigh, gram, spectral_norm};
use ckg_core::random::{self, gaussian_matrix, gaussian_vector, unit_vector, unitary, with_singular_values, Shape};
use ckg_core::{
    atomic_check, canonical_dual, coefficient_map, douglas_solve, dual_norm_floor, equivalence_check,
    frame_bounds, frame_operator, operator_algebra_bounds, orthogonal_combine, perturb_dual, positive_perturb,
    range_combine, restricted_dual_frame, subspace_dual_bound, synthesis, verify_dual, Bound,
    Error, LinearMap, OperatorFamily, Tolerance,
};

use crate::checks::{PENCIL_AGREEMENT, PRODUCT_AGREEMENT};
use crate::error::{CliError, Result};
use crate::generate::{commuting_multiplier, commuting_positive, near_identity};

pub const SUITES: [&str; 12] = [
    "douglas",
    "frame-bounds",
    "dual-characterization",
    "dual-floor",
    "subspace-dual",
    "atomic-equivalence",
    "operator-algebra",
    "orthogonal-combine",
    "range-combine",
    "positive-perturb",
    "parseval-sum",
    "restricted-dual",
];

/// Cross-term cancellation is exact up to rounding, so it gets a tighter limit than `tol.rel`.
pub const ADDITIVITY_LIMIT: f64 = 1e-10;
/// Random test vectors per instance for the pointwise inequalities.
pub const SAMPLE_VECTORS: usize = 1000;
/// Kernel perturbations per instance in the dual suites.
pub const PERTURBATIONS: usize = 20;
/// Listed failures per suite; the counts are always complete.
const MAX_LISTED: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    /// Largest observed value of each error-like quantity.
    pub max: IndexMap<String, f64>,
    /// Smallest observed value of each margin-like quantity.
    pub min: IndexMap<String, f64>,
    pub counts: IndexMap<String, u64>,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn count(&self, name: &str) -> u64 {
        self.counts.get(name).copied().unwrap_or(0)
    }

    pub fn max_of(&self, name: &str) -> f64 {
        self.max.get(name).copied().unwrap_or(f64::NAN)
    }

    pub fn min_of(&self, name: &str) -> f64 {
        self.min.get(name).copied().unwrap_or(f64::NAN)
    }
}

/// What one trial observed.
#[derive(Default)]
struct Recorder {
    max: Vec<(&'static str, f64)>,
    min: Vec<(&'static str, f64)>,
    counts: Vec<(&'static str, u64)>,
    failures: Vec<String>,
}

impl Recorder {
    /// Records an error-like value that must stay at or below `limit`.
    fn at_most(&mut self, name: &'static str, value: f64, limit: f64) {
        self.max.push((name, value));
        if !(value <= limit) {
            self.failures.push(format!("{name} = {value:.3e} exceeds {limit:.1e}"));
        }
    }

    /// Records a margin that must stay strictly above `limit`.
    fn above(&mut self, name: &'static str, value: f64, limit: f64) {
        self.min.push((name, value));
        if !(value > limit) {
            self.failures.push(format!("{name} = {value:.3e} is not above {limit:.1e}"));
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn count(&mut self, name: &'static str) {
        self.counts.push((name, 1));
    }
}

fn rel(value: f64, scale: f64) -> f64 {
    value / scale.abs().max(1.0)
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn trial_rng(seed: u64, suite: &str, trial: usize) -> ChaCha8Rng {
    // FNV-1a keeps suite streams independent of their position in SUITES
    let tag = suite
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(tag) ^ splitmix(trial as u64).rotate_left(17)))
}

fn any_shape<R: Rng>(rng: &mut R) -> Shape {
    Shape {
        n: rng.random_range(2..=8),
        points: rng.random_range(2..=12),
        max_block: rng.random_range(1..=4),
    }
}

/// Room for a rank-`n` piece on each half of the nodes.
fn pair_shape<R: Rng>(rng: &mut R) -> Shape {
    let n: usize = rng.random_range(2..=6);
    let max_block = rng.random_range(2..=4);
    let half = n.div_ceil(max_block);
    Shape {
        n,
        points: rng.random_range(2 * half..=(2 * half + 4).min(16)),
        max_block,
    }
}

/// Room for `ran(T_Λ) = C^n`.
fn full_shape<R: Rng>(rng: &mut R) -> Shape {
    let n = rng.random_range(2..=8);
    let max_block = rng.random_range(1..=4);
    Shape {
        n,
        points: rng.random_range(n.div_ceil(max_block)..=12.max(n.div_ceil(max_block))),
        max_block,
    }
}

/// Minimum over sampled unit vectors of the slack in `lower ||K* f||² <= E(f) <= upper ||f||²`,
/// as the largest relative violation of either side.
fn sandwich_violation<R: Rng>(
    rng: &mut R,
    family: &OperatorFamily,
    k: &LinearMap,
    lower: f64,
    upper: f64,
) -> (f64, f64) {
    let analysis = family.analysis_matrix();
    let ks = k.adjoint().into_matrix();
    let scale = upper.max(1.0);
    let (mut low, mut high) = (0.0f64, 0.0f64);
    for _ in 0..SAMPLE_VECTORS {
        let f = unit_vector(rng, family.domain_dim());
        let energy = (&analysis * &f).norm_squared();
        let kf = (&ks * &f).norm_squared();
        low = low.max((lower * kf - energy) / scale);
        high = high.max((energy - upper) / scale);
    }
    (low, high)
}

fn douglas(rng: &mut ChaCha8Rng, trial: usize, tol: &Tolerance, rec: &mut Recorder) -> std::result::Result<(), Error> {
    let rows = rng.random_range(2..=8);
    let cols2 = rng.random_range(1..=8);
    let rank = rng.random_range(1..=rows.min(cols2));
    let l2 = with_singular_values(rng, rows, cols2, rank, 0.3, 3.0);
    let cols1 = rng.random_range(1..=6);
    let l1 = &l2 * gaussian_matrix(rng, cols2, cols1);
    let (m1, m2) = (LinearMap::new(l1)?, LinearMap::new(l2)?);

    let sol = douglas_solve(&m1, &m2, tol)?;
    let scale = m1.norm();
    rec.at_most("factorization_residual", rel(sol.residual, scale), tol.rel);
    let u_sq = sol.u.norm().powi(2);
    rec.at_most("pencil_mismatch", rel((u_sq - sol.norm_sq).abs(), sol.norm_sq), PENCIL_AGREEMENT);
    let kernel_rank_gap = ckg_core::linalg::numerical_rank(m1.matrix(), tol) as f64
        - ckg_core::linalg::numerical_rank(sol.u.matrix(), tol) as f64;
    rec.require(sol.null_match && kernel_rank_gap == 0.0, || "kernel of the factor differs".into());
    rec.at_most("co_range_residual", rel(sol.range_residual, sol.u.norm()), tol.rel);
    let eq = equivalence_check(&m1, &m2, tol)?;
    rec.require(eq.range_inclusion && eq.majorization && eq.factorization, || {
        format!("equivalences reject a constructive instance: {eq:?}")
    });
    rec.count("constructive");

    if trial % 4 == 3 {
        // L2 without full row rank, and a column direction orthogonal to its range
        let rank = rng.random_range(1..rows);
        let l2 = with_singular_values(rng, rows, cols2.max(rank), rank, 0.3, 3.0);
        let basis = ckg_core::linalg::range_basis(&l2, tol);
        let mut v = unit_vector(rng, rows);
        v -= &basis * (basis.adjoint() * &v);
        let v = v.normalize();
        let y = unit_vector(rng, cols1);
        let bad = &l2 * gaussian_matrix(rng, l2.ncols(), cols1) + &v * y.adjoint();
        let (bad, l2) = (LinearMap::new(bad)?, LinearMap::new(l2)?);
        let rejected = matches!(douglas_solve(&bad, &l2, tol), Err(Error::RangeNotIncluded { .. }));
        let eq = equivalence_check(&bad, &l2, tol)?;
        rec.require(rejected, || "negative instance was factored".into());
        rec.require(!eq.range_inclusion && !eq.majorization && !eq.factorization, || {
            format!("equivalences accept a negative instance: {eq:?}")
        });
        if rejected {
            rec.count("negatives_rejected");
        }
    }
    Ok(())
}

fn frame_suite(rng: &mut ChaCha8Rng, _trial: usize, tol: &Tolerance, rec: &mut Recorder) -> std::result::Result<(), Error> {
    let shape = any_shape(rng);
    let g = random::ckg(rng, &shape)?;
    let cert = frame_bounds(&g.lambda, &g.k, tol)?;
    rec.require(cert.is_ckg_frame, || "generated frame rejected".into());
    let Bound::Finite(a) = cert.lower_bound else {
        rec.require(false, || "nonzero K has an unconstrained bound".into());
        return Ok(());
    };
    let (low, high) = sandwich_violation(rng, &g.lambda, &g.k, a, cert.bessel_bound);
    rec.at_most("lower_violation", low, tol.rel);
    rec.at_most("upper_violation", high, tol.rel);
    // optimality: raising A by a relative 1e-6 must break S ⪰ A KK*
    let s = frame_operator(&g.lambda).into_matrix();
    let raised = eigh(&(&s - gram(g.k.matrix()).map(|z| z * a * (1.0 + 1e-6)))).min();
    rec.require(raised < 0.0, || format!("A = {a} is not optimal"));
    rec.count("frames");
    Ok(())
}

fn kernel_moves(
    rng: &mut ChaCha8Rng,
    g: &random::Generated,
    dual: &OperatorFamily,
    tol: &Tolerance,
) -> std::result::Result<Vec<OperatorFamily>, Error> {
    let d = g.lambda.space().total_dim();
    let n = g.lambda.domain_dim();
    (0..PERTURBATIONS)
        .map(|_| {
            let w = gaussian_matrix(rng, d, n);
            perturb_dual(&g.lambda, dual, &w, tol)
        })
        .collect()
}

fn dual_characterization(rng: &mut ChaCha8Rng, _trial: usize, tol: &Tolerance, rec: &mut Recorder) -> std::result::Result<(), Error> {
    let shape = any_shape(rng);
    let g = random::ckg(rng, &shape)?;
    let dual = canonical_dual(&g.lambda, &g.k, tol)?;
    let cert = &dual.certificate;
    let k_norm = g.k.norm();
    rec.at_most("canonical_residual", rel(cert.duality_residual, k_norm), tol.rel);
    let a = cert.primal_lower_bound.finite().unwrap_or(f64::NAN);
    rec.at_most("norm_times_bound_gap", (cert.synthesis_norm_sq * a - 1.0).abs(), PRODUCT_AGREEMENT);
    for moved in kernel_moves(rng, &g, &dual.family, tol)? {
        let c = verify_dual(&g.lambda, &moved, &g.k, tol)?;
        rec.at_most("perturbed_residual", rel(c.duality_residual, k_norm), tol.rel);
        rec.require(c.is_valid, || "kernel perturbation is not a dual".into());
    }
    // a generic shift leaves the set of duals
    let d = g.lambda.space().total_dim();
    let off = OperatorFamily::from_analysis_matrix(
        g.lambda.space().clone(),
        &(dual.family.analysis_matrix() + gaussian_matrix(rng, d, shape.n)),
    )?;
    let c = verify_dual(&g.lambda, &off, &g.k, tol)?;
    rec.require(!c.is_valid, || "generic shift accepted as a dual".into());
    rec.count("instances");
    Ok(())
}

fn dual_floor(rng: &mut ChaCha8Rng, _trial: usize, tol: &Tolerance, rec: &mut Recorder) -> std::result::Result<(), Error> {
    let shape = any_shape(rng);
    let g = random::ckg(rng, &shape)?;
    let floor = dual_norm_floor(&g.lambda, &g.k, tol)?;
    let dual = canonical_dual(&g.lambda, &g.k, tol)?;
    rec.at_most(
        "canonical_floor_gap",
        rel((dual.certificate.synthesis_norm_sq - floor).abs(), floor),
        PRODUCT_AGREEMENT,
    );
    for moved in kernel_moves(rng, &g, &dual.family, tol)? {
        let norm_sq = spectral_norm(&moved.analysis_matrix()).powi(2);
        rec.at_most("below_floor", rel((floor - norm_sq).max(0.0), floor), tol.rel);
    }
    rec.count("instances");
    Ok(())
}

fn subspace(rng: &mut ChaCha8Rng, trial: usize, tol: &Tolerance, rec: &mut Recorder) -> std::result::Result<(), Error> {
    let n = rng.random_range(2..=6);
    let max_block = rng.random_range(2..=4);
    let shape = Shape {
        n,
        points: 2 * n.div_ceil(max_block) + rng.random_range(0..=4),
        max_block,
    };
    let g = random::subspace(rng, &shape, trial % 2 == 0)?;
    let gamma = g.gamma.as_ref().expect("subspace instances carry a dual");
    let out = subspace_dual_bound(&g.lambda, gamma, &g.k, tol)?;
    let bound = out.conclusion_bound.finite().unwrap_or(f64::NAN);
    let a = out.certificate.lower_bound.finite().unwrap_or(f64::NAN);
    rec.at_most("bound_excess", rel((bound - a).max(0.0), a), tol.rel);
    rec.require(out.holds, || "conclusion bound exceeds the optimum".into());
    rec.count("instances");

    if trial % 5 == 4 {
        let rotated = random::rotated(rng, &g.lambda)?;
        match subspace_dual_bound(&rotated, gamma, &g.k, tol) {
            Err(Error::HypothesisFailed(_)) => rec.count("violations_flagged"),
            other => rec.require(false, || format!("rotated instance not flagged: {other:?}")),
        }
    }
    Ok(())
}

fn atomic_equivalence(rng: &mut ChaCha8Rng, trial: usize, tol: &Tolerance, rec: &mut Recorder) -> std::result::Result<(), Error> {
    let shape = any_shape(rng);
    let (g, planted) = match trial % 3 {
        0 => (random::ckg(rng, &shape)?, Some(true)),
        1 => (random::not_a_frame(rng, &shape)?, Some(false)),
        _ => (random::bessel(rng, &shape)?, None),
    };
    let cert = atomic_check(&g.lambda, &g.k, tol)?;
    let agree = cert.equivalence_agrees && cert.is_atomic == cert.frame.is_ckg_frame;
    rec.require(agree, || "atomic verdict differs from frame verdict".into());
    if let Some(expected) = planted {
        rec.require(cert.is_atomic == expected, || format!("planted verdict {expected} not recovered"));
    }
    if agree {
        rec.count("agree");
    }
    if cert.is_atomic {
        rec.count("atomic");
        for _ in 0..3 {
            let f = gaussian_vector(rng, shape.n);
            let coeffs = coefficient_map(&g.lambda, &g.k, &f, tol)?;
            let kf = g.k.apply(&f)?;
            let back = synthesis(&g.lambda, &coeffs)?;
            rec.at_most("reconstruction_residual", rel((back - &kf).norm(), kf.norm()), tol.rel);
        }
    } else {
        rec.count("not_atomic");
    }
    Ok(())
}

fn operator_algebra(rng: &mut ChaCha8Rng, _trial: usize, tol: &Tolerance, rec: &mut Recorder) -> std::result::Result<(), Error> {
    let shape = full_shape(rng);
    let n = shape.n;
    let k_rank = rng.random_range(1..=n);
    let g = random::ckg_with(rng, &shape, n, k_rank)?;
    let k2_rank = rng.random_range(1..=n);
    let k2 = LinearMap::new(with_singular_values(rng, n, n, k2_rank, 0.5, 2.0))?;
    let alpha = rng.random_range(0.2..3.0) * if rng.random_bool(0.5) { -1.0 } else { 1.0 };
    let beta = rng.random_range(0.2..3.0);
    let out = operator_algebra_bounds(&g.lambda, &g.k, &k2, alpha, beta, tol)?;
    rec.require(out.sum.holds, || format!("sum bound fails: {:?}", out.sum));
    rec.require(out.product.holds, || format!("product bound fails: {:?}", out.product));
    let slack = |c: &ckg_core::BoundCheck| match (c.formula, c.empirical) {
        (Bound::Finite(f), Bound::Finite(e)) => rel((f - e).max(0.0), e),
        _ => 0.0,
    };
    rec.at_most("sum_formula_excess", slack(&out.sum), tol.rel);
    rec.at_most("product_formula_excess", slack(&out.product), tol.rel);

    // equality cases
    let id = LinearMap::identity(n);
    let eq = operator_algebra_bounds(&g.lambda, &id, &id, 1.0, 1.0, tol)?;
    let gap = |c: &ckg_core::BoundCheck| match (c.formula, c.empirical) {
        (Bound::Finite(f), Bound::Finite(e)) => rel((f - e).abs(), e),
        _ => f64::NAN,
    };
    rec.at_most("identity_sum_gap", gap(&eq.sum), tol.rel);
    let a_id = eq.k1.lower_bound.finite().unwrap_or(f64::NAN);
    rec.at_most(
        "quarter_bound_gap",
        rel((eq.sum_certificate.lower_bound.finite().unwrap_or(f64::NAN) - a_id / 4.0).abs(), a_id),
        tol.rel,
    );
    let u = LinearMap::new(unitary(rng, n))?;
    let pr = operator_algebra_bounds(&g.lambda, &g.k, &u, 1.0, 1.0, tol)?;
    rec.at_most("unitary_product_gap", gap(&pr.product), tol.rel);
    rec.count("instances");
    Ok(())
}

fn orthogonal(rng: &mut ChaCha8Rng, _trial: usize, tol: &Tolerance, rec: &mut Recorder) -> std::result::Result<(), Error> {
    let shape = pair_shape(rng);
    let g = random::orthogonal_pair(rng, &shape)?;
    let gamma = g.gamma.as_ref().expect("pair");
    let u = commuting_multiplier(&g.k);
    let v = LinearMap::new(gaussian_matrix(rng, shape.n, shape.n))?;
    let out = orthogonal_combine(&g.lambda, gamma, &u, &v, &g.k, tol)?;
    rec.require(out.lower.holds, || format!("lower bound fails: {:?}", out.lower));
    rec.require(out.upper_holds, || "upper bound fails".into());
    rec.at_most("additivity_residual", out.additivity_residual, ADDITIVITY_LIMIT);
    rec.count("instances");
    Ok(())
}

fn range(rng: &mut ChaCha8Rng, _trial: usize, tol: &Tolerance, rec: &mut Recorder) -> std::result::Result<(), Error> {
    let shape = pair_shape(rng);
    let g = random::orthogonal_pair(rng, &shape)?;
    let gamma = g.gamma.as_ref().expect("pair");
    let u1 = near_identity(rng, &g.basis);
    let u2 = near_identity(rng, &g.basis);
    let out = range_combine(&g.lambda, gamma, &u1, &u2, &g.k, tol)?;
    rec.require(out.lower.holds, || format!("lower bound fails: {:?}", out.lower));
    rec.at_most("additivity_residual", out.additivity_residual, ADDITIVITY_LIMIT);
    rec.count("instances");
    Ok(())
}

fn perturb(rng: &mut ChaCha8Rng, _trial: usize, tol: &Tolerance, rec: &mut Recorder) -> std::result::Result<(), Error> {
    let shape = any_shape(rng);
    let g = random::ckg(rng, &shape)?;
    let u = commuting_positive(rng, &frame_operator(&g.lambda));
    let power = rng.random_range(1..=3);
    let out = positive_perturb(&g.lambda, &u, power, &g.k, tol)?;
    rec.require(out.holds, || format!("perturbed family loses the bound (margin {:.3e})", out.dominance_margin));
    rec.at_most("frame_operator_residual", out.operator_residual, tol.rel);
    rec.count("instances");
    Ok(())
}

fn parseval_sum(rng: &mut ChaCha8Rng, _trial: usize, tol: &Tolerance, rec: &mut Recorder) -> std::result::Result<(), Error> {
    let shape = pair_shape(rng);
    let g = random::parseval_pair(rng, &shape)?;
    let gamma = g.gamma.as_ref().expect("pair");
    let id = LinearMap::identity(shape.n);
    let out = orthogonal_combine(&g.lambda, gamma, &id, &id, &g.k, tol)?;
    let (low, high) = sandwich_violation(rng, &out.family, &g.k, 2.0, 2.0);
    rec.at_most("lower_violation", low, tol.rel);
    rec.at_most("upper_violation", high, tol.rel);
    rec.require(out.certificate.admits(2.0, 2.0, tol), || "(2, 2) is not admitted".into());
    rec.count("instances");
    Ok(())
}

fn restricted(rng: &mut ChaCha8Rng, trial: usize, tol: &Tolerance, rec: &mut Recorder) -> std::result::Result<(), Error> {
    let shape = full_shape(rng);
    let n = shape.n;
    let k_rank = 1 + trial % n;
    let range_rank = rng.random_range(k_rank..=n);
    let g = random::ckg_with(rng, &shape, range_rank, k_rank)?;
    let dual = canonical_dual(&g.lambda, &g.k, tol)?;
    let w = gaussian_matrix(rng, g.lambda.space().total_dim(), n);
    let gamma = perturb_dual(&g.lambda, &dual.family, &w, tol)?;
    let out = restricted_dual_frame(&g.lambda, &gamma, &g.k, tol)?;
    rec.at_most("reconstruction_residual", out.reconstruction_residual, tol.rel);
    rec.at_most("adjoint_order_residual", out.adjoint_residual, tol.rel);
    let lower = out.certificate.lower_bound.finite().unwrap_or(f64::NAN);
    rec.above("lower_bound", lower, tol.rel);
    rec.require(out.holds, || "restricted dual fails".into());
    rec.count("instances");
    Ok(())
}

type TrialFn = fn(&mut ChaCha8Rng, usize, &Tolerance, &mut Recorder) -> std::result::Result<(), Error>;

fn suite_fn(name: &str) -> Option<TrialFn> {
    Some(match name {
        "douglas" => douglas,
        "frame-bounds" => frame_suite,
        "dual-characterization" => dual_characterization,
        "dual-floor" => dual_floor,
        "subspace-dual" => subspace,
        "atomic-equivalence" => atomic_equivalence,
        "operator-algebra" => operator_algebra,
        "orthogonal-combine" => orthogonal,
        "range-combine" => range,
        "positive-perturb" => perturb,
        "parseval-sum" => parseval_sum,
        "restricted-dual" => restricted,
        _ => return None,
    })
}

fn run_one(name: &str, f: TrialFn, trials: usize, seed: u64, tol: &Tolerance) -> SuiteReport {
    let records: Vec<Recorder> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, name, trial);
            let mut rec = Recorder::default();
            if let Err(e) = f(&mut rng, trial, tol, &mut rec) {
                rec.failures.push(format!("error: {e}"));
            }
            rec
        })
        .collect();

    let mut report = SuiteReport {
        name: name.into(),
        trials,
        passed: 0,
        failed: 0,
        max: IndexMap::new(),
        min: IndexMap::new(),
        counts: IndexMap::new(),
        failures: Vec::new(),
    };
    for (trial, rec) in records.into_iter().enumerate() {
        for (k, v) in rec.max {
            let e = report.max.entry(k.into()).or_insert(v);
            if v.is_nan() || v > *e {
                *e = v;
            }
        }
        for (k, v) in rec.min {
            let e = report.min.entry(k.into()).or_insert(v);
            if v.is_nan() || v < *e {
                *e = v;
            }
        }
        for (k, c) in rec.counts {
            *report.counts.entry(k.into()).or_insert(0) += c;
        }
        if rec.failures.is_empty() {
            report.passed += 1;
        } else {
            report.failed += 1;
            if report.failures.len() < MAX_LISTED {
                report.failures.push(Failure {
                    trial,
                    reason: rec.failures.join("; "),
                });
            }
        }
    }
    report
}

/// Runs one suite, or every suite for `"all"`, in the order of [`SUITES`].
pub fn run_suite(name: &str, trials: usize, seed: u64, tol: &Tolerance) -> Result<Vec<SuiteReport>> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let names: Vec<&str> = if name == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&name) {
        vec![name]
    } else {
        return Err(CliError::UnknownSuite(name.into()));
    };
    Ok(names
        .par_iter()
        .map(|&s| run_one(s, suite_fn(s).expect("listed suite"), trials, seed, tol))
        .collect())
}

