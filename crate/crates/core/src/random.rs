//! Seeded random matrices used by instance generators, tests and benchmarks.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::block::MeasurePoints;
use crate::error::{Error, Result};
use crate::frame::OperatorFamily;
use crate::linalg::{CMatrix, CVector, LinearMap, C64};

/// Standard complex normal sample: real and imaginary parts `N(0, 1/2)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| complex_normal(rng))
}

/// Uniformly distributed point on the unit sphere of `C^n`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    loop {
        let v = gaussian_vector(rng, n);
        let norm = v.norm();
        if norm > 1e-8 {
            return v / C64::new(norm, 0.0);
        }
    }
}

/// `n x r` matrix with orthonormal columns (`r <= n`).
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, n: usize, r: usize) -> CMatrix {
    assert!(r <= n, "isometry needs r <= n");
    if r == 0 {
        return CMatrix::zeros(n, 0);
    }
    let q = gaussian_matrix(rng, n, r).qr().q();
    q.columns(0, r).into_owned()
}

pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    isometry(rng, n, n)
}

/// `rows x cols` matrix of exact rank `rank` with singular values drawn from `[lo, hi]`.
pub fn with_singular_values<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    rank: usize,
    lo: f64,
    hi: f64,
) -> CMatrix {
    assert!(rank <= rows.min(cols), "rank exceeds matrix dimensions");
    let u = isometry(rng, rows, rank);
    let v = isometry(rng, cols, rank);
    let mut scaled = u;
    for j in 0..rank {
        let s = rng.random_range(lo..=hi);
        scaled.column_mut(j).scale_mut(s);
    }
    scaled * v.adjoint()
}

/// `cols` columns whose span is exactly `ran(basis)`, well conditioned.
pub fn within_range<R: Rng + ?Sized>(rng: &mut R, basis: &CMatrix, cols: usize, rank: usize) -> CMatrix {
    let r = basis.ncols();
    basis * with_singular_values(rng, r, cols, rank.min(r).min(cols), 0.5, 2.0)
}

/// Size parameters for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    /// Dimension of the domain space.
    pub n: usize,
    /// Number of quadrature nodes.
    pub points: usize,
    /// Largest fiber dimension.
    pub max_block: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            n: 4,
            points: 6,
            max_block: 3,
        }
    }
}

/// A generated family (or pair of families) together with its operator `K`.
#[derive(Debug, Clone)]
pub struct Generated {
    pub lambda: OperatorFamily,
    pub gamma: Option<OperatorFamily>,
    pub k: LinearMap,
    /// Orthonormal basis of `ran(T_Λ)`, or of `ran(K)` for subspace instances.
    pub basis: CMatrix,
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

/// Random weights in `[0.5, 2]` and fiber dimensions in `1..=max_block`,
/// grown until each node segment reaches its required total dimension.
pub fn measure<R: Rng + ?Sized>(
    rng: &mut R,
    shape: &Shape,
    segments: &[(std::ops::Range<usize>, usize)],
) -> Result<MeasurePoints> {
    if shape.points == 0 || shape.max_block == 0 || shape.n == 0 {
        return Err(invalid(format!("degenerate shape {shape:?}")));
    }
    let weights: Vec<f64> = (0..shape.points).map(|_| rng.random_range(0.5..2.0)).collect();
    let mut dims: Vec<usize> = (0..shape.points)
        .map(|_| rng.random_range(1..=shape.max_block))
        .collect();
    for (range, need) in segments {
        if range.len() * shape.max_block < *need {
            return Err(invalid(format!(
                "{} nodes of dimension <= {} cannot carry rank {need}",
                range.len(),
                shape.max_block
            )));
        }
        while dims[range.clone()].iter().sum::<usize>() < *need {
            let i = rng.random_range(range.clone());
            if dims[i] < shape.max_block {
                dims[i] += 1;
            }
        }
    }
    MeasurePoints::new(weights, dims)
}

/// Analysis matrix supported on the rows of `nodes`, equal to `G W*` there
/// with `G` well conditioned of rank `W.ncols()`.
fn analysis_on<R: Rng + ?Sized>(
    rng: &mut R,
    space: &MeasurePoints,
    nodes: std::ops::Range<usize>,
    w: &CMatrix,
    sv: (f64, f64),
) -> CMatrix {
    let n = w.nrows();
    let start = space.offset(nodes.start);
    let end = space.offset(nodes.end);
    let mut out = CMatrix::zeros(space.total_dim(), n);
    let r = w.ncols();
    let g = with_singular_values(rng, end - start, r, r, sv.0, sv.1);
    out.rows_mut(start, end - start).copy_from(&(g * w.adjoint()));
    out
}

/// Random operator with range exactly `ran(basis)` and rank `rank`.
fn operator_in<R: Rng + ?Sized>(rng: &mut R, basis: &CMatrix, rank: usize, sv: (f64, f64)) -> CMatrix {
    let n = basis.nrows();
    basis * with_singular_values(rng, basis.ncols(), n, rank, sv.0, sv.1)
}

/// Unstructured Gaussian family and operator.
pub fn bessel<R: Rng + ?Sized>(rng: &mut R, shape: &Shape) -> Result<Generated> {
    let space = Arc::new(measure(rng, shape, &[])?);
    let blocks = space
        .block_dims()
        .iter()
        .map(|&d| gaussian_matrix(rng, d, shape.n))
        .collect();
    let lambda = OperatorFamily::new(space, shape.n, blocks)?;
    let basis = crate::linalg::range_basis(&lambda.synthesis_matrix(), &Default::default());
    Ok(Generated {
        lambda,
        gamma: None,
        k: LinearMap::new(gaussian_matrix(rng, shape.n, shape.n))?,
        basis,
    })
}

/// A c-K-g-frame: `ran(T_Λ)` is a random subspace and `K` maps into it.
pub fn ckg<R: Rng + ?Sized>(rng: &mut R, shape: &Shape) -> Result<Generated> {
    let space = measure(rng, shape, &[])?;
    let r = rng.random_range(1..=shape.n.min(space.total_dim()));
    let w = isometry(rng, shape.n, r);
    let rank = rng.random_range(1..=r);
    ckg_on(rng, Arc::new(space), w, rank)
}

/// Like [`ckg`] with `dim ran(T_Λ) = range_rank` and `rank(K) = k_rank`.
pub fn ckg_with<R: Rng + ?Sized>(
    rng: &mut R,
    shape: &Shape,
    range_rank: usize,
    k_rank: usize,
) -> Result<Generated> {
    if k_rank == 0 || k_rank > range_rank || range_rank > shape.n {
        return Err(invalid(format!(
            "need 1 <= rank(K) <= range rank <= n, got {k_rank}, {range_rank}, {}",
            shape.n
        )));
    }
    let space = measure(rng, shape, &[(0..shape.points, range_rank)])?;
    let w = isometry(rng, shape.n, range_rank);
    ckg_on(rng, Arc::new(space), w, k_rank)
}

fn ckg_on<R: Rng + ?Sized>(
    rng: &mut R,
    space: Arc<MeasurePoints>,
    w: CMatrix,
    rank: usize,
) -> Result<Generated> {
    let lambda = OperatorFamily::from_analysis_matrix(
        space.clone(),
        &analysis_on(rng, &space, 0..space.len(), &w, (0.5, 2.0)),
    )?;
    let k = LinearMap::new(operator_in(rng, &w, rank, (0.5, 2.0)))?;
    Ok(Generated {
        lambda,
        gamma: None,
        k,
        basis: w,
    })
}

/// Bessel family whose synthesis range misses part of `ran(K)`.
pub fn not_a_frame<R: Rng + ?Sized>(rng: &mut R, shape: &Shape) -> Result<Generated> {
    if shape.n < 2 {
        return Err(invalid("a range violation needs n >= 2".into()));
    }
    let space = measure(rng, shape, &[])?;
    let r = rng.random_range(1..=(shape.n - 1).min(space.total_dim()));
    let w = isometry(rng, shape.n, r);
    let space = Arc::new(space);
    let lambda = OperatorFamily::from_analysis_matrix(
        space.clone(),
        &analysis_on(rng, &space, 0..space.len(), &w, (0.5, 2.0)),
    )?;
    let k = LinearMap::new(with_singular_values(rng, shape.n, shape.n, shape.n, 0.5, 2.0))?;
    Ok(Generated {
        lambda,
        gamma: None,
        k,
        basis: w,
    })
}

fn halves(shape: &Shape) -> Result<(std::ops::Range<usize>, std::ops::Range<usize>)> {
    if shape.points < 2 {
        return Err(invalid("a pair of families needs at least two nodes".into()));
    }
    let mid = shape.points / 2;
    Ok((0..mid, mid..shape.points))
}

/// Two c-K-g-frames for the same `K` supported on disjoint nodes, so `T_Λ T_Γ* = 0`.
pub fn orthogonal_pair<R: Rng + ?Sized>(rng: &mut R, shape: &Shape) -> Result<Generated> {
    let (first, second) = halves(shape)?;
    let cap = shape.n.min(first.len().min(second.len()) * shape.max_block);
    let r = rng.random_range(1..=cap);
    let space = Arc::new(measure(rng, shape, &[(first.clone(), r), (second.clone(), r)])?);
    let w = isometry(rng, shape.n, r);
    let lambda =
        OperatorFamily::from_analysis_matrix(space.clone(), &analysis_on(rng, &space, first, &w, (0.5, 2.0)))?;
    let gamma =
        OperatorFamily::from_analysis_matrix(space.clone(), &analysis_on(rng, &space, second, &w, (0.5, 2.0)))?;
    let rank = rng.random_range(1..=r);
    let k = LinearMap::new(operator_in(rng, &w, rank, (0.5, 2.0)))?;
    Ok(Generated {
        lambda,
        gamma: Some(gamma),
        k,
        basis: w,
    })
}

/// Two families with `S = I` on disjoint nodes and `||K|| <= 1`.
pub fn parseval_pair<R: Rng + ?Sized>(rng: &mut R, shape: &Shape) -> Result<Generated> {
    let (first, second) = halves(shape)?;
    let n = shape.n;
    let space = Arc::new(measure(rng, shape, &[(first.clone(), n), (second.clone(), n)])?);
    let mut build = |nodes: std::ops::Range<usize>| -> Result<OperatorFamily> {
        let start = space.offset(nodes.start);
        let rows = space.offset(nodes.end) - start;
        let mut a = CMatrix::zeros(space.total_dim(), n);
        a.rows_mut(start, rows).copy_from(&isometry(rng, rows, n));
        OperatorFamily::from_analysis_matrix(space.clone(), &a)
    };
    let lambda = build(first)?;
    let gamma = build(second)?;
    let rank = rng.random_range(1..=n);
    let k = LinearMap::new(with_singular_values(rng, n, n, rank, 0.3, 1.0))?;
    Ok(Generated {
        lambda,
        gamma: Some(gamma),
        k,
        basis: CMatrix::identity(n, n),
    })
}

/// Frame operator block-diagonal with respect to `ran(K) ⊕ ran(K)^⊥`, and a
/// second family that is a dual on `ran(K)`.
///
/// When `projection` is set, `K` is the orthogonal projection onto its range.
pub fn subspace<R: Rng + ?Sized>(rng: &mut R, shape: &Shape, projection: bool) -> Result<Generated> {
    let n = shape.n;
    if n < 2 {
        return Err(invalid("a proper subspace needs n >= 2".into()));
    }
    let (first, second) = halves(shape)?;
    let r = rng.random_range(1..=(n - 1).min(first.len() * shape.max_block));
    if second.len() * shape.max_block < n - r {
        return Err(invalid(format!("{} nodes cannot carry rank {}", second.len(), n - r)));
    }
    let space = Arc::new(measure(rng, shape, &[(first.clone(), r), (second.clone(), n - r)])?);
    let u = unitary(rng, n);
    let q = u.columns(0, r).into_owned();
    let q_perp = u.columns(r, n - r).into_owned();

    // separated spectra on the two pieces keep rotated copies far from invariant
    let top = analysis_on(rng, &space, first.clone(), &q, (0.5, 1.0));
    let bottom = analysis_on(rng, &space, second, &q_perp, (2.5, 3.0));
    let analysis = &top + &bottom;
    let lambda = OperatorFamily::from_analysis_matrix(space.clone(), &analysis)?;

    let s1 = q.adjoint() * lambda.synthesis_matrix() * &analysis * &q;
    let s1_inv = s1
        .try_inverse()
        .ok_or_else(|| invalid("singular compressed frame operator".into()))?;
    let dual = &analysis * &q * s1_inv * q.adjoint()
        + gaussian_matrix(rng, space.total_dim(), n - r).map(|z| z * 0.5) * q_perp.adjoint();
    let gamma = OperatorFamily::from_analysis_matrix(space.clone(), &dual)?;

    let k = if projection {
        &q * q.adjoint()
    } else {
        operator_in(rng, &q, r, (0.5, 2.0))
    };
    Ok(Generated {
        lambda,
        gamma: Some(gamma),
        k: LinearMap::new(k)?,
        basis: q,
    })
}

/// `{Λ_i R}` for a random unitary `R`: same energies, rotated frame operator.
pub fn rotated<R: Rng + ?Sized>(rng: &mut R, family: &OperatorFamily) -> Result<OperatorFamily> {
    let r = LinearMap::new(unitary(rng, family.domain_dim()))?;
    family.compose_right(&r)
}
