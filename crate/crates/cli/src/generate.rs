//! Seeded instances whose structure targets one construction each.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ckg_core::random::{self, gaussian_matrix, Generated, Shape};
use ckg_core::{frame_bounds, CMatrix, LinearMap, Tolerance};

use crate::error::{CliError, Result};
use crate::instance::{CheckKind, InstanceFile};

pub const PROFILES: [&str; 6] = [
    "bessel",
    "ckg",
    "orthogonal-pair",
    "parseval-pair",
    "subspace",
    "not-a-frame",
];

pub const MAX_N: usize = 12;
pub const MAX_POINTS: usize = 16;
pub const MAX_BLOCK: usize = 6;

pub fn check_shape(shape: &Shape) -> Result<()> {
    let bad = |what: &str, v: usize, max: usize| {
        CliError::Usage(format!("{what} must be between 1 and {max}, got {v}"))
    };
    if shape.n == 0 || shape.n > MAX_N {
        return Err(bad("--n", shape.n, MAX_N));
    }
    if shape.points == 0 || shape.points > MAX_POINTS {
        return Err(bad("--points", shape.points, MAX_POINTS));
    }
    if shape.max_block == 0 || shape.max_block > MAX_BLOCK {
        return Err(bad("--maxblock", shape.max_block, MAX_BLOCK));
    }
    Ok(())
}

fn scaled(m: &CMatrix, c: f64) -> CMatrix {
    m.map(|z| z * c)
}

/// `2I + K*/(2||K||)`: commutes with `K*` and has smallest singular value at least 3/2.
pub fn commuting_multiplier(k: &LinearMap) -> LinearMap {
    let n = k.rows();
    let m = scaled(&CMatrix::identity(n, n), 2.0) + scaled(k.adjoint().matrix(), 0.5 / k.norm().max(f64::MIN_POSITIVE));
    LinearMap::new(m).expect("finite by construction")
}

/// `I + W R W*/(2||R||)`: invertible and maps `ran(W)` onto itself.
pub fn near_identity<R: Rng + ?Sized>(rng: &mut R, basis: &CMatrix) -> LinearMap {
    let n = basis.nrows();
    let r = gaussian_matrix(rng, basis.ncols(), basis.ncols());
    let norm = ckg_core::linalg::spectral_norm(&r);
    let m = CMatrix::identity(n, n) + scaled(&(basis * &r * basis.adjoint()), 0.5 / norm);
    LinearMap::new(m).expect("finite by construction")
}

/// `c0 I + c1 S/||S|| + c2 (S/||S||)²` with nonnegative coefficients: positive and commuting with `S`.
pub fn commuting_positive<R: Rng + ?Sized>(rng: &mut R, s: &LinearMap) -> LinearMap {
    let n = s.rows();
    let sn = scaled(s.matrix(), 1.0 / s.norm().max(f64::MIN_POSITIVE));
    let (c0, c1, c2): (f64, f64, f64) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
    let m = scaled(&CMatrix::identity(n, n), c0) + scaled(&sn, c1) + scaled(&(&sn * &sn), c2);
    // symmetrize away rounding so the Hermitian check sees an exact adjoint
    LinearMap::new(scaled(&(&m + m.adjoint()), 0.5)).expect("finite by construction")
}

fn single(g: &Generated, file: &mut InstanceFile) {
    file.add_family("lambda", &g.lambda);
    file.add_operator("K", &g.k);
}

fn fk(family: &str) -> CheckKind {
    CheckKind::FrameBounds {
        family: family.into(),
        operator: "K".into(),
    }
}

/// Deterministic in `(seed, profile, shape)`.
pub fn generate_instance(seed: u64, profile: &str, shape: &Shape) -> Result<InstanceFile> {
    check_shape(shape)?;
    if !PROFILES.contains(&profile) {
        return Err(CliError::UnknownProfile(profile.into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rng = &mut rng;
    let usage = |e: ckg_core::Error| match e {
        ckg_core::Error::InvalidParameter(msg) => CliError::Usage(format!("profile `{profile}`: {msg}")),
        other => CliError::Core(other),
    };
    let g = match profile {
        "bessel" => random::bessel(rng, shape),
        "ckg" => random::ckg(rng, shape),
        "orthogonal-pair" => random::orthogonal_pair(rng, shape),
        "parseval-pair" => random::parseval_pair(rng, shape),
        "subspace" => {
            let projection = rng.random_bool(0.5);
            random::subspace(rng, shape, projection)
        }
        _ => random::not_a_frame(rng, shape),
    }
    .map_err(usage)?;

    let mut file = InstanceFile::new(g.lambda.space());
    single(&g, &mut file);
    let atomic = CheckKind::Atomic {
        family: "lambda".into(),
        operator: "K".into(),
    };
    let canonical = CheckKind::CanonicalDual {
        family: "lambda".into(),
        operator: "K".into(),
    };
    match profile {
        "bessel" => {
            // no structure is planted; record whatever the frame test says so the
            // atomic check must agree with it
            let verdict = frame_bounds(&g.lambda, &g.k, &Tolerance::default())?.is_ckg_frame;
            file.add_check("frame", fk("lambda"), Some(verdict));
            file.add_check("atomic", atomic, Some(verdict));
        }
        "ckg" => {
            file.add_check("frame", fk("lambda"), None);
            file.add_check("canonical_dual", canonical, None);
            file.add_check("atomic", atomic, None);
        }
        "not-a-frame" => {
            file.add_check("frame", fk("lambda"), Some(false));
            file.add_check("canonical_dual", canonical, Some(false));
            file.add_check("atomic", atomic, Some(false));
        }
        "orthogonal-pair" => {
            let gamma = g.gamma.as_ref().expect("pair profile");
            file.add_family("gamma", gamma);
            file.add_operator("U", &commuting_multiplier(&g.k));
            let v = LinearMap::new(gaussian_matrix(rng, shape.n, shape.n))?;
            file.add_operator("V", &v);
            file.add_operator("U1", &near_identity(rng, &g.basis));
            file.add_operator("U2", &near_identity(rng, &g.basis));
            file.add_check("frame_lambda", fk("lambda"), None);
            file.add_check("frame_gamma", fk("gamma"), None);
            file.add_check(
                "orthogonal_combine",
                CheckKind::OrthogonalCombine {
                    family: "lambda".into(),
                    other: "gamma".into(),
                    u: "U".into(),
                    v: "V".into(),
                    operator: "K".into(),
                },
                None,
            );
            file.add_check(
                "range_combine",
                CheckKind::RangeCombine {
                    family: "lambda".into(),
                    other: "gamma".into(),
                    u1: "U1".into(),
                    u2: "U2".into(),
                    operator: "K".into(),
                },
                None,
            );
        }
        "parseval-pair" => {
            let gamma = g.gamma.as_ref().expect("pair profile");
            file.add_family("gamma", gamma);
            file.add_operator("I", &LinearMap::identity(shape.n));
            file.add_check(
                "frame_lambda",
                CheckKind::FrameBounds {
                    family: "lambda".into(),
                    operator: "I".into(),
                },
                None,
            );
            file.add_check(
                "frame_gamma",
                CheckKind::FrameBounds {
                    family: "gamma".into(),
                    operator: "I".into(),
                },
                None,
            );
            file.add_check(
                "sum",
                CheckKind::OrthogonalCombine {
                    family: "lambda".into(),
                    other: "gamma".into(),
                    u: "I".into(),
                    v: "I".into(),
                    operator: "K".into(),
                },
                None,
            );
        }
        _ => {
            // subspace
            let gamma = g.gamma.as_ref().expect("subspace profile");
            file.add_family("gamma", gamma);
            file.add_family("rotated", &random::rotated(rng, &g.lambda)?);
            file.add_operator("P", &LinearMap::new(&g.basis * g.basis.adjoint())?);
            file.add_check("frame", fk("lambda"), None);
            file.add_check(
                "subspace_dual",
                CheckKind::SubspaceDual {
                    family: "lambda".into(),
                    dual: "gamma".into(),
                    operator: "K".into(),
                },
                None,
            );
            file.add_check(
                "positive_perturb",
                CheckKind::PositivePerturb {
                    family: "lambda".into(),
                    u: "P".into(),
                    power: 2,
                    operator: "K".into(),
                },
                None,
            );
            file.add_check(
                "rotated_subspace_dual",
                CheckKind::SubspaceDual {
                    family: "rotated".into(),
                    dual: "gamma".into(),
                    operator: "K".into(),
                },
                Some(false),
            );
        }
    }
    Ok(file)
}
