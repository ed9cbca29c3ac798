#![allow(dead_code)]

use ckg_core::linalg::{eigh, CMatrix};
use ckg_core::random::Shape;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_shape<R: Rng>(rng: &mut R) -> Shape {
    Shape {
        n: rng.random_range(2..=6),
        points: rng.random_range(2..=8),
        max_block: rng.random_range(1..=3),
    }
}

/// Smallest eigenvalue, relative to the largest magnitude.
pub fn relative_min_eig(m: &CMatrix) -> f64 {
    let e = eigh(m);
    let scale = e.values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    e.values[0] / scale
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
