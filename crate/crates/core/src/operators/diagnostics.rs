//! Sampling checks for the structural properties the algorithms rely on.
//!
//! Each check draws seeded random pairs and reports the worst violation it
//! saw, so callers compare the result against their own tolerance.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::LinearOperator;
use crate::vector::Vector;

/// Standard normal vector scaled by `scale`, reproducible from `seed`.
pub fn random_vector(dim: usize, scale: f64, seed: u64) -> Vector {
    random_vector_with(&mut ChaCha8Rng::seed_from_u64(seed), dim, scale)
}

pub(crate) fn random_vector_with<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> Vector {
    Vector::from_fn(dim, |_| scale * rng.sample::<f64, _>(StandardNormal))
}

fn worst_over_pairs(
    dim: usize,
    cases: usize,
    seed: u64,
    scale: f64,
    mut gap: impl FnMut(&Vector, &Vector) -> f64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let x = random_vector_with(&mut rng, dim, scale);
        let y = random_vector_with(&mut rng, dim, scale);
        worst = worst.max(gap(&x, &y));
    }
    worst
}

/// Largest `‖T(x)−T(y)‖ − ‖x−y‖` seen, floored at zero.
pub fn nonexpansiveness_violation(
    map: impl Fn(&Vector) -> Vector,
    dim: usize,
    cases: usize,
    seed: u64,
    scale: f64,
) -> f64 {
    worst_over_pairs(dim, cases, seed, scale, |x, y| {
        map(x).distance(&map(y)) - x.distance(y)
    })
}

/// Largest `‖Jx−Jy‖² + ‖(x−Jx)−(y−Jy)‖² − ‖x−y‖²` seen, floored at zero.
pub fn firm_nonexpansiveness_violation(
    map: impl Fn(&Vector) -> Vector,
    dim: usize,
    cases: usize,
    seed: u64,
    scale: f64,
) -> f64 {
    worst_over_pairs(dim, cases, seed, scale, |x, y| {
        let (jx, jy) = (map(x), map(y));
        let rx = x - &jx;
        let ry = y - &jy;
        jx.distance(&jy).powi(2) + rx.distance(&ry).powi(2) - x.distance(y).powi(2)
    })
}

/// Largest `β‖Bx−By‖² − ⟨Bx−By, x−y⟩` seen, floored at zero.
pub fn cocoercivity_violation(
    map: impl Fn(&Vector) -> Vector,
    beta: f64,
    dim: usize,
    cases: usize,
    seed: u64,
    scale: f64,
) -> f64 {
    worst_over_pairs(dim, cases, seed, scale, |x, y| {
        let db = &map(x) - &map(y);
        let dx = x - y;
        beta * db.norm_sq() - db.dot(&dx)
    })
}

/// Largest `|⟨Lx, y⟩ − ⟨x, Lᵀy⟩|` over unit-variance draws, relative to
/// `max(1, ‖Lx‖‖y‖)`.
pub fn adjoint_mismatch(l: &LinearOperator, cases: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let x = random_vector_with(&mut rng, l.in_dim(), 1.0);
        let y = random_vector_with(&mut rng, l.out_dim(), 1.0);
        let lx = l.apply(&x);
        let lhs = lx.dot(&y);
        let rhs = x.dot(&l.adjoint(&y));
        worst = worst.max((lhs - rhs).abs() / (lx.norm() * y.norm()).max(1.0));
    }
    worst
}

/// Largest `‖L(ax+by) − aLx − bLy‖` relative to `max(1, ‖aLx‖ + ‖bLy‖)`.
pub fn linearity_mismatch(l: &LinearOperator, cases: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let x = random_vector_with(&mut rng, l.in_dim(), 1.0);
        let y = random_vector_with(&mut rng, l.in_dim(), 1.0);
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        let combined = l.apply(&x.lincomb(a, &y, b));
        let ax = l.apply(&x).scale(a);
        let by = l.apply(&y).scale(b);
        let err = combined.distance(&(&ax + &by));
        worst = worst.max(err / (ax.norm() + by.norm()).max(1.0));
    }
    worst
}
