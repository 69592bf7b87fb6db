//! Deterministic random sampling.
//!
//! Every sample index gets its own ChaCha stream derived from `(seed, index)`,
//! so results do not depend on evaluation order or thread count.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Name recorded in reports next to the seed.
pub const GENERATOR: &str = "ChaCha8Rng";

/// Seed used by construction-time self checks.
pub const INTERNAL_SEED: u64 = 0x1509_a7a3;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Uniform point on the unit sphere `S^(n-1)`.
pub fn sphere_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, n);
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Uniform point in the ball of the given radius in `R^n`.
pub fn ball_point<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> DVector<f64> {
    let dir = sphere_point(rng, n);
    let u: f64 = rng.random();
    dir * (radius * u.powf(1.0 / n as f64))
}

pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = sphere_point(&mut stream(7, 3), 5);
        let b = sphere_point(&mut stream(7, 3), 5);
        let c = sphere_point(&mut stream(7, 4), 5);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!((a.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ball_points_stay_inside() {
        let mut rng = stream(1, 0);
        for _ in 0..100 {
            assert!(ball_point(&mut rng, 4, 2.0).norm() <= 2.0);
        }
    }
}
