//! Deterministic random streams.
//!
//! Every task that needs randomness gets its own ChaCha stream keyed by
//! `(seed, domain, index)`. Results therefore do not depend on how tasks are
//! scheduled across threads.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream domains keep unrelated consumers of the same seed apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    PlaneSamples = 1,
    PairSamples = 2,
    CommutingPairs = 3,
    LemmaK = 4,
    NormalForm = 5,
    Draws = 6,
}

fn mix(mut z: u64) -> u64 {
    // splitmix64 finaliser
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for task `index` of `domain` under `seed`.
pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed ^ mix(domain as u64)));
    rng.set_stream(index);
    rng
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Uniformly distributed unit vector in `R^n`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, n);
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream(7, Domain::PlaneSamples, 3).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| stream(7, Domain::PlaneSamples, 3).random()).collect();
        assert_eq!(a, b);
        let c: u64 = stream(7, Domain::PlaneSamples, 4).random();
        let d: u64 = stream(7, Domain::PairSamples, 3).random();
        assert_ne!(a[0], c);
        assert_ne!(a[0], d);
    }

    #[test]
    fn unit_vectors_have_unit_norm() {
        let mut rng = stream(1, Domain::Draws, 0);
        for _ in 0..100 {
            assert!((unit_vector(&mut rng, 6).norm() - 1.0).abs() < 1e-14);
        }
    }
}
