use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Arrival streams are ChaCha8 seeded through `seed_from_u64`. Results are
/// bit-reproducible for a given seed on any platform.
pub type ArrivalRng = ChaCha8Rng;

/// Identifier recorded in run manifests.
pub const PRNG_ID: &str = "ChaCha8Rng/rand_chacha-0.3/seed_from_u64/f64-threshold-v1";

pub fn arrival_rng(seed: u64) -> ArrivalRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-location arrival indicators for one slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArrivalVector(pub Vec<bool>);

impl ArrivalVector {
    pub fn none(n: usize) -> Self {
        ArrivalVector(vec![false; n])
    }

    pub fn indicators(&self) -> &[bool] {
        &self.0
    }

    pub fn count(&self) -> u64 {
        self.0.iter().filter(|&&a| a).count() as u64
    }

    pub fn swap_locations(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        out.0.swap(a, b);
        out
    }
}

/// Draw one Bernoulli(p_i) indicator per location.
///
/// Exactly one uniform is consumed per location regardless of `p`, so two
/// systems reading the same stream see the same arrivals slot by slot.
pub fn sample_arrivals<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> ArrivalVector {
    ArrivalVector(p.iter().map(|&pi| rng.gen::<f64>() < pi).collect())
}
