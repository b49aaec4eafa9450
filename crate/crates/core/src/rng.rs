//! Seeded random streams.
//!
//! Every trajectory draws from its own Xoshiro256++ stream keyed by
//! `(seed, index)`, so batch results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type WalkRng = Xoshiro256PlusPlus;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream number `index` of the family rooted at `seed`.
pub fn stream(seed: u64, index: u64) -> WalkRng {
    Xoshiro256PlusPlus::seed_from_u64(splitmix64(seed ^ splitmix64(index)))
}

/// Inverse-CDF draw from `(item, weight)` pairs. Weights need not sum to
/// exactly one; the draw is scaled by their total.
pub fn sample_weighted<T: Copy, R: Rng + ?Sized>(items: &[(T, f64)], rng: &mut R) -> T {
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    let mut u = rng.random::<f64>() * total;
    for &(item, w) in items {
        if u < w {
            return item;
        }
        u -= w;
    }
    // Rounding can leave u just above the last cumulative bound.
    items
        .iter()
        .rev()
        .find(|(_, w)| *w > 0.0)
        .map(|&(item, _)| item)
        .expect("at least one positive weight")
}
