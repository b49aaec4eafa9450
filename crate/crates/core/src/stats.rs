//! Distances between distributions and sampling error allowances.

use std::collections::BTreeMap;

use crate::basis::BasisString;

/// `½ Σ |p - q|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `F(p, q) = Σ sqrt(p_x q_x)`.
pub fn fidelity(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    p.iter().zip(q).map(|(a, b)| (a * b).max(0.0).sqrt()).sum()
}

/// Dense empirical distribution over `2^n` strings.
pub fn empirical(hist: &BTreeMap<BasisString, u64>, n: usize) -> Vec<f64> {
    let total: u64 = hist.values().sum();
    let mut out = vec![0.0; 1 << n];
    if total == 0 {
        return out;
    }
    for (x, &c) in hist {
        out[x.value() as usize] = c as f64 / total as f64;
    }
    out
}

/// Standard deviation scale for the TV distance of an `samples`-point
/// empirical distribution from `p`: `½ Σ sqrt(p(1-p)/N)`.
pub fn tv_sigma(p: &[f64], samples: u64) -> f64 {
    let n = samples as f64;
    0.5 * p.iter().map(|&x| (x * (1.0 - x) / n).max(0.0).sqrt()).sum::<f64>()
}

/// `sqrt(p(1-p)/N)`.
pub fn binomial_sigma(p: f64, samples: u64) -> f64 {
    (p * (1.0 - p) / samples as f64).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert!((fidelity(&[0.5, 0.5], &[0.5, 0.5]) - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&[1.0, 0.0], &[0.0, 1.0]), 0.0);
    }

    #[test]
    fn empirical_from_counts() {
        let mut h = BTreeMap::new();
        h.insert(BasisString::new(1, 1).unwrap(), 3);
        h.insert(BasisString::new(0, 1).unwrap(), 1);
        assert_eq!(empirical(&h, 1), vec![0.25, 0.75]);
    }
}
