//! Finite-size hashing: probability mass outside the likely set.

use serde::{Deserialize, Serialize};

use super::combinatorics::{binomial_pmf, entropy_bd};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HashingBoundParams {
    pub n: usize,
    pub fidelity: f64,
    /// Half-width of the likely set, in bits per pair.
    pub delta: f64,
}

impl HashingBoundParams {
    /// Uses the default half-width n^(−1/5).
    pub fn new(n: usize, fidelity: f64) -> Self {
        Self {
            n,
            fidelity,
            delta: (n as f64).powf(-0.2),
        }
    }
}

/// Entropy of the rank-3 state with weights (F, (1−F)/2, (1−F)/2).
pub fn rank3_entropy(fidelity: f64) -> f64 {
    let e = (1.0 - fidelity) / 2.0;
    entropy_bd(&[fidelity, e, e])
}

/// Deviation of the per-pair surprisal of a string holding `targets`
/// target pairs from the entropy. Infinite for impossible strings.
fn surprisal_gap(n: usize, fidelity: f64, targets: usize) -> f64 {
    let e = (1.0 - fidelity) / 2.0;
    let mut ln = 0.0;
    for (p, count) in [(fidelity, targets), (e, n - targets)] {
        if count > 0 {
            if p <= 0.0 {
                return f64::INFINITY;
            }
            ln += count as f64 * p.log2();
        }
    }
    (-ln / n as f64 - rank3_entropy(fidelity)).abs()
}

/// Probability that the error string falls outside the likely set.
pub fn hashing_p1(params: &HashingBoundParams) -> f64 {
    let HashingBoundParams { n, fidelity, delta } = *params;
    // every string with i targets is equally likely, so sum over i only
    (0..=n)
        .filter(|&i| surprisal_gap(n, fidelity, i) > delta)
        .map(|i| binomial_pmf(n, 1.0 - fidelity, n - i))
        .sum::<f64>()
        .min(1.0)
}

/// Upper bound on the output global fidelity.
pub fn hashing_fidelity_bound(params: &HashingBoundParams) -> f64 {
    1.0 - hashing_p1(params)
}

pub fn hashing_yield(fidelity: f64, delta: f64) -> f64 {
    1.0 - rank3_entropy(fidelity) - 2.0 * delta
}

/// Half-widths at which the bound jumps, ascending and distinct.
pub fn hashing_jumps(n: usize, fidelity: f64) -> Vec<f64> {
    let mut gaps: Vec<f64> = (0..=n)
        .map(|i| surprisal_gap(n, fidelity, i))
        .filter(|g| g.is_finite())
        .collect();
    gaps.sort_by(f64::total_cmp);
    gaps.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    gaps
}

/// Number of constant pieces of 1 − p1 over δ ≥ 0.
pub fn hashing_plateau_count(n: usize, fidelity: f64) -> usize {
    let jumps = hashing_jumps(n, fidelity);
    // a jump at δ = 0 does not open a new piece
    jumps.len() + 1 - usize::from(jumps.first().is_some_and(|&g| g <= 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_set_covers_everything() {
        let p = HashingBoundParams {
            n: 20,
            fidelity: 0.9,
            delta: 1e9,
        };
        assert_eq!(hashing_p1(&p), 0.0);
        let narrow = HashingBoundParams { delta: 0.0, ..p };
        assert!(hashing_p1(&narrow) > 0.99);
    }
}
