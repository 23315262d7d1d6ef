use statrs::function::factorial::{binomial as binom, ln_binomial};

use crate::protocols::sum_candidates;

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        0.0
    } else {
        binom(n as u64, k as u64)
    }
}

/// Probability of exactly k errors among n pairs of fidelity F.
pub fn error_count_pmf(n: usize, fidelity: f64, k: usize) -> f64 {
    binomial_pmf(n, 1.0 - fidelity, k)
}

pub fn binomial_pmf(n: usize, p: f64, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let (n, k) = (n as u64, k as u64);
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    (ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
}

/// Drawing `draws` items without replacement from `population` holding
/// `successes` marked ones: probability that exactly `k` are marked.
pub fn hypergeometric_pmf(population: usize, successes: usize, draws: usize, k: usize) -> f64 {
    if k > successes || k > draws || draws - k > population - successes {
        return 0.0;
    }
    binomial(successes, k) * binomial(population - successes, draws - k)
        / binomial(population, draws)
}

/// Shannon entropy in bits of a probability vector.
pub fn entropy_bd(weights: &[f64]) -> f64 {
    weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| -w * w.log2())
        .sum()
}

/// Tight range of the local fidelity of m pairs with global fidelity Fg.
pub fn fidelity_bounds(global: f64, m: usize) -> (f64, f64) {
    (global, (1.0 - (1.0 - global) / m as f64).max(global))
}

/// Tight range of the global fidelity of m pairs with local fidelity F.
pub fn global_fidelity_bounds(local: f64, m: usize) -> (f64, f64) {
    ((1.0 - m as f64 * (1.0 - local)).max(0.0), local)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Two errors of the same kind; the readout is their position sum.
    Identical,
    /// One 01 and one 10; the readout is their signed distance.
    Different,
}

impl Placement {
    pub fn modulus(self, n: usize) -> usize {
        match self {
            Placement::Identical => 2 * n - 3,
            Placement::Different => 2 * n - 1,
        }
    }
}

/// Position sum r + s in 3..=2n−1 behind a readout of a two-identical EPG.
pub fn decode_sum(j: usize, n: usize) -> usize {
    if j < 3 {
        j + 2 * n - 3
    } else {
        j
    }
}

/// Size of each of the two subensembles isolated by position sum `sum`.
pub fn subensemble_size(n: usize, sum: usize) -> usize {
    sum_candidates(sum, n).len()
}

/// Probability that two uniformly placed errors produce readout `j`.
pub fn two_error_placement_pmf(n: usize, variant: Placement, j: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    match variant {
        Placement::Identical => {
            if n < 3 {
                return if j == 0 { 1.0 } else { 0.0 };
            }
            let m = variant.modulus(n);
            if j >= m {
                return 0.0;
            }
            subensemble_size(n, decode_sum(j, n)) as f64 / binomial(n, 2)
        }
        Placement::Different => {
            let m = variant.modulus(n) as i64;
            if j as i64 >= m || j == 0 {
                return 0.0;
            }
            let j = j as i64;
            let dist = if j < n as i64 { j } else { m - j };
            (n as i64 - dist) as f64 / (n * (n - 1)) as f64
        }
    }
}
