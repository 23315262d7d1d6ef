//! Resources and yields for ensembles with a single error kind.

use std::collections::HashMap;

use super::combinatorics::{binomial, error_count_pmf, hypergeometric_pmf, subensemble_size};

/// Expected ebits spent locating one error among `len` pairs.
fn locate_one_cost(len: usize) -> f64 {
    if len <= 1 {
        0.0
    } else {
        (len as f64).log2()
    }
}

/// E[log2 n'] over uniformly placed pairs of identical errors.
pub fn two_identical_location_cost(n: usize) -> f64 {
    if n < 3 {
        return 0.0;
    }
    let pairs = binomial(n, 2);
    (3..2 * n)
        .map(|sum| {
            let size = subensemble_size(n, sum);
            size as f64 / pairs * locate_one_cost(size)
        })
        .sum()
}

/// Logarithmic approximation of [`two_identical_location_cost`].
pub fn two_identical_location_fit(n: usize) -> f64 {
    1.449 * (n as f64).ln() - 1.760
}

/// Resources to locate two identical errors over the information minimum.
pub fn two_identical_ratio(n: usize) -> f64 {
    let eip = ((2 * n - 3) as f64).log2() + two_identical_location_cost(n);
    eip / binomial(n, 2).log2()
}

/// Cached expected location costs for a fixed block fan-out.
#[derive(Debug, Clone)]
pub struct ResourceModel {
    fan_out: usize,
    memo: HashMap<(usize, usize), (f64, f64)>,
}

impl ResourceModel {
    pub fn new(fan_out: usize) -> Self {
        assert!(fan_out >= 2, "fan-out must be at least 2");
        Self {
            fan_out,
            memo: HashMap::new(),
        }
    }

    /// Expected ebits to locate `k` errors among `len` pairs once k is known.
    pub fn total(&mut self, len: usize, k: usize) -> f64 {
        let (f, l) = self.split(len, k);
        f + l
    }

    /// (block counting, location inside blocks) for k > 2; for k ≤ 2 all
    /// of the cost is reported as location.
    pub fn split(&mut self, len: usize, k: usize) -> (f64, f64) {
        if k == 0 || k >= len {
            return (0.0, 0.0);
        }
        match k {
            1 => (0.0, locate_one_cost(len)),
            2 => (
                0.0,
                ((2 * len - 3) as f64).log2() + two_identical_location_cost(len),
            ),
            _ => {
                if let Some(&v) = self.memo.get(&(len, k)) {
                    return v;
                }
                let parts = self.fan_out.min(len);
                let base = len / parts;
                let mut sizes = vec![base; parts - 1];
                sizes.push(len - base * (parts - 1));
                let mut walk_memo = HashMap::new();
                let v = self.walk(&sizes, 0, k, len, &mut walk_memo);
                self.memo.insert((len, k), v);
                v
            }
        }
    }

    fn walk(
        &mut self,
        sizes: &[usize],
        i: usize,
        k: usize,
        len: usize,
        memo: &mut HashMap<(usize, usize), (f64, f64)>,
    ) -> (f64, f64) {
        if i == sizes.len() - 1 {
            return (0.0, self.total(sizes[i], k));
        }
        if let Some(&v) = memo.get(&(i, k)) {
            return v;
        }
        let b = sizes[i];
        let cap = k.min(b);
        let mut find = if cap > 0 {
            ((cap + 1) as f64).log2()
        } else {
            0.0
        };
        let mut locate = 0.0;
        for ki in 0..=cap {
            let w = hypergeometric_pmf(len, k, b, ki);
            if w == 0.0 {
                continue;
            }
            let (f, l) = self.walk(sizes, i + 1, k - ki, len - b, memo);
            find += w * f;
            locate += w * (l + self.total(b, ki));
        }
        memo.insert((i, k), (find, locate));
        (find, locate)
    }
}

/// Expected ebits to locate k known errors among n pairs (excludes the
/// initial count).
pub fn resources_damp(n: usize, k: usize, fan_out: usize) -> f64 {
    ResourceModel::new(fan_out).total(n, k)
}

/// Largest k whose location still leaves a positive net gain.
pub fn k_max_opt(n: usize, fan_out: usize) -> usize {
    let mut model = ResourceModel::new(fan_out);
    (0..=n)
        .filter(|&k| n as f64 - k as f64 - model.total(n, k) > 0.0)
        .max()
        .unwrap_or(0)
}

/// Probability that the count exceeds `k_max`.
pub fn abort_probability_damp(n: usize, fidelity: f64, k_max: Option<usize>) -> f64 {
    match k_max {
        Some(k_max) if k_max < n => (k_max + 1..=n)
            .map(|k| error_count_pmf(n, fidelity, k))
            .sum(),
        _ => 0.0,
    }
}

/// Expected ebits of one run including the n+1 level count.
pub fn expected_resources_damp(
    n: usize,
    fidelity: f64,
    k_max: Option<usize>,
    fan_out: usize,
) -> f64 {
    let top = k_max.unwrap_or(n).min(n);
    let mut model = ResourceModel::new(fan_out);
    ((n + 1) as f64).log2()
        + (0..=top)
            .map(|k| error_count_pmf(n, fidelity, k) * model.total(n, k))
            .sum::<f64>()
}

/// Expected net yield with abort above `k_max` (`None`: never abort).
pub fn yield_damp(n: usize, fidelity: f64, k_max: Option<usize>, fan_out: usize) -> f64 {
    let top = k_max.unwrap_or(n).min(n);
    let mut model = ResourceModel::new(fan_out);
    let gain: f64 = (0..=top)
        .map(|k| error_count_pmf(n, fidelity, k) * (n as f64 - k as f64 - model.total(n, k)))
        .sum();
    (gain - ((n + 1) as f64).log2()) / n as f64
}

/// Expected kept pairs and ebits of the halving procedure on two errors.
pub fn two_alt_expectation(n: usize) -> (f64, f64) {
    if n <= 2 {
        return (0.0, 0.0);
    }
    let pairs = binomial(n, 2);
    let h1 = n.div_ceil(2);
    let h2 = n / 2;
    let split = (h1 * h2) as f64 / pairs;
    let mut kept = split * (n - 2) as f64;
    let mut cost = 3f64.log2() + split * (locate_one_cost(h1) + locate_one_cost(h2));
    for (both, other) in [(h1, h2), (h2, h1)] {
        let w = binomial(both, 2) / pairs;
        if w == 0.0 {
            continue;
        }
        let (k, c) = if both >= 8 {
            two_alt_expectation(both)
        } else {
            (0.0, 0.0)
        };
        kept += w * (other as f64 + k);
        cost += w * c;
    }
    (kept, cost)
}

pub fn two_alt_yield(n: usize) -> f64 {
    let (kept, cost) = two_alt_expectation(n);
    (kept - cost) / n as f64
}

/// Yield bound for any procedure that fully determines k errors.
pub fn determine_all_bound(n: usize, k: usize) -> f64 {
    (n as f64 - k as f64 - binomial(n, k).log2()) / n as f64
}
