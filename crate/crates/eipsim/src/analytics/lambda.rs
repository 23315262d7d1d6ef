//! Closed forms for EIP(λ) on rank-3 ensembles, λ ∈ {1, 2}.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use super::combinatorics::{binomial_pmf, entropy_bd};
use super::damp::{two_identical_location_cost, two_identical_location_fit};
use super::enumeration::{BranchTable, ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::protocols::{ProtocolKind, ProtocolParams};

fn check_lambda(lambda: usize) -> Result<()> {
    if lambda == 0 || lambda > 2 {
        return Err(Error::InvalidParameter(format!(
            "closed forms cover λ ∈ {{1, 2}}, got {lambda}"
        )));
    }
    Ok(())
}

fn ln_or_neg_inf(x: f64, power: usize) -> f64 {
    if power == 0 {
        0.0
    } else if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        power as f64 * x.ln()
    }
}

/// Probability that the 2λ+1 level counting aux reads `j`.
pub fn pj_lambda(n: usize, fidelity: f64, lambda: usize, j: usize) -> f64 {
    let d = 2 * lambda as i64 + 1;
    let e = (1.0 - fidelity) / 2.0;
    let ln_n = ln_factorial(n as u64);
    let mut p = 0.0;
    for b in 0..=n {
        for c in 0..=n - b {
            if (b as i64 - c as i64).rem_euclid(d) != j as i64 {
                continue;
            }
            let a = n - b - c;
            let ln = ln_n - ln_factorial(a as u64) - ln_factorial(b as u64) - ln_factorial(c as u64)
                + ln_or_neg_inf(fidelity, a)
                + ln_or_neg_inf(e, b + c);
            p += ln.exp();
        }
    }
    p
}

/// Global fidelity after EIP(λ): the chance of at most λ errors.
pub fn global_fidelity_lambda(n: usize, fidelity: f64, lambda: usize) -> f64 {
    (0..=lambda.min(n))
        .map(|k| binomial_pmf(n, 1.0 - fidelity, k))
        .sum::<f64>()
        .min(1.0)
}

/// Joint probability that both the counting readout and the signed
/// position readout (modulus 2n−1) are zero.
pub fn both_readouts_zero(n: usize, fidelity: f64, lambda: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let d = 2 * lambda + 1;
    let m = 2 * n - 1;
    let e = (1.0 - fidelity) / 2.0;
    let mut dp = vec![0.0; d * m];
    dp[0] = 1.0;
    for s in 1..=n {
        let mut next = vec![0.0; d * m];
        for c in 0..d {
            for w in 0..m {
                let p = dp[c * m + w];
                if p == 0.0 {
                    continue;
                }
                next[c * m + w] += p * fidelity;
                next[((c + 1) % d) * m + (w + s) % m] += p * e;
                next[((c + d - 1) % d) * m + (w + m - s % m) % m] += p * e;
            }
        }
        dp = next;
    }
    dp[0]
}

/// How E[log2 n'] is evaluated inside R(±2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RTable {
    Exact,
    Fit,
}

fn log2_or_zero(x: usize) -> f64 {
    if x <= 1 {
        0.0
    } else {
        (x as f64).log2()
    }
}

/// Expected ebits to place one 01 and one 10 once their signed distance
/// is known, averaged over uniform placements.
pub fn two_different_location_cost(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let pairs = (n * (n - 1)) as f64;
    (1..n)
        .map(|dist| {
            let weight = 2.0 * (n - dist) as f64 / pairs;
            let cost = if dist >= n.div_ceil(2) {
                log2_or_zero(n - dist)
            } else {
                log2_or_zero(n)
            };
            weight * cost
        })
        .sum()
}

/// Per-readout probabilities and costs behind `resources_lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaBranches {
    /// Counting readout zero and the position readout zero too.
    pub none: f64,
    pub one: f64,
    pub two_identical: f64,
    /// Counting readout zero, position readout nonzero (λ = 2 only).
    pub two_different: f64,
    pub cost_one: f64,
    pub cost_two_identical: f64,
    pub cost_zero: f64,
}

pub fn lambda_branches(n: usize, fidelity: f64, lambda: usize, table: RTable) -> Result<LambdaBranches> {
    check_lambda(lambda)?;
    let d = 2 * lambda + 1;
    let p: Vec<f64> = (0..d).map(|j| pj_lambda(n, fidelity, lambda, j)).collect();
    let one = p[1] + p[d - 1];
    let cost_one = log2_or_zero(n);
    if lambda == 1 {
        return Ok(LambdaBranches {
            none: p[0],
            one,
            two_identical: 0.0,
            two_different: 0.0,
            cost_one,
            cost_two_identical: 0.0,
            cost_zero: 0.0,
        });
    }
    let two_identical = p[2] + p[3];
    let cost_two_identical = if n < 3 {
        0.0
    } else {
        let located = match table {
            RTable::Exact => two_identical_location_cost(n),
            RTable::Fit => two_identical_location_fit(n),
        };
        ((2 * n - 3) as f64).log2() + located
    };
    let zero_zero = both_readouts_zero(n, fidelity, lambda).min(p[0]);
    let two_different = p[0] - zero_zero;
    let cost_zero = if n < 2 {
        0.0
    } else {
        let follow = if p[0] > 0.0 { two_different / p[0] } else { 0.0 };
        ((2 * n - 1) as f64).log2() + follow * two_different_location_cost(n)
    };
    Ok(LambdaBranches {
        none: zero_zero,
        one,
        two_identical,
        two_different,
        cost_one,
        cost_two_identical,
        cost_zero,
    })
}

impl LambdaBranches {
    fn zero(&self) -> f64 {
        self.none + self.two_different
    }

    pub fn expected_cost(&self, lambda: usize) -> f64 {
        ((2 * lambda + 1) as f64).log2()
            + self.one * self.cost_one
            + self.two_identical * self.cost_two_identical
            + self.zero() * self.cost_zero
    }

    /// Expected number of pairs flagged and discarded.
    pub fn expected_identified(&self) -> f64 {
        self.one + 2.0 * (self.two_identical + self.two_different)
    }
}

/// Expected ebits of one EIP(λ) run, counting aux included.
pub fn resources_lambda(n: usize, fidelity: f64, lambda: usize, table: RTable) -> Result<f64> {
    Ok(lambda_branches(n, fidelity, lambda, table)?.expected_cost(lambda))
}

/// Mean local fidelity of the kept pairs with its standard error: exact
/// below the enumeration cap, stratified sampling above it.
pub fn local_fidelity_lambda(n: usize, fidelity: f64, lambda: usize) -> Result<(f64, f64)> {
    check_lambda(lambda)?;
    let kind = ProtocolKind::Lambda { lambda };
    let params = ProtocolParams::default();
    let table = if n <= ENUMERATION_CAP.min(12) {
        BranchTable::enumerate(n, kind, &params)?
    } else {
        BranchTable::stratified(n, kind, &params, fidelity, 2000, 0x5eed)?
    };
    Ok(table.overall_local_fidelity(fidelity))
}

/// Yield with the output entropy discount, given the output local fidelity.
pub fn yield_eps_with_fidelity(
    n: usize,
    fidelity: f64,
    lambda: usize,
    table: RTable,
    local_fidelity: f64,
) -> Result<f64> {
    let b = lambda_branches(n, fidelity, lambda, table)?;
    let err = (1.0 - local_fidelity) / 2.0;
    let s = entropy_bd(&[local_fidelity, err, err]);
    if s >= 1.0 {
        return Err(Error::InfeasibleFidelity {
            value: local_fidelity,
            floor: 0.0,
        });
    }
    let rt = b.expected_cost(lambda);
    Ok((n as f64 - rt / (1.0 - s) - b.expected_identified()) / n as f64)
}

pub fn yield_eps(n: usize, fidelity: f64, lambda: usize, table: RTable) -> Result<f64> {
    let (local, _) = local_fidelity_lambda(n, fidelity, lambda)?;
    yield_eps_with_fidelity(n, fidelity, lambda, table, local)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn readout_mass() {
        for lambda in [1, 2] {
            let s: f64 = (0..2 * lambda + 1)
                .map(|j| pj_lambda(9, 0.87, lambda, j))
                .sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert_eq!(pj_lambda(9, 1.0, lambda, 0), 1.0);
        }
    }

    #[test]
    fn joint_zero_brute_force() {
        let (n, f) = (5, 0.8);
        let e = (1.0 - f) / 2.0;
        let mut want = 0.0;
        for code in 0..3usize.pow(n as u32) {
            let (mut c, mut w, mut p, mut x) = (0i64, 0i64, 1.0, code);
            for s in 1..=n as i64 {
                match x % 3 {
                    0 => p *= f,
                    1 => {
                        p *= e;
                        c += 1;
                        w += s
                    }
                    _ => {
                        p *= e;
                        c -= 1;
                        w -= s
                    }
                }
                x /= 3;
            }
            if c.rem_euclid(5) == 0 && w.rem_euclid(2 * n as i64 - 1) == 0 {
                want += p;
            }
        }
        assert!((both_readouts_zero(n, f, 2) - want).abs() < 1e-14);
    }

    #[test]
    fn one_error_cost() {
        let b = lambda_branches(8, 0.9, 2, RTable::Exact).unwrap();
        assert_eq!(b.cost_one, 3.0);
    }
}
