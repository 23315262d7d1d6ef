//! Closed-form and exact-enumeration yields, fidelities and resources.

mod combinatorics;
mod damp;
mod dejmps;
mod enumeration;
mod hashing;
mod lambda;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::Scenario;

pub use combinatorics::{
    binomial, binomial_pmf, decode_sum, entropy_bd, error_count_pmf, fidelity_bounds,
    global_fidelity_bounds, hypergeometric_pmf, subensemble_size, two_error_placement_pmf,
    Placement,
};
pub use damp::{
    abort_probability_damp, determine_all_bound, expected_resources_damp, k_max_opt,
    resources_damp, two_alt_expectation, two_alt_yield, two_identical_location_cost,
    two_identical_location_fit, two_identical_ratio, yield_damp, ResourceModel,
};
pub use dejmps::{dejmps_curve, dejmps_orient, dejmps_step, DejmpsPoint};
pub use enumeration::{local_fidelity_exact, BranchStats, BranchTable, ENUMERATION_CAP};
pub use hashing::{
    hashing_fidelity_bound, hashing_jumps, hashing_p1, hashing_plateau_count, hashing_yield,
    rank3_entropy, HashingBoundParams,
};
pub use lambda::{
    both_readouts_zero, global_fidelity_lambda, lambda_branches, local_fidelity_lambda,
    pj_lambda, resources_lambda, two_different_location_cost, yield_eps,
    yield_eps_with_fidelity, LambdaBranches, RTable,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticsReport {
    pub yield_: f64,
    pub f_local: f64,
    pub f_global: f64,
    /// Expected ebits per run.
    pub resources: f64,
    pub branch_probs: BTreeMap<Scenario, f64>,
    /// Expected kept pairs per run.
    pub mean_output: f64,
    /// Largest possible number of kept pairs.
    pub max_output: usize,
}

impl AnalyticsReport {
    pub fn check(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("report: {what}")));
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !self.branch_probs.values().all(|&p| unit(p)) || !unit(self.f_local) {
            return bad("probability outside [0,1]");
        }
        let total: f64 = self.branch_probs.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return bad("branch probabilities do not sum to one");
        }
        let (lo, hi) = fidelity_bounds(self.f_global, self.max_output.max(1));
        let tol = 1e-12;
        if self.f_local < lo - tol || self.f_local > hi + tol {
            return bad("local fidelity outside the global-fidelity bounds");
        }
        Ok(())
    }
}

pub fn report_damp(n: usize, fidelity: f64, k_max: Option<usize>, fan_out: usize) -> AnalyticsReport {
    let top = k_max.unwrap_or(n).min(n);
    let mut branch_probs = BTreeMap::new();
    let mut mean_output = 0.0;
    for k in 0..=top {
        let p = error_count_pmf(n, fidelity, k);
        let s = match k {
            0 => Scenario::NoErrors,
            1 => Scenario::One,
            2 => Scenario::TwoIdentical,
            _ => Scenario::Many,
        };
        *branch_probs.entry(s).or_insert(0.0) += p;
        mean_output += p * (n - k) as f64;
    }
    let abort = abort_probability_damp(n, fidelity, k_max);
    if abort > 0.0 {
        branch_probs.insert(Scenario::Aborted, abort);
    }
    AnalyticsReport {
        yield_: yield_damp(n, fidelity, k_max, fan_out),
        f_local: 1.0,
        f_global: 1.0,
        resources: expected_resources_damp(n, fidelity, k_max, fan_out),
        branch_probs,
        mean_output,
        max_output: n,
    }
}

pub fn report_lambda(n: usize, fidelity: f64, lambda: usize, table: RTable) -> Result<AnalyticsReport> {
    let b = lambda_branches(n, fidelity, lambda, table)?;
    let (f_local, _) = local_fidelity_lambda(n, fidelity, lambda)?;
    let mut branch_probs = BTreeMap::new();
    for (s, p) in [
        (Scenario::NoErrors, b.none),
        (Scenario::One, b.one),
        (Scenario::TwoIdentical, b.two_identical),
        (Scenario::TwoDifferent, b.two_different),
    ] {
        if p > 0.0 {
            branch_probs.insert(s, p);
        }
    }
    Ok(AnalyticsReport {
        yield_: yield_eps_with_fidelity(n, fidelity, lambda, table, f_local)?,
        f_local,
        f_global: global_fidelity_lambda(n, fidelity, lambda),
        resources: b.expected_cost(lambda),
        branch_probs,
        mean_output: n as f64 - b.expected_identified(),
        max_output: n,
    })
}
