//! Exact branch statistics by running a deterministic protocol on every
//! configuration, and a stratified sampler for sizes beyond that.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::combinatorics::{binomial, binomial_pmf};
use crate::error::{Error, Result};
use crate::protocols::{ProtocolKind, ProtocolParams, ProtocolResult, Scenario};
use crate::state::{Configuration, PairState};

pub const ENUMERATION_CAP: usize = 14;

/// Per-(scenario, error count) sums over configurations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
struct Cell {
    /// Configurations (or their sampled stand-ins, rescaled).
    weight: f64,
    /// Weight of those keeping at least one pair.
    with_output: f64,
    local: f64,
    local_sq: f64,
    global: f64,
    resources: f64,
    kept: f64,
    /// Raw sample count, for standard errors.
    samples: f64,
}

impl Cell {
    fn add(&mut self, r: &ProtocolResult, scale: f64) {
        self.weight += scale;
        self.resources += scale * r.resources_ebits;
        self.kept += scale * r.output_size() as f64;
        self.samples += 1.0;
        if let (Some(f), Some(g)) = (r.local_fidelity(), r.global_fidelity()) {
            self.with_output += scale;
            self.local += scale * f;
            self.local_sq += scale * f * f;
            self.global += scale * g;
        }
    }

    fn merge(&mut self, o: &Cell) {
        self.weight += o.weight;
        self.with_output += o.with_output;
        self.local += o.local;
        self.local_sq += o.local_sq;
        self.global += o.global;
        self.resources += o.resources;
        self.kept += o.kept;
        self.samples += o.samples;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchStats {
    pub scenario: Scenario,
    pub probability: f64,
    /// Mean local fidelity of the kept pairs given this branch.
    pub local_fidelity: f64,
    pub global_fidelity: f64,
    pub mean_resources: f64,
    pub mean_kept: f64,
}

/// Branch statistics for one protocol and size, reusable for any F.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchTable {
    pub n: usize,
    pub kind: ProtocolKind,
    pub exact: bool,
    /// Indexed by scenario then by error count.
    cells: Vec<Vec<Cell>>,
}

fn alphabet(kind: ProtocolKind) -> Result<&'static [PairState]> {
    match kind {
        ProtocolKind::Damp => Ok(&[PairState::Err01]),
        ProtocolKind::Lambda { lambda } if lambda <= 2 => Ok(&[PairState::Err01, PairState::Err10]),
        ProtocolKind::Aeip3 | ProtocolKind::Aeip3Strict => {
            Ok(&[PairState::Err01, PairState::Err10])
        }
        _ => Err(Error::InvalidParameter(format!(
            "branch tables need a deterministic protocol over a product ensemble, got {}",
            kind.label()
        ))),
    }
}

fn scenario_index(s: Scenario) -> usize {
    Scenario::ALL.iter().position(|&x| x == s).unwrap()
}

impl BranchTable {
    fn empty(n: usize, kind: ProtocolKind, exact: bool) -> Self {
        Self {
            n,
            kind,
            exact,
            cells: vec![vec![Cell::default(); n + 1]; Scenario::ALL.len()],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        }
        self
    }

    /// Run `kind` on every configuration of n pairs (ideal resources).
    pub fn enumerate(n: usize, kind: ProtocolKind, params: &ProtocolParams) -> Result<Self> {
        if n > ENUMERATION_CAP {
            return Err(Error::TooLarge {
                n,
                cap: ENUMERATION_CAP,
            });
        }
        let errors = alphabet(kind)?;
        let base = errors.len() + 1;
        let total = (base as u64).pow(n as u32);
        let chunk = 4096u64;
        let chunks = total.div_ceil(chunk);
        (0..chunks)
            .into_par_iter()
            .map(|c| -> Result<Self> {
                let mut table = Self::empty(n, kind, true);
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                for mut code in c * chunk..((c + 1) * chunk).min(total) {
                    let states: Vec<PairState> = (0..n)
                        .map(|_| {
                            let digit = (code % base as u64) as usize;
                            code /= base as u64;
                            if digit == 0 {
                                PairState::Target
                            } else {
                                errors[digit - 1]
                            }
                        })
                        .collect();
                    let cfg = Configuration::new(states);
                    let r = kind.run(&cfg, params, &mut rng)?;
                    table.cells[scenario_index(r.scenario)][cfg.error_count()].add(&r, 1.0);
                }
                Ok(table)
            })
            .try_reduce(|| Self::empty(n, kind, true), |a, b| Ok(a.merge(b)))
    }

    /// Stratified estimate: for each error count with binomial mass above
    /// `mass_floor` at fidelity `fidelity`, `samples` uniform configurations
    /// with exactly that many errors.
    pub fn stratified(
        n: usize,
        kind: ProtocolKind,
        params: &ProtocolParams,
        fidelity: f64,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let errors = alphabet(kind)?;
        let mass_floor = 1e-12;
        let strata: Vec<usize> = (0..=n)
            .filter(|&k| binomial_pmf(n, 1.0 - fidelity, k) > mass_floor)
            .collect();
        strata
            .into_par_iter()
            .map(|k| -> Result<Self> {
                let mut table = Self::empty(n, kind, false);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                let population = binomial(n, k) * (errors.len() as f64).powi(k as i32);
                let draws = if population <= samples as f64 {
                    // small strata are enumerated through repeated draws anyway
                    samples.min(4 * population as usize).max(1)
                } else {
                    samples
                };
                let scale = population / draws as f64;
                for _ in 0..draws {
                    let mut states = vec![PairState::Target; n];
                    for p in sample(&mut rng, n, k) {
                        states[p] = errors[rng.gen_range(0..errors.len())];
                    }
                    let r = kind.run(&Configuration::new(states), params, &mut rng)?;
                    table.cells[scenario_index(r.scenario)][k].add(&r, scale);
                }
                Ok(table)
            })
            .try_reduce(|| Self::empty(n, kind, false), |a, b| Ok(a.merge(b)))
    }

    fn error_weight(&self) -> f64 {
        match self.kind {
            ProtocolKind::Damp => 1.0,
            _ => 0.5,
        }
    }

    /// Probability of one configuration with k errors.
    fn config_probability(&self, fidelity: f64, k: usize) -> f64 {
        let e = (1.0 - fidelity) * self.error_weight();
        let t = fidelity;
        let n = self.n;
        if e == 0.0 {
            return if k == 0 { t.powi(n as i32) } else { 0.0 };
        }
        t.powi((n - k) as i32) * e.powi(k as i32)
    }

    pub fn branches(&self, fidelity: f64) -> Vec<BranchStats> {
        let w: Vec<f64> = (0..=self.n)
            .map(|k| self.config_probability(fidelity, k))
            .collect();
        Scenario::ALL
            .iter()
            .zip(&self.cells)
            .filter_map(|(&scenario, row)| {
                let dot = |f: fn(&Cell) -> f64| -> f64 {
                    row.iter().zip(&w).map(|(c, wk)| f(c) * wk).sum()
                };
                let p = dot(|c| c.weight);
                if p <= 0.0 {
                    return None;
                }
                let out = dot(|c| c.with_output);
                Some(BranchStats {
                    scenario,
                    probability: p,
                    local_fidelity: if out > 0.0 {
                        dot(|c| c.local) / out
                    } else {
                        f64::NAN
                    },
                    global_fidelity: if out > 0.0 {
                        dot(|c| c.global) / out
                    } else {
                        f64::NAN
                    },
                    mean_resources: dot(|c| c.resources) / p,
                    mean_kept: dot(|c| c.kept) / p,
                })
            })
            .collect()
    }

    /// Mean local fidelity over runs that keep something, with its
    /// standard error (zero when exact).
    pub fn overall_local_fidelity(&self, fidelity: f64) -> (f64, f64) {
        let w: Vec<f64> = (0..=self.n)
            .map(|k| self.config_probability(fidelity, k))
            .collect();
        let mut out = 0.0;
        let mut local = 0.0;
        let mut var = 0.0;
        for k in 0..=self.n {
            let stratum: Cell = self.cells.iter().fold(Cell::default(), |mut acc, row| {
                acc.merge(&row[k]);
                acc
            });
            out += w[k] * stratum.with_output;
            local += w[k] * stratum.local;
            if !self.exact && stratum.samples > 1.0 && stratum.with_output > 0.0 {
                let mean = stratum.local / stratum.with_output;
                let s2 = (stratum.local_sq / stratum.with_output - mean * mean).max(0.0);
                let mass = w[k] * stratum.with_output;
                var += mass * mass * s2 / stratum.samples;
            }
        }
        if out <= 0.0 {
            return (f64::NAN, 0.0);
        }
        (local / out, var.sqrt() / out)
    }

    /// Expected ebits per run.
    pub fn mean_resources(&self, fidelity: f64) -> f64 {
        self.branches(fidelity)
            .iter()
            .map(|b| b.probability * b.mean_resources)
            .sum()
    }
}

/// Exact posterior local fidelity of the kept pairs on one branch.
pub fn local_fidelity_exact(
    n: usize,
    fidelity: f64,
    lambda: usize,
    branch: Scenario,
) -> Result<f64> {
    let table = BranchTable::enumerate(
        n,
        ProtocolKind::Lambda { lambda },
        &ProtocolParams::default(),
    )?;
    table
        .branches(fidelity)
        .into_iter()
        .find(|b| b.scenario == branch)
        .map(|b| b.local_fidelity)
        .ok_or_else(|| Error::InvalidParameter(format!("branch {branch} has probability zero")))
}
