//! Seeded, parallel Monte-Carlo over protocol runs.
//!
//! Trial t of point p draws from a ChaCha8 stream keyed by (p << 32) | t,
//! and trials are reduced in fixed chunks, so results depend only on the
//! seed, never on the worker count.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ghz::{sample_ghz_configuration, GhzEnsemble};
use crate::protocols::{
    blocking_run, ghz_purify, GatePattern, ProtocolKind, ProtocolParams, ProtocolResult, Scenario,
};
use crate::state::{sample_configuration, ProductEnsemble};

const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Workload {
    Pairs {
        ensemble: ProductEnsemble,
        protocol: ProtocolKind,
        /// Split into independent blocks of this size.
        block_size: Option<usize>,
    },
    Ghz {
        ensemble: GhzEnsemble,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationPoint {
    pub workload: Workload,
    pub params: ProtocolParams,
}

impl SimulationPoint {
    pub fn n(&self) -> usize {
        match &self.workload {
            Workload::Pairs { ensemble, .. } => ensemble.n(),
            Workload::Ghz { ensemble } => ensemble.n,
        }
    }
}

pub fn trial_rng(seed: u64, point: u32, trial: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 32) | trial as u64);
    rng
}

/// Sample a configuration and run the protocol once.
pub fn run_trial(point: &SimulationPoint, rng: &mut ChaCha8Rng) -> Result<ProtocolResult> {
    match &point.workload {
        Workload::Pairs {
            ensemble,
            protocol,
            block_size,
        } => {
            let c = sample_configuration(ensemble, rng);
            match block_size {
                Some(b) if *b < c.len() => {
                    Ok(blocking_run(&c, *b, *protocol, &point.params, rng)?.combined)
                }
                _ => protocol.run(&c, &point.params, rng),
            }
        }
        Workload::Ghz { ensemble } => {
            let c = sample_ghz_configuration(ensemble, rng);
            ghz_purify(&c, &point.params, rng)
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: f64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(&mut self, o: &Moments) {
        self.count += o.count;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0.0 {
            f64::NAN
        } else {
            self.sum / self.count
        }
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        if self.count < 2.0 {
            return f64::NAN;
        }
        let m = self.mean();
        let var = (self.sum_sq / self.count - m * m).max(0.0) * self.count / (self.count - 1.0);
        (var / self.count).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BranchTally {
    pub runs: u64,
    /// Local fidelity over runs of this branch that keep something.
    pub local: Moments,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct McStats {
    pub trials: u64,
    pub aborted: u64,
    /// Aborts raised by a position readout rather than a count.
    pub location_aborts: u64,
    pub net_yield: Moments,
    pub local: Moments,
    pub global: Moments,
    pub resources: Moments,
    pub kept: Moments,
    pub branches: BTreeMap<Scenario, BranchTally>,
}

fn proportion(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = hits as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

impl McStats {
    pub fn record(&mut self, r: &ProtocolResult) {
        self.trials += 1;
        let tally = self.branches.entry(r.scenario).or_default();
        tally.runs += 1;
        if r.aborted {
            self.aborted += 1;
            let by_position = r.transcript.last().is_some_and(|m| {
                matches!(
                    m.pattern,
                    GatePattern::Position | GatePattern::ParityPosition | GatePattern::GhzPosition
                )
            });
            if by_position {
                self.location_aborts += 1;
            }
        }
        self.net_yield.push(r.net_yield());
        self.resources.push(r.resources_ebits);
        self.kept.push(r.output_size() as f64);
        if let (Some(f), Some(g)) = (r.local_fidelity(), r.global_fidelity()) {
            self.local.push(f);
            self.global.push(g);
            tally.local.push(f);
        }
    }

    pub fn merge(&mut self, o: &McStats) {
        self.trials += o.trials;
        self.aborted += o.aborted;
        self.location_aborts += o.location_aborts;
        self.net_yield.merge(&o.net_yield);
        self.local.merge(&o.local);
        self.global.merge(&o.global);
        self.resources.merge(&o.resources);
        self.kept.merge(&o.kept);
        for (s, t) in &o.branches {
            let mine = self.branches.entry(*s).or_default();
            mine.runs += t.runs;
            mine.local.merge(&t.local);
        }
    }

    pub fn abort_rate(&self) -> (f64, f64) {
        proportion(self.aborted, self.trials)
    }

    pub fn location_abort_rate(&self) -> (f64, f64) {
        proportion(self.location_aborts, self.trials)
    }

    pub fn branch_probability(&self, s: Scenario) -> (f64, f64) {
        proportion(self.branches.get(&s).map_or(0, |t| t.runs), self.trials)
    }

    /// Mean local fidelity of the kept pairs on one branch, with its error.
    pub fn branch_fidelity(&self, s: Scenario) -> (f64, f64) {
        self.branches
            .get(&s)
            .map_or((f64::NAN, f64::NAN), |t| (t.local.mean(), t.local.se()))
    }
}

/// Run `trials` independent trials of one point.
pub fn run_point(point: &SimulationPoint, point_index: u32, trials: u64, seed: u64) -> Result<McStats> {
    if trials > u32::MAX as u64 {
        return Err(Error::InvalidParameter(format!("{trials} trials exceed 2^32")));
    }
    point.params.validate()?;
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<McStats> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<McStats> {
            let mut stats = McStats::default();
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let mut rng = trial_rng(seed, point_index, t as u32);
                stats.record(&run_trial(point, &mut rng)?);
            }
            Ok(stats)
        })
        .collect::<Result<_>>()?;
    Ok(parts.iter().fold(McStats::default(), |mut acc, p| {
        acc.merge(p);
        acc
    }))
}

/// Run every point of a sweep; point i uses stream prefix i.
pub fn run_sweep(points: &[SimulationPoint], trials: u64, seed: u64) -> Result<Vec<McStats>> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| run_point(p, i as u32, trials, seed))
        .collect()
}
