//! Executable error-identification protocols.
//!
//! Every run takes a sampled [`Configuration`] as hidden ground truth, talks
//! to it only through aux measurements, and reports what it kept and
//! discarded next to a per-position truth check.

mod blocking;
mod damp;
mod engine;
mod ghz;
mod lambda;
mod locate;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::AuxPoolSpec;
use crate::state::{Configuration, PairState};

pub use blocking::{blocking_run, BlockedResult};
pub use damp::{eip_damp_run, two_alt_run};
pub use engine::decode_count;
pub use ghz::ghz_purify;
pub use lambda::{aeip3_run, eip_lambda_run, full_rank_run, phase_to_flip_sample};
pub use locate::{
    decode_position, difference_window, separation_probability, split_blocks, sum_candidates,
};

/// How a run reacts to readings it cannot reconcile with its assumptions.
///
/// Levels are cumulative: each one aborts in every case the previous one does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortPolicy {
    /// Record inconsistencies and fall back to a deterministic decode.
    Never,
    /// Abort when the counted errors exceed `k_max`.
    OnThreshold,
    /// Also abort on any reading outside the valid residue set.
    OnInconsistency,
    /// Keep the ensemble only when no error at all is detected.
    OnAnyError,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProtocolParams {
    /// Largest error count the protocol assumes.
    pub lambda: usize,
    /// Abort threshold on the counted errors; `None` never aborts on count.
    pub k_max: Option<usize>,
    /// Number of blocks per recursion level when locating many errors.
    pub fan_out: usize,
    /// Number of parts per split when resolving a general error difference.
    pub split_fan_out: usize,
    pub abort_policy: AbortPolicy,
    /// Per-gate probability that the aux index survives.
    pub noisy_gate_q: f64,
    pub aux_dims_power_of_two_only: bool,
    pub aux: AuxPoolSpec,
    /// Block size for the phase-parity round on GHZ triples.
    pub ghz_split_size: usize,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            lambda: 2,
            k_max: None,
            fan_out: 2,
            split_fan_out: 2,
            abort_policy: AbortPolicy::OnThreshold,
            noisy_gate_q: 1.0,
            aux_dims_power_of_two_only: false,
            aux: AuxPoolSpec::ideal(),
            ghz_split_size: 4,
        }
    }
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<()> {
        if self.fan_out < 2 {
            return Err(Error::InvalidParameter(format!(
                "fan_out {} < 2",
                self.fan_out
            )));
        }
        if self.split_fan_out < 2 {
            return Err(Error::InvalidParameter(format!(
                "split_fan_out {} < 2",
                self.split_fan_out
            )));
        }
        if !(0.0..=1.0).contains(&self.noisy_gate_q) {
            return Err(Error::InvalidParameter(format!(
                "gate q {} outside [0,1]",
                self.noisy_gate_q
            )));
        }
        if self.ghz_split_size == 0 {
            return Err(Error::InvalidParameter(
                "ghz_split_size must be positive".into(),
            ));
        }
        // fail early rather than mid-run on an infeasible embedding
        self.pool().draw(2)?;
        Ok(())
    }

    pub(crate) fn pool(&self) -> AuxPoolSpec {
        AuxPoolSpec {
            power_of_two_only: self.aux_dims_power_of_two_only || self.aux.power_of_two_only,
            ..self.aux
        }
    }
}

/// Which counter-gate pattern produced a reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GatePattern {
    /// One gate per pair.
    Count,
    /// Pair at relative position i drives i gates.
    Position,
    /// Position pattern restricted to a parity class after relabeling.
    ParityPosition,
    /// Tripartite count on GHZ triples.
    GhzCount,
    GhzPosition,
    /// Bilateral parity check of GHZ phase bits.
    GhzParity,
}

/// One consumed aux and its readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub pattern: GatePattern,
    pub positions: Vec<usize>,
    pub d: u64,
    pub outcome: u64,
    pub ebits: f64,
}

/// A local Z measurement on one pair, which consumes it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalCheck {
    pub position: usize,
    pub expected: PairState,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Kept,
    Discarded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthEntry {
    pub position: usize,
    pub claim: Claim,
    /// Overlap of the pair's final state with the target.
    pub fidelity: f64,
    /// Kept and pure, or discarded and initially erroneous.
    pub correct: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyKind {
    /// A readout outside the residues the current hypothesis allows.
    InconsistentReading,
    /// The truth held more errors than the protocol assumes.
    AssumptionViolated,
    MislocatedSeparable,
    /// A separable triple sat inside a phase-parity subset.
    SeparableInParity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anomaly {
    pub kind: AnomalyKind,
    pub detail: String,
}

/// What the protocol concluded about the ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    NoErrors,
    One,
    TwoIdentical,
    TwoDifferent,
    /// More than two errors located.
    Many,
    Aborted,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::NoErrors,
        Scenario::One,
        Scenario::TwoIdentical,
        Scenario::TwoDifferent,
        Scenario::Many,
        Scenario::Aborted,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::NoErrors => "none",
            Scenario::One => "one",
            Scenario::TwoIdentical => "identical",
            Scenario::TwoDifferent => "different",
            Scenario::Many => "many",
            Scenario::Aborted => "abort",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub n: usize,
    pub kept: Vec<usize>,
    pub discarded: Vec<usize>,
    /// Kept positions that were repaired locally instead of discarded.
    pub corrected: Vec<usize>,
    pub aborted: bool,
    pub resources_ebits: f64,
    pub transcript: Vec<Measurement>,
    pub local_checks: Vec<LocalCheck>,
    pub truth_check: Vec<TruthEntry>,
    pub scenario: Scenario,
    pub anomalies: Vec<Anomaly>,
}

impl ProtocolResult {
    pub fn output_size(&self) -> usize {
        self.kept.len()
    }

    fn kept_fidelities(&self) -> impl Iterator<Item = f64> + '_ {
        self.truth_check
            .iter()
            .filter(|t| t.claim == Claim::Kept)
            .map(|t| t.fidelity)
    }

    /// Mean target overlap of the kept pairs; `None` when nothing is kept.
    pub fn local_fidelity(&self) -> Option<f64> {
        let m = self.output_size();
        (m > 0).then(|| self.kept_fidelities().sum::<f64>() / m as f64)
    }

    /// Overlap of the kept register with the all-target state.
    pub fn global_fidelity(&self) -> Option<f64> {
        (self.output_size() > 0).then(|| self.kept_fidelities().product())
    }

    /// Kept pairs minus consumed ebits, per input pair.
    pub fn net_yield(&self) -> f64 {
        (self.output_size() as f64 - self.resources_ebits) / self.n as f64
    }

    pub fn all_correct(&self) -> bool {
        self.truth_check.iter().all(|t| t.correct)
    }

    /// Ledger identity: resources equal the summed log2 d of the transcript.
    pub fn ledger_sum(&self) -> f64 {
        self.transcript.iter().map(|m| (m.d as f64).log2()).sum()
    }
}

/// Protocol selector shared by blocking, sweeps and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ProtocolKind {
    Damp,
    TwoAlt,
    Lambda {
        lambda: usize,
    },
    Aeip3,
    /// aEIP(3) that keeps the ensemble only when no error is detected.
    Aeip3Strict,
    FullRank {
        lambda: usize,
    },
}

impl ProtocolKind {
    pub fn run<R: Rng + ?Sized>(
        self,
        c: &Configuration,
        params: &ProtocolParams,
        rng: &mut R,
    ) -> Result<ProtocolResult> {
        match self {
            ProtocolKind::Damp => eip_damp_run(c, params, rng),
            ProtocolKind::TwoAlt => two_alt_run(c, params, rng),
            ProtocolKind::Lambda { lambda } => {
                eip_lambda_run(c, &ProtocolParams { lambda, ..*params }, rng)
            }
            ProtocolKind::Aeip3 => aeip3_run(c, params, rng),
            ProtocolKind::Aeip3Strict => aeip3_run(
                c,
                &ProtocolParams {
                    abort_policy: AbortPolicy::OnAnyError,
                    ..*params
                },
                rng,
            ),
            ProtocolKind::FullRank { lambda } => {
                full_rank_run(c, &ProtocolParams { lambda, ..*params }, rng)
            }
        }
    }

    pub fn label(self) -> String {
        match self {
            ProtocolKind::Damp => "damp".into(),
            ProtocolKind::TwoAlt => "two_alt".into(),
            ProtocolKind::Lambda { lambda } => format!("lambda{lambda}"),
            ProtocolKind::Aeip3 => "aeip3".into(),
            ProtocolKind::Aeip3Strict => "aeip3_strict".into(),
            ProtocolKind::FullRank { lambda } => format!("full_rank{lambda}"),
        }
    }
}
