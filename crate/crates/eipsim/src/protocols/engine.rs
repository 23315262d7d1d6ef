use std::collections::BTreeSet;

use rand::Rng;

use super::{
    AbortPolicy, Anomaly, AnomalyKind, Claim, GatePattern, LocalCheck, Measurement, ProtocolParams,
    ProtocolResult, Scenario, TruthEntry,
};
use crate::error::Error;
use crate::noise::{gate_survival, AuxPoolSpec};
use crate::state::{residue_preimages, Configuration, PairState, ZOutcome};

pub(crate) enum Halt {
    Abort,
    Fail(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Fail(e)
    }
}

pub(crate) type Flow<T> = std::result::Result<T, Halt>;

/// Unique value in `lo..=hi` matching a count readout, if any.
pub fn decode_count(outcome: u64, d: u64, lo: i64, hi: i64) -> Option<i64> {
    match residue_preimages(outcome, d, lo, hi).as_slice() {
        [x] => Some(*x),
        _ => None,
    }
}

/// Mutable state of one protocol run over a hidden configuration.
pub struct Session<'a, R: Rng + ?Sized> {
    truth: Vec<PairState>,
    initial: Vec<PairState>,
    pub(crate) params: ProtocolParams,
    pool: AuxPoolSpec,
    pub(crate) rng: &'a mut R,
    transcript: Vec<Measurement>,
    local_checks: Vec<LocalCheck>,
    anomalies: Vec<Anomaly>,
    discarded: BTreeSet<usize>,
}

impl<'a, R: Rng + ?Sized> Session<'a, R> {
    pub(crate) fn new(
        c: &Configuration,
        params: &ProtocolParams,
        rng: &'a mut R,
    ) -> crate::Result<Self> {
        params.validate()?;
        Ok(Self {
            truth: c.states().to_vec(),
            initial: c.states().to_vec(),
            params: *params,
            pool: params.pool(),
            rng,
            transcript: Vec::new(),
            local_checks: Vec::new(),
            anomalies: Vec::new(),
            discarded: BTreeSet::new(),
        })
    }

    pub(crate) fn n(&self) -> usize {
        self.truth.len()
    }

    pub(crate) fn all_positions(&self) -> Vec<usize> {
        (1..=self.n()).collect()
    }

    pub(crate) fn state(&self, position: usize) -> PairState {
        self.truth[position - 1]
    }

    pub(crate) fn set_state(&mut self, position: usize, s: PairState) {
        self.truth[position - 1] = s;
    }

    pub(crate) fn survivors(&self) -> Vec<usize> {
        (1..=self.n())
            .filter(|p| !self.discarded.contains(p))
            .collect()
    }

    pub(crate) fn discard(&mut self, position: usize) {
        self.discarded.insert(position);
    }

    pub(crate) fn policy(&self) -> AbortPolicy {
        self.params.abort_policy
    }

    pub(crate) fn note(&mut self, kind: AnomalyKind, detail: String) {
        self.anomalies.push(Anomaly { kind, detail });
    }

    /// Apply a weighted counter-gate pattern onto a fresh aux of (at least)
    /// `d` levels and read it out. Returns the outcome and the physical d.
    pub(crate) fn measure(
        &mut self,
        pattern: GatePattern,
        gates: &[(usize, u64)],
        d: u64,
    ) -> Flow<(u64, u64)> {
        let drawn = self.pool.draw(d)?;
        let d_phys = drawn.aux.d();
        let mut aux = drawn.aux;
        for &(pos, reps) in gates {
            aux = aux.shifted(self.state(pos), reps);
        }
        let applications: u64 = gates.iter().map(|&(_, r)| r).sum();
        let gate_ok = self.rng.gen::<f64>() < gate_survival(self.params.noisy_gate_q, applications);
        let mut outcome = if gate_ok {
            crate::state::measure_aux(&aux, self.rng)
        } else {
            self.rng.gen_range(0..d_phys)
        };
        if let Some(p) = drawn.isotropic_p {
            if self.rng.gen::<f64>() >= p {
                outcome = self.rng.gen_range(0..d_phys);
                for &(pos, _) in gates {
                    if self.state(pos) == PairState::Target {
                        self.set_state(pos, PairState::Dephased);
                    }
                }
            }
        }
        self.transcript.push(Measurement {
            pattern,
            positions: gates.iter().map(|&(p, _)| p).collect(),
            d: d_phys,
            outcome,
            ebits: drawn.cost_ebits,
        });
        Ok((outcome, d_phys))
    }

    /// One gate per pair of `segment`.
    pub(crate) fn count(&mut self, segment: &[usize], d: u64) -> Flow<(u64, u64)> {
        let gates: Vec<_> = segment.iter().map(|&p| (p, 1)).collect();
        self.measure(GatePattern::Count, &gates, d)
    }

    /// Pair at relative position i of `segment` drives i gates.
    pub(crate) fn position(&mut self, segment: &[usize], d: u64) -> Flow<(u64, u64)> {
        let gates: Vec<_> = segment
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u64 + 1))
            .collect();
        self.measure(GatePattern::Position, &gates, d)
    }

    /// Raise an inconsistency: abort under a strict policy, otherwise log it
    /// and let the caller fall back.
    pub(crate) fn inconsistent(&mut self, stage: &str, outcome: u64, d: u64) -> Flow<()> {
        self.note(
            AnomalyKind::InconsistentReading,
            format!("{stage}: outcome {outcome} invalid for d={d}"),
        );
        if self.policy() >= AbortPolicy::OnInconsistency {
            Err(Halt::Abort)
        } else {
            Ok(())
        }
    }

    /// Z-measure one pair locally; it is consumed either way.
    pub(crate) fn z_check(&mut self, position: usize, expected: PairState) -> bool {
        let seen = self.state(position).z_outcome();
        let want = expected.z_outcome();
        let accepted = seen == want && want != ZOutcome::Correlated;
        self.local_checks.push(LocalCheck {
            position,
            expected,
            accepted,
        });
        self.discard(position);
        accepted
    }

    pub(crate) fn finish(self, outcome: Flow<Scenario>) -> crate::Result<ProtocolResult> {
        let (scenario, aborted) = match outcome {
            Ok(s) => (s, false),
            Err(Halt::Abort) => (Scenario::Aborted, true),
            Err(Halt::Fail(e)) => return Err(e),
        };
        let n = self.n();
        let mut kept = Vec::new();
        let mut discarded = Vec::new();
        let mut truth_check = Vec::with_capacity(n);
        for pos in 1..=n {
            let now = self.truth[pos - 1];
            let claim = if aborted || self.discarded.contains(&pos) {
                discarded.push(pos);
                Claim::Discarded
            } else {
                kept.push(pos);
                Claim::Kept
            };
            let correct = match claim {
                Claim::Kept => now == PairState::Target,
                Claim::Discarded => aborted || self.initial[pos - 1] != PairState::Target,
            };
            truth_check.push(TruthEntry {
                position: pos,
                claim,
                fidelity: now.fidelity(),
                correct,
            });
        }
        let resources_ebits = self.transcript.iter().map(|m| m.ebits).sum();
        Ok(ProtocolResult {
            n,
            kept,
            discarded,
            corrected: Vec::new(),
            aborted,
            resources_ebits,
            transcript: self.transcript,
            local_checks: self.local_checks,
            truth_check,
            scenario,
            anomalies: self.anomalies,
        })
    }
}
