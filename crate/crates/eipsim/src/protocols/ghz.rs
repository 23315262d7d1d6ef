//! Purification of GHZ triples: separable errors first, then phase errors
//! by parity search.

use rand::Rng;

use super::engine::{decode_count, Session};
use super::{
    Anomaly, AnomalyKind, Claim, GatePattern, Measurement, ProtocolParams, ProtocolResult,
    Scenario, TruthEntry,
};
use crate::error::Result;
use crate::ghz::{ghz_eng, ghz_epg, GhzPairState};
use crate::noise::gate_survival;
use crate::state::{Configuration, PairState};

/// Projection of one amplitude component onto a bipartite pair state.
fn project(s: GhzPairState, component: usize) -> PairState {
    let (a, b) = s.contribution();
    match if component == 0 { a } else { b } {
        1 => PairState::Err01,
        -1 => PairState::Err10,
        _ => PairState::Target,
    }
}

/// Separable label whose single-copy shift is (u, v) mod d.
fn separable_from_shift(u: u64, v: u64, d: u64) -> Option<u8> {
    (1..=6u8).find(|&x| ghz_eng(&[GhzPairState::Sep(x)], d) == (u, v))
}

struct GhzRun<'a, R: Rng + ?Sized> {
    truth: Vec<GhzPairState>,
    initial: Vec<GhzPairState>,
    params: ProtocolParams,
    rng: &'a mut R,
    transcript: Vec<Measurement>,
    anomalies: Vec<Anomaly>,
    discarded: Vec<bool>,
    corrected: Vec<usize>,
}

impl<R: Rng + ?Sized> GhzRun<'_, R> {
    fn survivors(&self) -> Vec<usize> {
        (1..=self.truth.len())
            .filter(|&p| !self.discarded[p - 1])
            .collect()
    }

    fn note(&mut self, kind: AnomalyKind, detail: String) {
        self.anomalies.push(Anomaly { kind, detail });
    }

    /// Read both amplitude indices of a fresh d-level GHZ aux after
    /// `indices` were accumulated by `applications` gates.
    fn readout(&mut self, indices: (u64, u64), d: u64, applications: u64) -> (u64, u64) {
        let drawn = self.params.pool().draw(d).expect("pool validated");
        let d = drawn.aux.d();
        let faithful = self.rng.gen::<f64>()
            < gate_survival(self.params.noisy_gate_q, applications)
            && self.rng.gen::<f64>() < drawn.aux.fidelity_p()
            && drawn
                .isotropic_p
                .is_none_or(|p| self.rng.gen::<f64>() < p);
        if faithful {
            (indices.0 % d, indices.1 % d)
        } else {
            (self.rng.gen_range(0..d), self.rng.gen_range(0..d))
        }
    }

    fn record(&mut self, pattern: GatePattern, positions: &[usize], d: u64, outcome: u64) {
        let d = self.params.pool().physical_dim(d);
        self.transcript.push(Measurement {
            pattern,
            positions: positions.to_vec(),
            d,
            outcome,
            ebits: (d as f64).log2(),
        });
    }

    fn separable_round_single(&mut self) {
        let all = self.survivors();
        let states: Vec<_> = all.iter().map(|&p| self.truth[p - 1]).collect();
        let d = self.params.pool().physical_dim(3);
        let (u, v) = self.readout(ghz_eng(&states, d), 3, all.len() as u64);
        self.record(GatePattern::GhzCount, &all, 3, u * d + v);
        if (u, v) == (0, 0) {
            return;
        }
        let Some(x) = separable_from_shift(u, v, d) else {
            self.note(
                AnomalyKind::InconsistentReading,
                format!("no separable state shifts by ({u},{v})"),
            );
            return;
        };
        let n = all.len();
        if n == 1 {
            self.discarded[all[0] - 1] = true;
            return;
        }
        let (su, sv) = GhzPairState::Sep(x).contribution();
        let dn = self.params.pool().physical_dim(n as u64);
        let gates: u64 = (1..=n as u64).sum();
        let (a, b) = self.readout(ghz_epg(&states, dn), n as u64, gates);
        self.record(GatePattern::GhzPosition, &all, n as u64, a * dn + b);
        let (sign, idx) = if su != 0 { (su, a) } else { (sv, b) };
        let signed = (sign * idx as i64).rem_euclid(dn as i64) as u64;
        let rel = match decode_count(signed, dn, 1, n as i64) {
            Some(r) => r as usize,
            None => {
                self.note(
                    AnomalyKind::InconsistentReading,
                    format!("position index {signed} outside 1..={n}"),
                );
                (signed as usize + n - 1) % n + 1
            }
        };
        let expected = |s: i64| (s * rel as i64).rem_euclid(dn as i64) as u64;
        if expected(su) != a || expected(sv) != b {
            self.note(
                AnomalyKind::InconsistentReading,
                format!("position indices ({a},{b}) disagree"),
            );
        }
        self.discarded[all[rel - 1] - 1] = true;
    }

    /// Run the bipartite EIP(λ) on one amplitude component of the survivors.
    fn separable_round_component(&mut self, component: usize) -> Result<bool> {
        let all = self.survivors();
        let proj = Configuration::new(
            all.iter()
                .map(|&p| project(self.truth[p - 1], component))
                .collect(),
        );
        let mut s = Session::new(&proj, &self.params, self.rng)?;
        let segment = s.all_positions();
        let outcome = s.eip_lambda_segment(&segment, self.params.lambda);
        let r = s.finish(outcome)?;
        for m in r.transcript {
            let positions = m.positions.iter().map(|&p| all[p - 1]).collect();
            self.transcript.push(Measurement { positions, ..m });
        }
        self.anomalies.extend(
            r.anomalies
                .into_iter()
                .filter(|a| a.kind != AnomalyKind::AssumptionViolated),
        );
        if r.aborted {
            return Ok(false);
        }
        for p in r.discarded {
            self.discarded[all[p - 1] - 1] = true;
        }
        Ok(true)
    }

    fn parity(&mut self, subset: &[usize]) -> u8 {
        let mut bit = 0u8;
        let mut saw_separable = false;
        for &p in subset {
            match self.truth[p - 1] {
                GhzPairState::Target => {}
                GhzPairState::PhaseErr => bit ^= 1,
                GhzPairState::Sep(x) => {
                    saw_separable = true;
                    if self.rng.gen::<bool>() {
                        self.truth[p - 1] = GhzPairState::Sep(7 - x);
                    }
                }
            }
        }
        if saw_separable {
            self.note(
                AnomalyKind::SeparableInParity,
                format!("separable triple in parity set {subset:?}"),
            );
            bit = self.rng.gen_range(0..2);
        }
        let drawn = self.params.pool().draw(2).expect("pool validated");
        let survive = drawn.aux.fidelity_p()
            * drawn.isotropic_p.unwrap_or(1.0)
            * gate_survival(self.params.noisy_gate_q, subset.len() as u64);
        if self.rng.gen::<f64>() >= survive {
            bit = self.rng.gen_range(0..2);
        }
        self.record(GatePattern::GhzParity, subset, 2, bit as u64);
        bit
    }

    fn search(&mut self, subset: &[usize]) {
        if subset.len() == 1 {
            let p = subset[0];
            self.truth[p - 1] = match self.truth[p - 1] {
                GhzPairState::PhaseErr => GhzPairState::Target,
                GhzPairState::Target => GhzPairState::PhaseErr,
                other => other,
            };
            self.corrected.push(p);
            return;
        }
        let (first, second) = subset.split_at(subset.len().div_ceil(2));
        if self.parity(first) == 1 {
            self.search(first);
        } else {
            self.search(second);
        }
    }

    fn phase_round(&mut self) {
        let survivors = self.survivors();
        for block in survivors.chunks(self.params.ghz_split_size) {
            if self.parity(block) == 1 {
                self.search(block);
            }
        }
    }

    fn finish(self, aborted: bool) -> ProtocolResult {
        let n = self.truth.len();
        let mut kept = Vec::new();
        let mut discarded = Vec::new();
        let mut truth_check = Vec::with_capacity(n);
        for pos in 1..=n {
            let now = self.truth[pos - 1];
            let claim = if aborted || self.discarded[pos - 1] {
                discarded.push(pos);
                Claim::Discarded
            } else {
                kept.push(pos);
                Claim::Kept
            };
            let correct = match claim {
                Claim::Kept => now.is_target(),
                Claim::Discarded => aborted || !self.initial[pos - 1].is_target(),
            };
            truth_check.push(TruthEntry {
                position: pos,
                claim,
                fidelity: now.fidelity(),
                correct,
            });
        }
        let actions = discarded.len() + self.corrected.len();
        let scenario = match (aborted, actions) {
            (true, _) => Scenario::Aborted,
            (false, 0) => Scenario::NoErrors,
            (false, 1) => Scenario::One,
            (false, _) => Scenario::Many,
        };
        let mut corrected = self.corrected;
        corrected.sort_unstable();
        ProtocolResult {
            n,
            kept: if aborted { Vec::new() } else { kept },
            discarded,
            corrected: if aborted { Vec::new() } else { corrected },
            aborted,
            resources_ebits: self.transcript.iter().map(|m| m.ebits).sum(),
            transcript: self.transcript,
            local_checks: Vec::new(),
            truth_check,
            scenario,
            anomalies: self.anomalies,
        }
    }
}

/// Locate separable errors assuming at most λ of them, then find and
/// correct phase errors block by block (`params.ghz_split_size`).
pub fn ghz_purify<R: Rng + ?Sized>(
    c: &[GhzPairState],
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<ProtocolResult> {
    params.validate()?;
    let mut run = GhzRun {
        truth: c.to_vec(),
        initial: c.to_vec(),
        params: *params,
        rng,
        transcript: Vec::new(),
        anomalies: Vec::new(),
        discarded: vec![false; c.len()],
        corrected: Vec::new(),
    };
    let separable = c
        .iter()
        .filter(|s| matches!(s, GhzPairState::Sep(_)))
        .count();
    if separable > params.lambda {
        run.note(
            AnomalyKind::AssumptionViolated,
            format!(
                "{separable} separable triples, assumed at most {}",
                params.lambda
            ),
        );
    }
    let mut ok = true;
    match params.lambda {
        0 => {}
        1 => run.separable_round_single(),
        _ => ok = run.separable_round_component(0)? && run.separable_round_component(1)?,
    }
    if ok {
        let left = run
            .survivors()
            .iter()
            .filter(|&&p| matches!(run.truth[p - 1], GhzPairState::Sep(_)))
            .count();
        if left > 0 {
            run.note(
                AnomalyKind::MislocatedSeparable,
                format!("{left} separable triples survived"),
            );
        }
        run.phase_round();
    }
    Ok(run.finish(!ok))
}
