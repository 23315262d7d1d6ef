use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Claim, ProtocolKind, ProtocolParams, ProtocolResult, Scenario};
use crate::error::{Error, Result};
use crate::state::Configuration;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockedResult {
    /// Per-block results in block-local positions.
    pub blocks: Vec<ProtocolResult>,
    /// All blocks merged into global positions.
    pub combined: ProtocolResult,
}

/// Run `inner` independently on consecutive blocks of `block_size` pairs;
/// the last block takes whatever is left.
pub fn blocking_run<R: Rng + ?Sized>(
    c: &Configuration,
    block_size: usize,
    inner: ProtocolKind,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<BlockedResult> {
    if block_size == 0 || block_size > c.len() {
        return Err(Error::InvalidParameter(format!(
            "block size {block_size} outside 1..={}",
            c.len()
        )));
    }
    let mut blocks = Vec::new();
    for (b, chunk) in c.states().chunks(block_size).enumerate() {
        let block = Configuration::new(chunk.to_vec());
        let r = inner.run(&block, params, rng)?;
        debug_assert_eq!(r.n, chunk.len(), "block {b} size");
        blocks.push(r);
    }
    let combined = merge(&blocks, block_size, c.len());
    Ok(BlockedResult { blocks, combined })
}

fn merge(blocks: &[ProtocolResult], block_size: usize, n: usize) -> ProtocolResult {
    if let [only] = blocks {
        return only.clone();
    }
    let mut out = ProtocolResult {
        n,
        kept: Vec::new(),
        discarded: Vec::new(),
        corrected: Vec::new(),
        aborted: blocks.iter().all(|b| b.aborted),
        resources_ebits: 0.0,
        transcript: Vec::new(),
        local_checks: Vec::new(),
        truth_check: Vec::new(),
        scenario: Scenario::Aborted,
        anomalies: Vec::new(),
    };
    let mut scenario: Option<Scenario> = None;
    for (i, b) in blocks.iter().enumerate() {
        let offset = i * block_size;
        let shift = |p: &usize| p + offset;
        out.kept.extend(b.kept.iter().map(shift));
        out.discarded.extend(b.discarded.iter().map(shift));
        out.corrected.extend(b.corrected.iter().map(shift));
        out.resources_ebits += b.resources_ebits;
        out.transcript
            .extend(b.transcript.iter().cloned().map(|mut m| {
                m.positions.iter_mut().for_each(|p| *p += offset);
                m
            }));
        out.local_checks
            .extend(b.local_checks.iter().cloned().map(|mut l| {
                l.position += offset;
                l
            }));
        out.truth_check
            .extend(b.truth_check.iter().cloned().map(|mut t| {
                t.position += offset;
                t
            }));
        out.anomalies.extend(b.anomalies.iter().cloned());
        if !b.aborted {
            scenario = Some(scenario.map_or(b.scenario, |s| s.max(b.scenario)));
        }
    }
    out.scenario = scenario.unwrap_or(Scenario::Aborted);
    debug_assert!(out
        .truth_check
        .iter()
        .all(|t| (t.claim == Claim::Kept) == out.kept.contains(&t.position)));
    out
}
