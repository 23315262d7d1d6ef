//! Error-location subroutines shared by all protocols. Segments are ordered
//! lists of global positions; relative position i means `segment[i - 1]`.

use rand::seq::SliceRandom;
use rand::Rng;

use super::engine::{decode_count, Flow, Session};
use super::GatePattern;
use crate::state::{modulo, residue_preimages, PairState};

/// Relative position (1-based) of a single `kind` error from a position
/// readout over a segment of `len`, or `None` if the reading is impossible.
pub fn decode_position(outcome: u64, d: u64, len: usize, kind: PairState) -> Option<usize> {
    let signed = match kind {
        PairState::Err10 => (d - outcome % d) % d,
        _ => outcome,
    };
    decode_count(signed, d, 1, len as i64).map(|p| p as usize)
}

/// Lower positions r of all pairs r < s with r + s = sum inside 1..=len.
pub fn sum_candidates(sum: usize, len: usize) -> Vec<usize> {
    let lo = sum.saturating_sub(len).max(1);
    let hi = (sum - 1) / 2;
    (lo..=hi).collect()
}

/// New label order after moving odd labels ahead of even ones.
fn interleave(order: &[usize]) -> Vec<usize> {
    order
        .iter()
        .step_by(2)
        .chain(order.iter().skip(1).step_by(2))
        .copied()
        .collect()
}

/// Feasible values of a part's difference given the parent's difference,
/// the part and remainder sizes, and the error budget.
pub fn difference_window(total: i64, part: usize, rest: usize, budget: usize) -> (i64, i64) {
    let (part, rest, budget) = (part as i64, rest as i64, budget as i64);
    let feasible = |x: i64| (total - x).abs() <= rest && x.abs() + (total - x).abs() <= budget;
    let lo = (-part..=part).find(|&x| feasible(x));
    let hi = (-part..=part).rev().find(|&x| feasible(x));
    match (lo, hi) {
        (Some(lo), Some(hi)) => (lo, hi),
        // no feasible split; the parent claim was already wrong
        _ => (total.clamp(-part, part), total.clamp(-part, part)),
    }
}

/// Chance a random split of `size` into a floor(size/2) part and the rest
/// separates a given pair.
pub fn separation_probability(size: usize) -> f64 {
    if size < 2 {
        return 0.0;
    }
    let h = (size / 2) as f64;
    let s = size as f64;
    2.0 * h * (s - h) / (s * (s - 1.0))
}

pub(crate) const PROBE_MISS_TARGET: f64 = 1.0 / 1024.0;

/// A segment whose error difference is known.
#[derive(Debug, Clone)]
struct Piece {
    positions: Vec<usize>,
    diff: i64,
}

impl<R: Rng + ?Sized> Session<'_, R> {
    pub(crate) fn locate_one(&mut self, segment: &[usize], kind: PairState) -> Flow<usize> {
        let len = segment.len();
        if len == 1 {
            self.discard(segment[0]);
            return Ok(segment[0]);
        }
        let (v, d) = self.position(segment, len as u64)?;
        let rel = match decode_position(v, d, len, kind) {
            Some(r) => r,
            None => {
                self.inconsistent("locate one", v, d)?;
                let signed = if kind == PairState::Err10 {
                    modulo(-(v as i64), d)
                } else {
                    v
                };
                (signed as i64 - 1).rem_euclid(len as i64) as usize + 1
            }
        };
        let pos = segment[rel - 1];
        self.discard(pos);
        Ok(pos)
    }

    pub(crate) fn locate_two_identical(
        &mut self,
        segment: &[usize],
        kind: PairState,
    ) -> Flow<(usize, usize)> {
        let len = segment.len();
        if len <= 2 {
            segment.iter().for_each(|&p| self.discard(p));
            return Ok((segment[0], *segment.last().unwrap()));
        }
        let modulus = 2 * len as u64 - 3;
        let (v, d) = self.position(segment, modulus)?;
        let signed = if kind == PairState::Err10 {
            modulo(-(v as i64), d)
        } else {
            v
        };
        let sum = match decode_count(signed, d, 3, 2 * len as i64 - 1) {
            Some(s) => s as usize,
            None => {
                self.inconsistent("locate two identical", v, d)?;
                3 + (signed % modulus) as usize
            }
        };
        let lows = sum_candidates(sum, len);
        let sub: Vec<usize> = lows.iter().map(|&r| segment[r - 1]).collect();
        let first = self.locate_one(&sub, kind)?;
        let r = lows[sub.iter().position(|&p| p == first).unwrap()];
        let second = segment[sum - r - 1];
        self.discard(second);
        Ok((first, second))
    }

    /// Zero or one 01 plus one 10. Returns (pos01, pos10) when found.
    pub(crate) fn locate_two_different(
        &mut self,
        segment: &[usize],
    ) -> Flow<Option<(usize, usize)>> {
        let len = segment.len();
        if len < 2 {
            return Ok(None);
        }
        let span = len as i64 - 1;
        let (v, d) = self.position(segment, 2 * len as u64 - 1)?;
        let diff = match decode_count(v, d, -span, span) {
            Some(x) => x,
            None => {
                self.inconsistent("locate two different", v, d)?;
                return Ok(None);
            }
        };
        if diff == 0 {
            return Ok(None);
        }
        let dist = diff.unsigned_abs() as usize;
        // diff > 0: the 01 sits dist places above the 10
        let lower_kind = if diff > 0 {
            PairState::Err10
        } else {
            PairState::Err01
        };
        if dist >= len.div_ceil(2) {
            let lower = self.locate_one(&segment[..len - dist], lower_kind)?;
            let rel = segment.iter().position(|&p| p == lower).unwrap() + 1;
            let upper = segment[rel + dist - 1];
            self.discard(upper);
            return Ok(Some(if diff > 0 {
                (upper, lower)
            } else {
                (lower, upper)
            }));
        }

        let mut order: Vec<usize> = (1..=len).collect();
        let mut dist = dist;
        while dist.is_multiple_of(2) {
            order = interleave(&order);
            dist /= 2;
        }
        let signed_diff = if diff > 0 {
            dist as i64
        } else {
            -(dist as i64)
        };
        let gates: Vec<(usize, u64)> = (2..=len)
            .step_by(2)
            .map(|label| (segment[order[label - 1] - 1], (label / 2) as u64))
            .collect();
        let (w, d) = self.measure(GatePattern::ParityPosition, &gates, len as u64)?;
        let half = (len / 2) as i64;
        let mut cands: Vec<i64> = residue_preimages(w, d, -half, half)
            .into_iter()
            .filter(|&x| x != 0)
            .collect();
        if cands.len() == 2 {
            // only for even len: ±len/2 collide, the top label's kind follows the sign
            cands = vec![if diff > 0 { half } else { -half }];
        }
        let Some(&s) = cands.first() else {
            self.inconsistent("parity subensemble", w, d)?;
            return Ok(None);
        };
        let found_label = 2 * s.unsigned_abs() as usize;
        let found = segment[order[found_label - 1] - 1];
        self.discard(found);
        let partner_label = if s > 0 {
            found_label as i64 - signed_diff
        } else {
            found_label as i64 + signed_diff
        };
        if partner_label < 1 || partner_label > len as i64 {
            self.inconsistent("partner out of range", w, d)?;
            return Ok(None);
        }
        let partner = segment[order[partner_label as usize - 1] - 1];
        self.discard(partner);
        Ok(Some(if s > 0 {
            (found, partner)
        } else {
            (partner, found)
        }))
    }

    /// Locate exactly `k` errors of one kind inside `segment`.
    pub(crate) fn locate_errors(
        &mut self,
        segment: &[usize],
        k: usize,
        kind: PairState,
    ) -> Flow<()> {
        let len = segment.len();
        match k {
            0 => {}
            _ if k >= len => segment.iter().for_each(|&p| self.discard(p)),
            1 => {
                self.locate_one(segment, kind)?;
            }
            2 => {
                self.locate_two_identical(segment, kind)?;
            }
            _ => self.locate_general_k(segment, k, kind)?,
        }
        Ok(())
    }

    pub(crate) fn locate_general_k(
        &mut self,
        segment: &[usize],
        k: usize,
        kind: PairState,
    ) -> Flow<()> {
        let blocks = split_blocks(segment, self.params.fan_out);
        let last = blocks.len() - 1;
        let mut remaining = k;
        let mut counts = Vec::with_capacity(blocks.len());
        for block in &blocks[..last] {
            let cap = remaining.min(block.len());
            if cap == 0 {
                counts.push(0);
                continue;
            }
            let (v, d) = self.count(block, cap as u64 + 1)?;
            let signed = if kind == PairState::Err10 {
                modulo(-(v as i64), d)
            } else {
                v
            };
            let ki = match decode_count(signed, d, 0, cap as i64) {
                Some(x) => x as usize,
                None => {
                    self.inconsistent("block count", v, d)?;
                    (signed % (cap as u64 + 1)) as usize
                }
            };
            remaining -= ki;
            counts.push(ki);
        }
        if remaining > blocks[last].len() {
            self.inconsistent(
                "inferred block count",
                remaining as u64,
                blocks[last].len() as u64,
            )?;
        }
        counts.push(remaining.min(blocks[last].len()));
        for (block, ki) in blocks.iter().zip(counts) {
            self.locate_errors(block, ki, kind)?;
        }
        Ok(())
    }

    /// Two 01 errors: count halves, then locate or discard.
    pub(crate) fn locate_two_alt(&mut self, segment: &[usize]) -> Flow<()> {
        let len = segment.len();
        if len <= 2 {
            segment.iter().for_each(|&p| self.discard(p));
            return Ok(());
        }
        let (first, second) = segment.split_at(len.div_ceil(2));
        let (v, d) = self.count(first, 3)?;
        let c1 = match decode_count(v, d, 0, 2) {
            Some(x) => x as usize,
            None => {
                self.inconsistent("half count", v, d)?;
                (v % 3) as usize
            }
        };
        match c1 {
            1 => {
                self.locate_one(first, PairState::Err01)?;
                self.locate_one(second, PairState::Err01)?;
            }
            _ => {
                let both = if c1 == 2 { first } else { second };
                if both.len() >= 8 {
                    self.locate_two_alt(both)?;
                } else {
                    both.iter().for_each(|&p| self.discard(p));
                }
            }
        }
        Ok(())
    }

    /// Locate every error of a segment assumed to hold at most `lambda`.
    /// Returns the number of errors located.
    pub(crate) fn locate_general_lambda(
        &mut self,
        segment: &[usize],
        lambda: usize,
    ) -> Flow<usize> {
        let (v, d) = self.count(segment, 2 * lambda as u64 + 1)?;
        let diff = match decode_count(v, d, -(lambda as i64), lambda as i64) {
            Some(x) => x,
            None => {
                self.inconsistent("difference count", v, d)?;
                let m = 2 * lambda as i64 + 1;
                let r = (v as i64).rem_euclid(m);
                if r > lambda as i64 {
                    r - m
                } else {
                    r
                }
            }
        };
        let mut open = vec![Piece {
            positions: segment.to_vec(),
            diff,
        }];
        let mut settled: Vec<Piece> = Vec::new();
        while let Some(piece) = open.pop() {
            let budget = budget_for(lambda, &piece, &open, &settled);
            if piece.diff.unsigned_abs() >= 2 && piece.positions.len() >= 2 {
                let parts = self.split_difference(&piece, budget)?;
                open.extend(parts);
                continue;
            }
            let hidden_possible = budget >= piece.diff.unsigned_abs() as usize + 2
                && piece.positions.len() >= piece.diff.unsigned_abs() as usize + 2;
            if !hidden_possible {
                settled.push(piece);
                continue;
            }
            match self.probe(&piece, budget)? {
                Some(parts) => open.extend(parts),
                None => settled.push(piece),
            }
        }
        let mut located = 0;
        for piece in settled {
            match piece.diff {
                0 => {}
                1 => {
                    self.locate_one(&piece.positions, PairState::Err01)?;
                    located += 1;
                }
                -1 => {
                    self.locate_one(&piece.positions, PairState::Err10)?;
                    located += 1;
                }
                _ => {
                    // a single pair with |diff| > 1 cannot be split further
                    piece.positions.iter().for_each(|&p| self.discard(p));
                    located += piece.positions.len();
                }
            }
        }
        Ok(located)
    }

    /// Split a piece into `split_fan_out` consecutive parts and measure the
    /// difference of each but the last.
    fn split_difference(&mut self, piece: &Piece, budget: usize) -> Flow<Vec<Piece>> {
        let parts = split_blocks(&piece.positions, self.params.split_fan_out);
        self.measure_parts(parts, piece.diff, budget)
    }

    fn measure_parts(
        &mut self,
        parts: Vec<Vec<usize>>,
        diff: i64,
        budget: usize,
    ) -> Flow<Vec<Piece>> {
        let mut remaining_len: usize = parts.iter().map(Vec::len).sum();
        let mut remaining_diff = diff;
        let mut remaining_budget = budget;
        let last = parts.len() - 1;
        let mut out = Vec::with_capacity(parts.len());
        for (i, part) in parts.into_iter().enumerate() {
            remaining_len -= part.len();
            let part_diff = if i == last {
                remaining_diff
            } else {
                let (lo, hi) =
                    difference_window(remaining_diff, part.len(), remaining_len, remaining_budget);
                if lo == hi {
                    lo
                } else {
                    let width = (hi - lo + 1) as u64;
                    let (v, d) = self.count(&part, width)?;
                    match decode_count(v, d, lo, hi) {
                        Some(x) => x,
                        None => {
                            self.inconsistent("part difference", v, d)?;
                            lo + (v % width) as i64
                        }
                    }
                }
            };
            remaining_diff -= part_diff;
            remaining_budget = remaining_budget.saturating_sub(part_diff.unsigned_abs() as usize);
            out.push(Piece {
                positions: part,
                diff: part_diff,
            });
        }
        Ok(out)
    }

    /// Random halvings of a piece until a hidden pair would have shown up
    /// with probability at least 1 − 2^−10. Returns the split if one did.
    fn probe(&mut self, piece: &Piece, budget: usize) -> Flow<Option<Vec<Piece>>> {
        let size = piece.positions.len();
        let q = separation_probability(size);
        let mut miss = 1.0;
        while miss >= PROBE_MISS_TARGET {
            let mut shuffled = piece.positions.clone();
            shuffled.shuffle(self.rng);
            let rest = shuffled.split_off(size / 2);
            let parts = self.measure_parts(vec![shuffled, rest], piece.diff, budget)?;
            let seen: u64 = parts.iter().map(|p| p.diff.unsigned_abs()).sum();
            if seen > piece.diff.unsigned_abs() {
                return Ok(Some(parts));
            }
            miss *= 1.0 - q;
        }
        Ok(None)
    }
}

/// Errors a piece can still hold given the minimum already implied elsewhere.
fn budget_for(lambda: usize, piece: &Piece, open: &[Piece], settled: &[Piece]) -> usize {
    let elsewhere: u64 = open
        .iter()
        .chain(settled)
        .map(|p| p.diff.unsigned_abs())
        .sum();
    lambda
        .saturating_sub(elsewhere as usize)
        .max(piece.diff.unsigned_abs() as usize)
}

/// `parts` consecutive blocks (capped at the segment length); the last
/// absorbs the remainder.
pub fn split_blocks(segment: &[usize], parts: usize) -> Vec<Vec<usize>> {
    let parts = parts.min(segment.len()).max(1);
    let base = segment.len() / parts;
    let mut out: Vec<Vec<usize>> = segment[..base * (parts - 1)]
        .chunks(base)
        .map(<[usize]>::to_vec)
        .collect();
    out.push(segment[base * (parts - 1)..].to_vec());
    out
}
