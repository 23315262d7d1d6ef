//! Protocols for ensembles holding both flip-error kinds.

use rand::Rng;

use super::engine::{decode_count, Flow, Halt, Session};
use super::{AbortPolicy, AnomalyKind, ProtocolParams, ProtocolResult, Scenario};
use crate::error::{Error, Result};
use crate::state::{Configuration, PairState};

fn require_no_phase(c: &Configuration) -> Result<()> {
    if c.count(PairState::PhaseErr) > 0 || c.count(PairState::Dephased) > 0 {
        return Err(Error::PreconditionViolated(
            "expected a configuration over Target, Err01 and Err10 only".into(),
        ));
    }
    Ok(())
}

fn flag_assumption<R: Rng + ?Sized>(s: &mut Session<'_, R>, segment: &[usize], lambda: usize) {
    let k = segment
        .iter()
        .filter(|&&p| matches!(s.state(p), PairState::Err01 | PairState::Err10))
        .count();
    if k > lambda {
        s.note(
            AnomalyKind::AssumptionViolated,
            format!("{k} flip errors, assumed at most {lambda}"),
        );
    }
}

fn kind_of(diff: i64) -> PairState {
    if diff > 0 {
        PairState::Err01
    } else {
        PairState::Err10
    }
}

impl<R: Rng + ?Sized> Session<'_, R> {
    /// Read the difference #01 − #10 over `segment` with a 2λ+1 level aux.
    fn read_difference(&mut self, segment: &[usize], lambda: usize) -> Flow<i64> {
        let (v, d) = self.count(segment, 2 * lambda as u64 + 1)?;
        let l = lambda as i64;
        Ok(match decode_count(v, d, -l, l) {
            Some(x) => x,
            None => {
                self.inconsistent("difference count", v, d)?;
                let m = 2 * l + 1;
                let r = (v as i64).rem_euclid(m);
                if r > l {
                    r - m
                } else {
                    r
                }
            }
        })
    }

    pub(crate) fn eip_lambda_segment(
        &mut self,
        segment: &[usize],
        lambda: usize,
    ) -> Flow<Scenario> {
        flag_assumption(self, segment, lambda);
        if lambda == 0 || segment.is_empty() {
            return Ok(Scenario::NoErrors);
        }
        if lambda > 2 {
            let located = self.locate_general_lambda(segment, lambda)?;
            return Ok(match located {
                0 => Scenario::NoErrors,
                1 => Scenario::One,
                _ => Scenario::Many,
            });
        }
        let diff = self.read_difference(segment, lambda)?;
        match diff.abs() {
            1 => {
                self.locate_one(segment, kind_of(diff))?;
                Ok(Scenario::One)
            }
            2 => {
                self.locate_two_identical(segment, kind_of(diff))?;
                Ok(Scenario::TwoIdentical)
            }
            _ if lambda == 1 => Ok(Scenario::NoErrors),
            _ => match self.locate_two_different(segment)? {
                Some(_) => Ok(Scenario::TwoDifferent),
                None => Ok(Scenario::NoErrors),
            },
        }
    }

    fn aeip3_segment(&mut self, segment: &[usize]) -> Flow<Scenario> {
        flag_assumption(self, segment, 3);
        let strict = self.policy() >= AbortPolicy::OnAnyError;
        let diff = self.read_difference(segment, 3)?;
        if strict && diff != 0 {
            return Err(Halt::Abort);
        }
        match diff.abs() {
            3 => Err(Halt::Abort),
            1 => {
                let kind = kind_of(diff);
                let pos = self.locate_one(segment, kind)?;
                if self.z_check(pos, kind) {
                    Ok(Scenario::One)
                } else {
                    Err(Halt::Abort)
                }
            }
            2 => {
                self.locate_two_identical(segment, kind_of(diff))?;
                Ok(Scenario::TwoIdentical)
            }
            _ => match self.locate_two_different(segment)? {
                Some(_) if strict => Err(Halt::Abort),
                Some(_) => Ok(Scenario::TwoDifferent),
                None => Ok(Scenario::NoErrors),
            },
        }
    }
}

/// EIP(λ) on a rank-3 configuration; never aborts on its own.
pub fn eip_lambda_run<R: Rng + ?Sized>(
    c: &Configuration,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<ProtocolResult> {
    require_no_phase(c)?;
    let mut s = Session::new(c, params, rng)?;
    let all = s.all_positions();
    let outcome = s.eip_lambda_segment(&all, params.lambda);
    s.finish(outcome)
}

/// aEIP(3): aborts on three identical errors or a failed Z check. Under
/// [`AbortPolicy::OnAnyError`] it keeps the ensemble only when nothing is found.
pub fn aeip3_run<R: Rng + ?Sized>(
    c: &Configuration,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<ProtocolResult> {
    require_no_phase(c)?;
    let mut s = Session::new(c, params, rng)?;
    let all = s.all_positions();
    let outcome = s.aeip3_segment(&all);
    s.finish(outcome)
}

/// Sample the basis change that moves phase errors into the flip subspace.
pub fn phase_to_flip_sample<R: Rng + ?Sized>(s: PairState, rng: &mut R) -> PairState {
    let u: f64 = rng.gen();
    match s {
        PairState::Target => PairState::Target,
        PairState::PhaseErr => {
            if u < 0.5 {
                PairState::Err01
            } else {
                PairState::Err10
            }
        }
        PairState::Err01 | PairState::Err10 => {
            if u < 0.5 {
                PairState::PhaseErr
            } else if u < 0.75 {
                PairState::Err01
            } else {
                PairState::Err10
            }
        }
        // an equal mixture of Target and PhaseErr
        PairState::Dephased => {
            if u < 0.5 {
                PairState::Target
            } else if u < 0.75 {
                PairState::Err01
            } else {
                PairState::Err10
            }
        }
    }
}

/// Two EIP(λ) rounds with the phase-to-flip basis change in between.
pub fn full_rank_run<R: Rng + ?Sized>(
    c: &Configuration,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<ProtocolResult> {
    let mut s = Session::new(c, params, rng)?;
    let all = s.all_positions();
    let outcome = (|| {
        s.eip_lambda_segment(&all, params.lambda)?;
        let survivors = s.survivors();
        for &p in &survivors {
            let next = phase_to_flip_sample(s.state(p), s.rng);
            s.set_state(p, next);
        }
        s.eip_lambda_segment(&survivors, params.lambda)
    })();
    s.finish(outcome)
}
