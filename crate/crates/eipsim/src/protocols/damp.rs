//! Protocols for amplitude-damped ensembles, where only 01 errors occur.

use rand::Rng;

use super::engine::{decode_count, Halt, Session};
use super::{AbortPolicy, ProtocolParams, ProtocolResult, Scenario};
use crate::error::{Error, Result};
use crate::state::{Configuration, PairState};

fn require_damped(c: &Configuration) -> Result<()> {
    if c.states()
        .iter()
        .any(|s| !matches!(s, PairState::Target | PairState::Err01))
    {
        return Err(Error::PreconditionViolated(
            "expected a configuration over Target and Err01 only".into(),
        ));
    }
    Ok(())
}

/// Count all errors with an n+1 level aux, then locate them exactly.
pub fn eip_damp_run<R: Rng + ?Sized>(
    c: &Configuration,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<ProtocolResult> {
    require_damped(c)?;
    let mut s = Session::new(c, params, rng)?;
    let all = s.all_positions();
    let n = all.len();
    let outcome = (|| {
        let (v, d) = s.count(&all, n as u64 + 1)?;
        let k = match decode_count(v, d, 0, n as i64) {
            Some(k) => k as usize,
            None => {
                s.inconsistent("error count", v, d)?;
                ((v % (n as u64 + 1)) as usize).min(n)
            }
        };
        if let Some(k_max) = params.k_max {
            if k > k_max && s.policy() >= AbortPolicy::OnThreshold {
                return Err(Halt::Abort);
            }
        }
        s.locate_errors(&all, k, PairState::Err01)?;
        Ok(match k {
            0 => Scenario::NoErrors,
            1 => Scenario::One,
            2 => Scenario::TwoIdentical,
            _ => Scenario::Many,
        })
    })();
    s.finish(outcome)
}

/// Two 01 errors located by halving: locate one per half, or drop a half
/// that holds both unless it is large enough to recurse into.
pub fn two_alt_run<R: Rng + ?Sized>(
    c: &Configuration,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<ProtocolResult> {
    require_damped(c)?;
    let mut s = Session::new(c, params, rng)?;
    let all = s.all_positions();
    let outcome = s.locate_two_alt(&all).map(|_| Scenario::TwoIdentical);
    s.finish(outcome)
}
