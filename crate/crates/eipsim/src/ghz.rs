//! Three-party GHZ triples and the tripartite counter gate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::modulo;

/// Pure state of one triple after depolarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GhzPairState {
    /// (|000⟩+|111⟩)/√2.
    Target,
    /// (|000⟩−|111⟩)/√2.
    PhaseErr,
    /// Computational basis state |i j k⟩ with x = 4i+2j+k in 1..=6.
    Sep(u8),
}

impl GhzPairState {
    pub fn sep(x: u8) -> Result<Self> {
        if (1..=6).contains(&x) {
            Ok(Self::Sep(x))
        } else {
            Err(Error::InvalidParameter(format!(
                "separable label {x} outside 1..=6"
            )))
        }
    }

    /// Bits (i, j, k) of a separable state.
    pub fn bits(self) -> Option<(i64, i64, i64)> {
        match self {
            Self::Sep(x) => Some((((x >> 2) & 1) as i64, ((x >> 1) & 1) as i64, (x & 1) as i64)),
            _ => None,
        }
    }

    /// Signed shift of the two aux amplitude indices per gate application.
    pub fn contribution(self) -> (i64, i64) {
        match self.bits() {
            Some((l, m, n)) => (m - l, n - l),
            None => (0, 0),
        }
    }

    pub fn is_target(self) -> bool {
        self == Self::Target
    }

    pub fn fidelity(self) -> f64 {
        if self.is_target() {
            1.0
        } else {
            0.0
        }
    }
}

/// Sum of contributions with weight `weight(position)`, reduced mod d.
fn weighted_indices(c: &[GhzPairState], d: u64, weight: impl Fn(usize) -> i64) -> (u64, u64) {
    let (a, b) = c.iter().enumerate().fold((0i64, 0i64), |(a, b), (i, s)| {
        let (x, y) = s.contribution();
        let w = weight(i + 1);
        (a + w * x, b + w * y)
    });
    (modulo(a, d), modulo(b, d))
}

/// One tripartite counter gate per triple onto a fresh d-level GHZ aux.
pub fn ghz_eng(c: &[GhzPairState], d: u64) -> (u64, u64) {
    assert!(d >= 2, "aux dimension must be at least 2");
    weighted_indices(c, d, |_| 1)
}

/// Position-weighted variant: triple i drives i gate applications.
pub fn ghz_epg(c: &[GhzPairState], d: u64) -> (u64, u64) {
    assert!(d >= 2, "aux dimension must be at least 2");
    weighted_indices(c, d, |i| i as i64)
}

/// XOR of phase bits; only defined on triples with zero amplitude indices.
pub fn ghz_phase_parity(c: &[GhzPairState]) -> Result<u8> {
    c.iter().try_fold(0u8, |acc, s| match s {
        GhzPairState::Target => Ok(acc),
        GhzPairState::PhaseErr => Ok(acc ^ 1),
        GhzPairState::Sep(x) => Err(Error::PreconditionViolated(format!(
            "phase parity undefined on separable triple Sep({x})"
        ))),
    })
}

/// n i.i.d. triples: Target with weight F, PhaseErr with `phase_weight`,
/// the rest spread evenly over the six separable states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhzEnsemble {
    pub n: usize,
    pub fidelity: f64,
    pub phase_weight: f64,
}

impl GhzEnsemble {
    pub fn new(n: usize, fidelity: f64, phase_weight: f64) -> Result<Self> {
        let ok = |x: f64| (0.0..=1.0).contains(&x);
        if n == 0 || !ok(fidelity) || !ok(phase_weight) || fidelity + phase_weight > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "GHZ ensemble n={n} F={fidelity} phase={phase_weight}"
            )));
        }
        Ok(Self {
            n,
            fidelity,
            phase_weight,
        })
    }

    pub fn separable_weight(&self) -> f64 {
        (1.0 - self.fidelity - self.phase_weight).max(0.0)
    }
}

pub fn sample_ghz_configuration<R: Rng + ?Sized>(e: &GhzEnsemble, rng: &mut R) -> Vec<GhzPairState> {
    (0..e.n)
        .map(|_| {
            let u: f64 = rng.gen();
            if u < e.fidelity {
                GhzPairState::Target
            } else if u < e.fidelity + e.phase_weight || e.separable_weight() == 0.0 {
                GhzPairState::PhaseErr
            } else {
                GhzPairState::Sep(rng.gen_range(1..=6))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use GhzPairState::*;

    #[test]
    fn eng_examples() {
        assert_eq!(ghz_eng(&[Target; 5], 3), (0, 0));
        assert_eq!(ghz_eng(&[Target, Sep(1), Target], 3), (0, 1));
        assert_eq!(ghz_eng(&[PhaseErr, Target], 3), (0, 0));
    }

    #[test]
    fn separable_shifts_mod_three() {
        let expected = [(0, 1), (1, 0), (1, 1), (2, 2), (2, 0), (0, 2)];
        for (x, want) in (1..=6).zip(expected) {
            assert_eq!(ghz_eng(&[Sep(x)], 3), want, "Sep({x})");
        }
    }

    #[test]
    fn shifts_are_distinct_and_nonzero() {
        let all: Vec<_> = (1..=6).map(|x| ghz_eng(&[Sep(x)], 3)).collect();
        for (i, a) in all.iter().enumerate() {
            assert_ne!(*a, (0, 0));
            for b in &all[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }

    #[test]
    fn epg_weights_positions() {
        let mut c = vec![Target; 8];
        c[3] = Sep(1);
        assert_eq!(ghz_epg(&c, 8), (0, 4));
        c[3] = Sep(4);
        assert_eq!(ghz_epg(&c, 8), (4, 4));
    }

    #[test]
    fn parity() {
        assert_eq!(ghz_phase_parity(&[Target, Target]).unwrap(), 0);
        assert_eq!(ghz_phase_parity(&[PhaseErr]).unwrap(), 1);
        assert_eq!(ghz_phase_parity(&[PhaseErr, PhaseErr, Target]).unwrap(), 0);
        assert!(ghz_phase_parity(&[Sep(2)]).is_err());
        assert!(GhzPairState::sep(7).is_err());
    }
}
