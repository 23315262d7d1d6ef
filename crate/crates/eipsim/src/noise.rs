//! Imperfect auxiliary states and noisy counter gates.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{AuxQudit, PairState};

/// Where auxiliary qudit pairs come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum AuxSource {
    Ideal,
    /// Amplitude-noise weight p: readout is faithful with probability p.
    AmplitudeNoisy(f64),
    /// Built from k copies of a rank-2 pair of fidelity F; d is always 2^k.
    EmbeddedRank2(f64),
    /// p|Ψ00⟩⟨Ψ00| + (1−p) 1/d².
    Isotropic(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxPoolSpec {
    pub source: AuxSource,
    /// Round every requested dimension up to a power of two.
    pub power_of_two_only: bool,
}

impl Default for AuxPoolSpec {
    fn default() -> Self {
        Self::ideal()
    }
}

/// An aux as drawn from a pool, before any gate touches it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawnAux {
    pub aux: AuxQudit,
    /// Isotropic weight; `None` for sources whose noise is amplitude-only.
    pub isotropic_p: Option<f64>,
    /// Raw ebits spent to produce this aux.
    pub cost_ebits: f64,
}

impl AuxPoolSpec {
    pub fn ideal() -> Self {
        Self {
            source: AuxSource::Ideal,
            power_of_two_only: false,
        }
    }

    pub fn new(source: AuxSource, power_of_two_only: bool) -> Result<Self> {
        let p = match source {
            AuxSource::Ideal => 1.0,
            AuxSource::AmplitudeNoisy(p)
            | AuxSource::EmbeddedRank2(p)
            | AuxSource::Isotropic(p) => p,
        };
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "aux noise parameter {p} outside [0,1]"
            )));
        }
        Ok(Self {
            source,
            power_of_two_only,
        })
    }

    pub fn forces_power_of_two(&self) -> bool {
        self.power_of_two_only || matches!(self.source, AuxSource::EmbeddedRank2(_))
    }

    /// Dimension actually used when a protocol asks for `d` levels.
    pub fn physical_dim(&self, d: u64) -> u64 {
        if self.forces_power_of_two() {
            d.next_power_of_two().max(2)
        } else {
            d
        }
    }

    pub fn draw(&self, d: u64) -> Result<DrawnAux> {
        let d = self.physical_dim(d);
        let cost = (d as f64).log2();
        Ok(match self.source {
            AuxSource::Ideal => DrawnAux {
                aux: AuxQudit::fresh(d),
                isotropic_p: None,
                cost_ebits: cost,
            },
            AuxSource::AmplitudeNoisy(p) => DrawnAux {
                aux: make_noisy_aux(d, p),
                isotropic_p: None,
                cost_ebits: cost,
            },
            AuxSource::EmbeddedRank2(f) => {
                let k = d.trailing_zeros();
                DrawnAux {
                    aux: embed_rank2(f, k)?,
                    isotropic_p: None,
                    cost_ebits: k as f64,
                }
            }
            AuxSource::Isotropic(p) => DrawnAux {
                aux: AuxQudit::fresh(d),
                isotropic_p: Some(p),
                cost_ebits: cost,
            },
        })
    }
}

pub fn make_noisy_aux(d: u64, p: f64) -> AuxQudit {
    AuxQudit::noisy(d, p)
}

/// Amplitude-noise weight of a 2^k-level aux built from k rank-2 pairs.
pub fn embedded_weight(fidelity: f64, k: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidParameter(format!(
            "fidelity {fidelity} outside [0,1]"
        )));
    }
    let d = 2f64.powi(k as i32);
    let target = fidelity.powi(k as i32);
    let floor = 1.0 / d;
    if target < floor - 1e-15 {
        return Err(Error::InfeasibleFidelity {
            value: target,
            floor,
        });
    }
    Ok(((target - floor) / (1.0 - floor)).clamp(0.0, 1.0))
}

/// Aux of dimension 2^k whose overlap with the target is F^k.
pub fn embed_rank2(fidelity: f64, k: u32) -> Result<AuxQudit> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "embedding needs at least one pair".into(),
        ));
    }
    let p = embedded_weight(fidelity, k)?;
    Ok(AuxQudit::noisy(1u64 << k, p))
}

/// Post-measurement effect of an isotropic aux on one controlling pair.
pub fn isotropic_measure_effect<R: Rng + ?Sized>(
    pair: PairState,
    p: f64,
    rng: &mut R,
) -> PairState {
    if pair == PairState::Target && rng.gen::<f64>() >= p {
        PairState::Dephased
    } else {
        pair
    }
}

/// Probability that `applications` noisy gates leave the aux index intact.
pub fn gate_survival(q: f64, applications: u64) -> f64 {
    if q >= 1.0 {
        1.0
    } else {
        q.powf(applications as f64)
    }
}

/// Aux fidelity after one noisy gate: F' = (1 − q + q d F)/d.
pub fn fidelity_after_noisy_gate(fidelity: f64, q: f64, d: u64) -> f64 {
    (1.0 - q + q * d as f64 * fidelity) / d as f64
}

/// Survival weight of the ensemble under one isotropic aux of dimension d
/// and fidelity F: p = (F d² − 1)/(d² − 1).
pub fn isotropic_weight_from_fidelity(fidelity: f64, d: u64) -> f64 {
    let d2 = (d * d) as f64;
    (fidelity * d2 - 1.0) / (d2 - 1.0)
}

pub fn isotropic_fidelity(p: f64, d: u64) -> f64 {
    p + (1.0 - p) / (d * d) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noisy_aux_fidelity() {
        assert_eq!(make_noisy_aux(4, 1.0).state_fidelity(), 1.0);
        assert!((make_noisy_aux(4, 0.0).state_fidelity() - 0.25).abs() < 1e-15);
        assert!((make_noisy_aux(8, 0.9).state_fidelity() - 0.9125).abs() < 1e-15);
    }

    #[test]
    fn embedding() {
        let a = embed_rank2(1.0, 3).unwrap();
        assert_eq!((a.d(), a.fidelity_p()), (8, 1.0));
        let a = embed_rank2(0.99, 4).unwrap();
        assert_eq!(a.d(), 16);
        assert!((a.state_fidelity() - 0.99f64.powi(4)).abs() < 1e-12);
        let a = embed_rank2(0.5, 2).unwrap();
        assert!(a.fidelity_p().abs() < 1e-15);
        assert!((a.state_fidelity() - 0.25).abs() < 1e-15);
        assert!(matches!(
            embed_rank2(0.4, 2),
            Err(Error::InfeasibleFidelity { .. })
        ));
    }

    #[test]
    fn isotropic_effect() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(
            isotropic_measure_effect(PairState::Target, 1.0, &mut rng),
            PairState::Target
        );
        assert_eq!(
            isotropic_measure_effect(PairState::Target, 0.0, &mut rng),
            PairState::Dephased
        );
        for p in [0.0, 0.3, 1.0] {
            assert_eq!(
                isotropic_measure_effect(PairState::Err01, p, &mut rng),
                PairState::Err01
            );
        }
    }

    #[test]
    fn pool_rounds_dimensions() {
        let pool = AuxPoolSpec::new(AuxSource::EmbeddedRank2(0.99), false).unwrap();
        let drawn = pool.draw(5).unwrap();
        assert_eq!(drawn.aux.d(), 8);
        assert_eq!(drawn.cost_ebits, 3.0);
        assert_eq!(AuxPoolSpec::ideal().draw(5).unwrap().aux.d(), 5);
        assert!(AuxPoolSpec::new(AuxSource::Isotropic(1.2), false).is_err());
    }

    #[test]
    fn noisy_gate_fidelity_composes() {
        let f = fidelity_after_noisy_gate(1.0, 0.9, 4);
        let p = 0.9;
        assert!((f - (p + (1.0 - p) / 4.0)).abs() < 1e-15);
        assert!((gate_survival(0.9, 3) - 0.729).abs() < 1e-12);
        assert!(
            (isotropic_weight_from_fidelity(isotropic_fidelity(0.8, 3), 3) - 0.8).abs() < 1e-12
        );
    }
}
