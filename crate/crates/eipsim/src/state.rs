//! Pair states, ensembles, sampled configurations and the counter gate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pure state of one qubit pair after depolarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PairState {
    /// The Bell state |Ψ00⟩.
    Target,
    /// The product state |01⟩; raises the aux amplitude index by one.
    Err01,
    /// The product state |10⟩; lowers the aux amplitude index by one.
    Err10,
    /// The Bell state |Ψ10⟩, invisible to the counter gate.
    PhaseErr,
    /// ½(|00⟩⟨00| + |11⟩⟨11|), left behind when a Target pair is
    /// entangled with a maximally mixed auxiliary and the aux is measured.
    Dephased,
}

impl PairState {
    /// The four variants a sampled ensemble can produce, in weight order.
    pub const SAMPLED: [PairState; 4] = [
        PairState::Target,
        PairState::Err01,
        PairState::Err10,
        PairState::PhaseErr,
    ];

    /// Signed shift of the aux amplitude index per counter gate application.
    pub fn counter_contribution(self) -> i64 {
        match self {
            PairState::Err01 => 1,
            PairState::Err10 => -1,
            PairState::Target | PairState::PhaseErr | PairState::Dephased => 0,
        }
    }

    pub fn is_target(self) -> bool {
        self == PairState::Target
    }

    /// Overlap of the pair with |Ψ00⟩.
    pub fn fidelity(self) -> f64 {
        match self {
            PairState::Target => 1.0,
            PairState::Dephased => 0.5,
            _ => 0.0,
        }
    }

    /// Outcome of measuring both qubits in Z and comparing.
    pub fn z_outcome(self) -> ZOutcome {
        match self {
            PairState::Err01 => ZOutcome::Anti01,
            PairState::Err10 => ZOutcome::Anti10,
            _ => ZOutcome::Correlated,
        }
    }
}

/// Result of a local Z-basis check on one pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZOutcome {
    /// 00 or 11.
    Correlated,
    Anti01,
    Anti10,
}

/// Reduce a signed integer into Z_d.
pub fn modulo(value: i64, d: u64) -> u64 {
    value.rem_euclid(d as i64) as u64
}

/// Aux index shift from `reps` counter gate applications controlled by `s`.
pub fn counter_shift(s: PairState, reps: u64, d: u64) -> u64 {
    assert!(d >= 2, "aux dimension must be at least 2");
    modulo(s.counter_contribution() * reps as i64, d)
}

/// All values in `lo..=hi` congruent to `residue` mod `d`.
pub fn residue_preimages(residue: u64, d: u64, lo: i64, hi: i64) -> Vec<i64> {
    let d = d as i64;
    let r = residue as i64;
    let mut first = lo + (r - lo).rem_euclid(d);
    let mut out = Vec::new();
    while first <= hi {
        out.push(first);
        first += d;
    }
    out
}

/// n i.i.d. pairs with weights over (Target, Err01, Err10, PhaseErr).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductEnsemble {
    n: usize,
    p: [f64; 4],
}

impl ProductEnsemble {
    pub fn new(n: usize, p: [f64; 4]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "ensemble size must be positive".into(),
            ));
        }
        if p.iter().any(|&x| !(0.0..=1.0).contains(&x) || x.is_nan()) {
            return Err(Error::InvalidParameter(format!(
                "weights out of [0,1]: {p:?}"
            )));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { n, p })
    }

    /// F|Ψ00⟩ + (1−F)|01⟩, the amplitude-damped form.
    pub fn rank2_damped(n: usize, fidelity: f64) -> Result<Self> {
        Self::new(n, [fidelity, 1.0 - fidelity, 0.0, 0.0])
    }

    /// F|Ψ00⟩ + (1−F)/2 (|01⟩ + |10⟩).
    pub fn rank3(n: usize, fidelity: f64) -> Result<Self> {
        let e = (1.0 - fidelity) / 2.0;
        Self::new(n, [fidelity, e, e, 0.0])
    }

    /// Bell-diagonal weights (Ψ00, Ψ01, Ψ10, Ψ11) brought to product form by D2.
    pub fn from_bell_diagonal(n: usize, w: [f64; 4]) -> Result<Self> {
        let flip = (w[1] + w[3]) / 2.0;
        Self::new(n, [w[0], flip, flip, w[2]])
    }

    /// Werner state of fidelity F after D2.
    pub fn werner(n: usize, fidelity: f64) -> Result<Self> {
        let e = (1.0 - fidelity) / 3.0;
        Self::from_bell_diagonal(n, [fidelity, e, e, e])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> [f64; 4] {
        self.p
    }

    pub fn fidelity(&self) -> f64 {
        self.p[0]
    }

    pub fn with_size(&self, n: usize) -> Result<Self> {
        Self::new(n, self.p)
    }
}

/// One sampled pure-state realization; positions are labeled 1..=n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    states: Vec<PairState>,
}

impl Configuration {
    pub fn new(states: Vec<PairState>) -> Self {
        Self { states }
    }

    pub fn all_target(n: usize) -> Self {
        Self::new(vec![PairState::Target; n])
    }

    /// All-Target configuration with the given (position, state) overrides.
    pub fn with_errors(n: usize, errors: &[(usize, PairState)]) -> Self {
        let mut c = Self::all_target(n);
        for &(pos, s) in errors {
            c.set(pos, s);
        }
        c
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// State at 1-based position.
    pub fn get(&self, position: usize) -> PairState {
        self.states[position - 1]
    }

    pub fn set(&mut self, position: usize, s: PairState) {
        self.states[position - 1] = s;
    }

    pub fn states(&self) -> &[PairState] {
        &self.states
    }

    pub fn error_count(&self) -> usize {
        self.states.iter().filter(|s| !s.is_target()).count()
    }

    pub fn count(&self, kind: PairState) -> usize {
        self.states.iter().filter(|&&s| s == kind).count()
    }

    /// Positions (1-based) holding `kind`.
    pub fn positions_of(&self, kind: PairState) -> Vec<usize> {
        (1..=self.len()).filter(|&i| self.get(i) == kind).collect()
    }

    /// Sub-configuration over the given positions, relabeled 1..=len.
    pub fn restrict(&self, positions: &[usize]) -> Self {
        Self::new(positions.iter().map(|&p| self.get(p)).collect())
    }
}

pub fn sample_configuration<R: Rng + ?Sized>(e: &ProductEnsemble, rng: &mut R) -> Configuration {
    let p = e.weights();
    let states = (0..e.n())
        .map(|_| {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for (i, &w) in p.iter().enumerate() {
                acc += w;
                if u < acc {
                    return PairState::SAMPLED[i];
                }
            }
            // u landed in the rounding gap above the last cumulative weight
            PairState::SAMPLED[p.iter().rposition(|&w| w > 0.0).unwrap_or(0)]
        })
        .collect();
    Configuration::new(states)
}

/// A d-level auxiliary pair with zero phase index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxQudit {
    d: u64,
    index: u64,
    fidelity_p: f64,
}

impl AuxQudit {
    pub fn fresh(d: u64) -> Self {
        Self::noisy(d, 1.0)
    }

    /// Amplitude-noisy aux: the index survives measurement with probability p.
    pub fn noisy(d: u64, p: f64) -> Self {
        assert!(d >= 2, "aux dimension must be at least 2");
        assert!((0.0..=1.0).contains(&p), "noise weight must lie in [0,1]");
        Self {
            d,
            index: 0,
            fidelity_p: p,
        }
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn fidelity_p(&self) -> f64 {
        self.fidelity_p
    }

    /// Overlap with |Ψ00^(d)⟩.
    pub fn state_fidelity(&self) -> f64 {
        self.fidelity_p + (1.0 - self.fidelity_p) / self.d as f64
    }

    pub fn ebit_cost(&self) -> f64 {
        (self.d as f64).log2()
    }

    /// Apply `reps` counter gates controlled by `s`.
    pub fn shifted(self, s: PairState, reps: u64) -> Self {
        let index = (self.index + counter_shift(s, reps, self.d)) % self.d;
        Self { index, ..self }
    }
}

/// Error number gate: one counter gate per pair.
pub fn apply_eng(c: &Configuration, aux: AuxQudit) -> AuxQudit {
    c.states().iter().fold(aux, |a, &s| a.shifted(s, 1))
}

/// Error position gate: the pair at position i drives i counter gates.
pub fn apply_epg(c: &Configuration, aux: AuxQudit) -> AuxQudit {
    c.states()
        .iter()
        .enumerate()
        .fold(aux, |a, (i, &s)| a.shifted(s, i as u64 + 1))
}

/// Read the amplitude index; with probability 1−p the readout is uniform.
pub fn measure_aux<R: Rng + ?Sized>(aux: &AuxQudit, rng: &mut R) -> u64 {
    if aux.fidelity_p >= 1.0 || rng.gen::<f64>() < aux.fidelity_p {
        aux.index
    } else {
        rng.gen_range(0..aux.d)
    }
}

/// Exact readout distribution of `measure_aux`.
pub fn measure_aux_distribution(aux: &AuxQudit) -> Vec<f64> {
    let floor = (1.0 - aux.fidelity_p) / aux.d as f64;
    let mut dist = vec![floor; aux.d as usize];
    dist[aux.index as usize] += aux.fidelity_p;
    dist
}
