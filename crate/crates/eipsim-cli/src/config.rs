//! JSON run configuration. Flags override file fields, which override
//! defaults.

use serde::{Deserialize, Serialize};

use eipsim::ghz::GhzEnsemble;
use eipsim::montecarlo::{SimulationPoint, Workload};
use eipsim::protocols::{ProtocolKind, ProtocolParams};
use eipsim::state::ProductEnsemble;

use crate::CliError;

/// A sweep axis: a single value, a list, or an inclusive range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    One(f64),
    List(Vec<f64>),
    Range { from: f64, to: f64, step: f64 },
}

impl Axis {
    pub fn values(&self, field: &str) -> Result<Vec<f64>, CliError> {
        let out = match self {
            Axis::One(x) => vec![*x],
            Axis::List(v) => v.clone(),
            Axis::Range { from, to, step } => {
                if *step <= 0.0 || to < from {
                    return Err(CliError::Config(format!("{field}: empty or backwards range")));
                }
                let count = ((to - from) / step + 1e-9).floor() as usize + 1;
                (0..count).map(|i| from + i as f64 * step).collect()
            }
        };
        if out.is_empty() {
            return Err(CliError::Config(format!("{field}: axis is empty")));
        }
        if out.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config(format!("{field}: non-finite value")));
        }
        Ok(out)
    }

    pub fn sizes(&self, field: &str) -> Result<Vec<usize>, CliError> {
        self.values(field)?
            .into_iter()
            .map(|x| {
                if x >= 0.0 && x.fract() == 0.0 {
                    Ok(x as usize)
                } else {
                    Err(CliError::Config(format!("{field}: {x} is not a non-negative integer")))
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// F Ψ00 + (1−F) 01.
    Rank2,
    /// F Ψ00 + (1−F)/2 (01 + 10).
    Rank3,
    Werner,
    /// GHZ triples; the non-target weight is split by `phase_fraction`.
    Ghz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub fidelity: Axis,
    #[serde(default = "half")]
    pub phase_fraction: f64,
}

fn half() -> f64 {
    0.5
}

fn default_protocol() -> ProtocolKind {
    ProtocolKind::Lambda { lambda: 2 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: u64,
    #[serde(default = "default_protocol")]
    pub protocol: ProtocolKind,
    /// Extra protocols for `compare`.
    #[serde(default)]
    pub protocols: Vec<ProtocolKind>,
    pub ensemble: EnsembleSpec,
    pub n: Axis,
    #[serde(default)]
    pub params: ProtocolParams,
    pub block_size: Option<usize>,
    /// Recurrence rounds listed by `compare`.
    #[serde(default)]
    pub recurrence_rounds: usize,
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub n: usize,
    pub fidelity: f64,
    pub point: SimulationPoint,
}

impl SimulateConfig {
    pub fn grid(&self, protocol: ProtocolKind) -> Result<Vec<GridPoint>, CliError> {
        let mut out = Vec::new();
        let fidelities = self.ensemble.fidelity.values("ensemble.fidelity")?;
        for n in self.n.sizes("n")? {
            for &f in &fidelities {
                let workload = match self.ensemble.kind {
                    EnsembleKind::Ghz => Workload::Ghz {
                        ensemble: GhzEnsemble::new(n, f, (1.0 - f) * self.ensemble.phase_fraction)
                            .map_err(|e| CliError::Config(format!("ensemble: {e}")))?,
                    },
                    kind => {
                        let e = match kind {
                            EnsembleKind::Rank2 => ProductEnsemble::rank2_damped(n, f),
                            EnsembleKind::Rank3 => ProductEnsemble::rank3(n, f),
                            _ => ProductEnsemble::werner(n, f),
                        }
                        .map_err(|e| CliError::Config(format!("ensemble: {e}")))?;
                        Workload::Pairs {
                            ensemble: e,
                            protocol,
                            block_size: self.block_size,
                        }
                    }
                };
                let point = SimulationPoint {
                    workload,
                    params: self.params,
                };
                point
                    .params
                    .validate()
                    .map_err(|e| CliError::Config(format!("params: {e}")))?;
                out.push(GridPoint { n, fidelity: f, point });
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curve {
    /// Damp yield, resources and abort probability over (n, F, k_max).
    Damp,
    /// EIP(λ) closed forms over (n, F).
    Lambda,
    /// Halving yield on two errors and the full-determination bound.
    TwoAlt,
    /// Local-fidelity range for m pairs of a given global fidelity.
    FidelityBounds,
    /// Finite-size hashing bound over (n, F, δ).
    Hashing,
    /// Recurrence rounds over (n, F).
    Recurrence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub curve: Curve,
    #[serde(default)]
    pub n: Option<Axis>,
    #[serde(default)]
    pub fidelity: Option<Axis>,
    /// Damp thresholds; omitted means the optimum for each n.
    #[serde(default)]
    pub k_max: Option<Axis>,
    #[serde(default = "two")]
    pub lambda: usize,
    #[serde(default = "two")]
    pub fan_out: usize,
    /// Hashing half-widths; omitted means n^(−1/5).
    #[serde(default)]
    pub delta: Option<Axis>,
    #[serde(default = "five")]
    pub rounds: usize,
}

fn two() -> usize {
    2
}

fn five() -> usize {
    5
}

impl AnalyzeConfig {
    pub fn n_axis(&self) -> Result<Vec<usize>, CliError> {
        self.n
            .as_ref()
            .ok_or_else(|| CliError::Config("n: required for this curve".into()))?
            .sizes("n")
    }

    pub fn fidelity_axis(&self) -> Result<Vec<f64>, CliError> {
        let v = self
            .fidelity
            .as_ref()
            .ok_or_else(|| CliError::Config("fidelity: required for this curve".into()))?
            .values("fidelity")?;
        if v.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(CliError::Config("fidelity: values must lie in [0,1]".into()));
        }
        Ok(v)
    }
}

/// Parse a JSON document with the failing field path in the message.
pub fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{path}: {}", e.into_inner()))
    })
}
