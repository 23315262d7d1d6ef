//! Error-identification entanglement purification: a configuration-level
//! simulator, closed-form analytics, and a dense validation oracle.
//!
//! Qubit pairs are tracked as classical samples of the four pure states a
//! depolarized pair can occupy. Auxiliary qudit pairs only ever carry an
//! amplitude index, so the counter gate reduces to modular arithmetic.

pub mod analytics;
pub mod channels;
pub mod error;
pub mod ghz;
pub mod montecarlo;
pub mod noise;
pub mod oracle;
pub mod protocols;
pub mod state;

pub use error::{Error, Result};
