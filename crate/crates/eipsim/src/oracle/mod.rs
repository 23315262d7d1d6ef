//! Dense linear-algebra oracle for the symbolic engine.

pub mod dense;
mod validate;

pub use validate::*;
