//! Grouped PEPA analyser.
//!
//! Parses grouped PEPA models, derives the aggregated counting-process
//! transitions, generates moment-closure and linear-noise ODE systems,
//! simulates the underlying CTMC and reports switch points of the `min`
//! terms that drive the error of the fluid approximation.

pub mod analysis;
pub mod error;
pub mod lang;
pub mod moments;
pub mod numerics;
pub mod output;
pub mod runner;
pub mod semantics;
pub mod ssa;

pub use error::{GpaError, ParseError, Result, ValidationError};
