//! Pair hidden Markov models: exact likelihood engines, simulation, estimation
//! and Monte-Carlo divergence rates.
//!
//! Numerical code is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64` or `f32`.

pub mod alphabet;
pub mod divergence;
pub mod dp;
mod error;
pub mod inference;
pub mod experiment;
pub mod io;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod simulate;

pub use error::{Error, Result};

pub type ModelParamsF64 = model::ModelParams<f64>;
pub type ModelParamsF32 = model::ModelParams<f32>;
pub type TransitionMatrixF64 = model::TransitionMatrix<f64>;
pub type TransitionMatrixF32 = model::TransitionMatrix<f32>;
pub type EmissionTablesF64 = model::EmissionTables<f64>;
pub type EmissionTablesF32 = model::EmissionTables<f32>;
pub type LogLikResultF64 = dp::LogLikResult<f64>;
pub type LogLikResultF32 = dp::LogLikResult<f32>;
