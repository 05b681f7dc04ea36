//! Success probability and average rate capacity of shore-to-ship links aided
//! by a low-earth-orbit constellation, with a Monte Carlo reference engine.
pub mod analysis;
pub mod config;
pub mod error;
pub mod fading;
pub mod geometry;
pub mod model;
pub mod montecarlo;
pub mod output;
pub mod presets;
pub mod quad;
pub mod stats;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
