//! Lévy processes with Markov-switching characteristics.

pub mod error;
pub mod expfunctional;
pub mod harness;
pub mod levy;
pub mod limits;
pub mod quad;
pub mod regime;
pub mod simulate;
pub mod stats;
pub mod transforms;

pub use error::{Error, Result};
