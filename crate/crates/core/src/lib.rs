//! Word problems in braid groups and surface mapping class groups, solved
//! by acting on integral train-track coordinates in a fundamental polygon.

pub mod braid;
pub mod closed;
pub mod curves;
pub mod error;
mod fold;
pub mod mcg_punctured;
mod moves;
pub mod oracle;
pub mod polygon;
pub mod tracks;

pub use error::{Error, Result};
