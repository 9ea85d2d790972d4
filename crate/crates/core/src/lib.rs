//! Generalized sampling with compactly supported shearlet frames.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod generators;
pub mod poly;
pub mod gramian;
pub mod gs;
pub mod quad;
pub mod recon;
pub mod sampling;
pub mod system;

pub use error::{Error, Result};
