//! Third-fundamental-form Beltrami–Laplace operators on parametric surfaces,
//! evaluated exactly on truncated Taylor jets, with a finite-type detector.

pub mod beltrami;
pub mod cli;
pub mod error;
pub mod finitetype;
pub mod geometry;
pub mod jets;
pub mod revolution;
pub(crate) mod series;

pub use error::{Error, Result};
