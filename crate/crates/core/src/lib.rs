//! Verification engine for multivariable basic hypergeometric summations.

pub mod cli;
pub mod error;
pub mod identities;
pub mod lattice;
pub mod matinv;
pub mod numerics;
pub mod par;

pub use error::{Error, Result};
