//! Exact-arithmetic motivic zeta functions, motivic entropy, and
//! information-loss functionals over truncated power series.

pub mod error;
pub mod scalar;
pub mod series;
pub mod classes;
pub mod ffcount;
pub mod global;
pub mod infoloss;
pub mod cli;
pub mod verify;
pub mod logring;
pub mod witt;

pub use error::{Error, Result};
pub use scalar::{Rat, Ring, Scalar};
pub use series::TruncatedSeries;
