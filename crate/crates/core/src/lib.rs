//! Binary continued-fraction codes, the V tree family and Minkowski's
//! question-mark function, all in exact arithmetic.

pub mod cfe;
pub mod cli;
pub mod codes;
pub mod error;
pub mod experiments;
pub mod foundation;
pub mod measures;
pub mod qmf;
pub mod trees;

pub use error::{Error, Result};
