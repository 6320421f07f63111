pub mod arith;
pub mod dirichlet;
pub mod error;
pub mod fundomain;
pub mod hnf;
pub mod lattice;
pub mod matrix;
pub mod measure;
pub mod padic;
pub mod par;
pub mod report;

pub use error::{Error, Result};
