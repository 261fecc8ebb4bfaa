pub mod arith;
pub mod error;
pub mod series;
pub mod special;
pub mod jacobi;
pub mod appell;
pub mod fock;
pub mod umbral;
pub mod suites;
pub mod cli;

pub use error::{Error, Result};
