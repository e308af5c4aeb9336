pub mod cli;
pub mod current;
pub mod error;
pub mod fock;
pub mod grid;
pub mod lie;
pub mod periods;
pub mod report;
pub mod rng;
pub mod search;
pub mod suite;

pub use error::{Error, Result};
pub use num_complex;
