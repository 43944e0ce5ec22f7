//! Nearest-neighbor and greedy TSP heuristics on Ahlfors-regular metric
//! spaces, together with executable versions of the geometric arguments that
//! bound their tour lengths.

pub mod adversarial;
pub mod analysis;
pub mod error;
pub mod experiment;
pub mod solvers;
pub mod spaces;
pub mod stats;

pub use error::{Error, Result};
