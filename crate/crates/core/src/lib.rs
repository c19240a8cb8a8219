//! Concentration bounds for the number of isolated vertices `Y` of the
//! Erdős–Rényi graph G(n,p), together with the machinery to check them:
//! exact enumeration for small `n`, a size-bias coupling sampler, and
//! parallel Monte Carlo tail estimation.

pub mod bounds;
pub mod cli;
pub mod coupling;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod model;
pub mod montecarlo;
pub mod numeric;
pub mod output;
pub mod pmf;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use model::{moments, validate_params, Moments, Params};
