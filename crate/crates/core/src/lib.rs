pub mod archimedean;
pub mod arith;
pub mod bernoulli;
pub mod convolution;
pub mod error;
pub mod log_ring;
pub mod output;
pub mod qcalc;
pub mod report;
pub mod suite;
pub mod volkenborn;

pub use error::{Error, Result};
