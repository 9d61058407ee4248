pub mod branching;
pub mod cfree;
pub mod cli;
pub mod convolution;
pub mod embedding;
pub mod error;
pub mod generator;
pub mod measure;
pub mod ode;
pub mod opmodel;
pub mod semigroup;
pub mod series;

pub use error::{Error, Result};
