pub mod cli;
pub mod cohomology;
pub mod error;
pub mod formal;
pub mod functors;
pub mod homology;
pub mod lalgebra;
pub mod linalg;
pub mod par;
pub mod rational;
pub mod series;
pub mod trees;

pub use error::{Error, Result};
pub use rational::Q;
