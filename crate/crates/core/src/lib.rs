pub mod cli;
pub mod config;
pub mod error;
pub mod fracmath;
pub mod green;
pub mod operators;
pub mod oracle;
pub mod quad;
pub mod solver;

pub use config::QuadratureConfig;
pub use error::{Error, Result};
