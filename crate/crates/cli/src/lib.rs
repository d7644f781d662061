//! Model files and the `hclosed` command line.

pub mod error;
pub mod model;
pub mod run;

pub use error::CliError;
pub use model::{parse_model, Model, ModelDocument};
