pub mod compactify;
pub mod defset;
pub mod ends;
pub mod error;
pub mod extension;
pub mod finite;
pub mod interval;
pub mod lin;
pub mod literal;
pub mod maps;
pub mod oracle;
pub mod par;
pub mod regularization;
pub mod solver;
pub mod symbolic;

pub use error::{Error, Result};
