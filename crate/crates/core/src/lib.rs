pub mod config;
pub mod error;
pub mod measure;
pub mod numeric;
pub mod orlicz;
pub mod polytope;
pub mod suites;
pub mod valuation;
pub mod young;

pub use error::{Error, Result};
