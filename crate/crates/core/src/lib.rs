//! Orbit-finite nominal sets, nominal monoids and recognizable data languages.

pub mod bounds;
pub mod budget;
pub mod error;
pub mod fs_sets;
pub mod language;
pub mod monoid;
pub mod nominal;
pub mod prolimit;
pub mod regression;

pub use budget::Budget;
pub use error::{Error, Result};
