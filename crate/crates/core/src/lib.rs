pub mod atlas;
pub mod attractor;
pub mod error;
pub mod lambda;
pub mod lattice;
pub mod magnet;
pub mod monoid;
pub mod oracle;
pub mod report;

pub use error::{Error, Result};
