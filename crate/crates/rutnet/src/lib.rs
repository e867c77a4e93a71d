//! File formats, artifact persistence and the HTTP service around
//! [`rutnet_core`].
//!
//! - [`csv_format`]: the one-point-per-row Hamburg curve CSV.
//! - [`artifact`]: the versioned JSON model file.
//! - [`mixspec`]: `key=value` mixture strings used on the command line.
//! - [`pipeline`]: CSV in, trained artifact out.
//! - [`server`]: the read-only JSON API consumed by the mix-design UI.

pub mod artifact;
pub mod csv_format;
pub mod error;
pub mod mixspec;
pub mod pipeline;
pub mod server;

pub use artifact::ModelArtifact;
pub use error::{Error, Result};
