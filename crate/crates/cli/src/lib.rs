//! Command-line surface for `twoproj`: matrix files, single-shot commands and
//! the seeded ensemble verifier.

pub mod canon;
pub mod commands;
pub mod ensemble;
pub mod matrix_io;

pub use commands::{run, Outcome};
pub use ensemble::{verify_ensemble, verify_ensemble_with, EnsembleSpec, Report};
