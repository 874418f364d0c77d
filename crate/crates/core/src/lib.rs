//! Span programs for read-once boolean formulas.
//!
//! The crate parses and normalizes formulas over a gate registry, computes
//! adversary bounds with costs, builds and composes span programs, measures
//! witness sizes, and checks the spectral and witness-size inequalities that
//! make formula-evaluation algorithms work.

// Links the system OpenBLAS, which provides LAPACK.
extern crate openblas_src;

pub mod adversary;
pub mod error;
pub mod formula;
pub mod linalg;
pub mod numfmt;
pub mod span;
pub mod spectra;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use formula::{Formula, GateSpec, Registry};
pub use span::{ComposedProgram, SpanProgram};
