//! Numerical toolkit for the biharmonic Alt-Caffarelli problem
//! `E(u) = ∫(Δu)² + |{u > 0}|` on planar domains with pinned boundary values.
//!
//! - [`radial`]: exact radial minimizers on the unit disk and the critical
//!   boundary value at which minimizers stop being unique.
//! - [`grid`]: discrete minimizers of a smoothed energy on 2-D masks and on
//!   a radial mesh.
//! - [`free_boundary`]: nodal-set extraction and measures on discrete fields.
//! - [`verification`]: the check suite and its JSON report.
//! - [`cli_io`]: configuration, dispatch and CSV/JSON output behind the `biharm` binary.

pub mod cli_io;
pub mod error;
pub mod free_boundary;
pub mod grid;
pub mod lambert;
pub mod radial;
pub mod verification;

pub use error::{Error, Result};
