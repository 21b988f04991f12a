//! Discrete minimization of the smoothed energy on masked uniform grids and
//! on the radial mesh.

mod banded;
mod domain;
mod energy;
mod gradcheck;
mod operator;
mod solver;

pub use domain::{DiscreteDomain, DomainKind, NodeKind, ScalarField, MIN_NODES};
pub use energy::{
    bending_energy, discrete_laplacian, energy_gradient, positive_measure, sharp_energy,
    smoothed_energy, smoothed_heaviside, smoothed_heaviside_prime, smoothed_heaviside_second,
};
pub use gradcheck::{fd_gradient_check, GradCheckConfig};
pub use solver::{
    minimize, minimize_best_of, ContinuationSchedule, MinimizeOutcome, StageDiagnostics,
    StageStatus, EPS_FLOOR,
};
