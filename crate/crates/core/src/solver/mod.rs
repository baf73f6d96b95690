//! Outer iterations, reference solutions and the empirical convergence factor.

mod iteration;
mod reference;
mod rho;

pub use iteration::{
    dsa_iteration, run_scheme, source_iteration, IterationReport, IterationSettings, PhaseTimings,
    Scheme, Termination,
};
pub use reference::{reference_solution, ReferenceMethod, ReferenceOptions, ReferenceSolution};
pub use rho::{empirical_rho, RhoEstimate, ERROR_FLOOR};
