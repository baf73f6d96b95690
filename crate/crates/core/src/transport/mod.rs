//! Upwind DG discretisation of the discrete-ordinates transport equation.

mod assembly;
mod manufactured;
mod sweep;
mod xs;

pub use assembly::{
    assemble_load, assemble_scatter_mass, assemble_transport, DirectionalOperator, TransportSystem,
};
pub use manufactured::{ManufacturedProblem, Source};
pub use sweep::{sweep_plan, SweepPlan, CHARACTERISTIC_TOL};
pub use xs::CrossSections;
