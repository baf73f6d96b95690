//! Sparse storage, direct LU factorisation and conjugate gradients.

mod cg;
mod lu;
mod ordering;
mod sparse;

pub use cg::{cg_solve, CgResult};
pub use lu::{lu_solve, SparseLu};
pub use ordering::minimum_degree;
pub use sparse::{CooBuilder, SparseOperator};
