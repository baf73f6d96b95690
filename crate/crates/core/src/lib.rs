//! Discontinuous Galerkin discrete-ordinates transport on polygonal meshes,
//! with diffusion synthetic acceleration of source iteration.

pub mod bench;
pub mod dgspace;
pub mod dsa;
pub mod error;
pub mod geom;
pub mod linalg;
pub mod mesh;
pub mod quadrature;
pub mod solver;
pub mod transport;

pub use error::{Error, Result};
