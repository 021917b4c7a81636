//! Numerical tools for spectral flow of Dirac-type families on split
//! manifolds and the Lagrangian intersection indices that compute it.

pub mod error;
pub mod formulas;
pub mod index;
pub mod linalg;
pub mod mode_model;
pub mod operator_lab;
pub mod symplectic;
pub mod tol;

pub use error::{Error, Result};
pub use index::{HalfInteger, IndexReport};
pub use tol::EndpointConvention;
