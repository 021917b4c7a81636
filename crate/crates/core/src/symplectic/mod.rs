//! Finite-dimensional symplectic linear algebra: Lagrangian frames, paths and
//! their intersection indices.

pub(crate) mod crossing;
mod frame;
mod graph;
mod hormander;
mod path;
pub mod random;
mod space;
mod unitary;

pub use crossing::{crossing_form, maslov_crossing};
pub use frame::LagrangianFrame;
pub use graph::{graph_lagrangian, transversal_connecting_path, Polarization};
pub use hormander::{geodesic, hormander_along, hormander_index};
pub use path::{LagrangianPath, DEFAULT_BUDGET};
pub use space::SymplecticSpace;
pub use unitary::{maslov_unitary, souriau_angles, souriau_unitary};
