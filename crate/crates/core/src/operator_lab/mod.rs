//! The circle model: `σ d/du + C(u, t)` acting on `R²`-valued functions on
//! `[0, 2π)`, cut at `0` and `π` into the arcs `[0, π]` and `[π, 2π]`.

mod boundary;
mod checks;
mod family;
mod galerkin;
mod spectrum;
mod transfer;

pub use boundary::{
    aps_boundary_lagrangian, boundary_space, cauchy_data_space, domain_lagrangian_d0,
    domain_lagrangian_d1, graph_frame, reverse_graph_frame, ZeroModeRule,
};
pub use checks::{
    green_form_defect, trace_map_sigma, unique_continuation_check, UniqueContinuation,
};
pub use family::{
    random_sym, sigma, sym2, tangential, Coefficient, Mat2, OperatorFamily, Piece, Side, TrigTerm,
    COLLAR,
};
pub use galerkin::{galerkin_eigenvalues, galerkin_spectral_flow};
pub use spectrum::{
    eigenvalues_in, eigenvalues_on_arc, eigenvalues_on_circle, periodic_boundary,
    ramp_circle_eigenvalues, spectral_flow, spectral_flow_arc, spectral_flow_circle, CauchyAt,
    Eigenvalue, SpectralFlow,
};
pub use transfer::{arc_transfer, exp_traceless, monodromy, transfer, ArcPlan};
