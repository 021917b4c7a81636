//! End-to-end checks of the splitting identities for spectral flow, the
//! asymmetry index of the two halves, and its vanishing under reflection
//! symmetry.

mod asymmetry;
mod instances;
mod splitting;
mod vanishing;

pub use asymmetry::{
    asymmetry_index, half_kernels, reflection_symmetric, AsymmetryReport, HalfKernels,
};
pub use instances::{
    family_from_seed, generate, instance_seeds, is_degenerate, FamilyKind, Instance, Rejection,
    DEFAULT_SCALE, MAX_NEAR_ZERO_STRETCH,
};
pub use splitting::{
    cauchy_path, check_guards, maslov_form_of_sf, verify_aps_splitting, verify_splitting,
    BoundaryKind, SplittingReport, Term, COLLAR_DRIFT_TOL, DEFAULT_EPS0,
};
pub use vanishing::{
    decompose_hormander, vanishing_certificate, vanishing_certificate_for_graph, Certificate,
    Decomposition,
};
