//! Truncated sequence model of the boundary trace spaces: mode coefficients
//! of the tangential operator with Sobolev-type weights, spectral
//! projections, and symplectic reduction between the two sides.

mod cylinder;
mod decay;
mod reduction;
mod spectrum;
mod trace;

pub use cylinder::CappedCylinder;
pub use decay::{
    embedding, projection_difference_report, DecayRow, DecayTable, LARGE_SINGULAR_VALUE, RANK_ZERO,
};
pub use reduction::{
    choose_fg, random_block_path, reduce_lagrangian, split_and_reduce, ReductionSetup, SplitReduce,
};
pub use spectrum::{Law, SpectrumFile, TangentialSpectrum};
pub use trace::{aps_projector, sobolev_norm, ModeVector, TraceSide, TraceSpace};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 64;
/// Orders used for truncation-stability sweeps.
pub const SWEEP_ORDERS: [usize; 4] = [16, 32, 64, 128];

/// `(P_{θ₊}, P_{γ(𝔇)})` at order `k` in the minus-side trace space, where
/// `γ(𝔇)` are the traces of solutions on the capped cylinder.
pub fn aps_vs_continuation(
    spectrum: &TangentialSpectrum,
    cylinder: &CappedCylinder,
    k: usize,
) -> crate::Result<(nalgebra::DMatrix<f64>, nalgebra::DMatrix<f64>)> {
    let space = TraceSpace::new(spectrum.with_order(k)?, TraceSide::Minus);
    let q = cylinder.cauchy_data(&space)?.projector();
    Ok((aps_projector(&space), q))
}

/// `(P_{θ₊}, P_{i₋(F) + G′})` at order `k`, with `F` given as pairs.
pub fn aps_vs_swapped(
    spectrum: &TangentialSpectrum,
    f_pairs: &std::collections::BTreeSet<usize>,
    k: usize,
) -> crate::Result<(nalgebra::DMatrix<f64>, nalgebra::DMatrix<f64>)> {
    let mut setup = ReductionSetup::new(spectrum.with_order(k)?);
    setup.f_pairs = f_pairs.iter().copied().filter(|&p| p <= k).collect();
    Ok((
        aps_projector(&setup.small),
        setup.l_plus_swapped().projector(),
    ))
}
