use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{maslov_crossing, LagrangianFrame, LagrangianPath};
use crate::error::Result;
use crate::index::HalfInteger;
use crate::tol::EndpointConvention;

/// Geodesic from `from` to `to` in the Lagrangian Grassmannian, built as the
/// one-parameter unitary group `exp(t log Z)` where `Z` are the unitary
/// coordinates of `to` relative to `from`.
pub fn geodesic(from: &LagrangianFrame, to: &LagrangianFrame) -> Result<LagrangianPath> {
    from.check_same_space(to)?;
    let z = to.unitary_coordinates(from)?;
    let schur = z
        .clone()
        .try_schur(1e-15, 10_000)
        .ok_or_else(|| crate::error::Error::InvalidInput("Schur decomposition failed".into()))?;
    let (q, t) = schur.unpack();
    let phases: Vec<f64> = (0..t.nrows()).map(|i| t[(i, i)].arg()).collect();
    let reference = from.clone();
    LagrangianPath::from_fn(move |s| {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            phases.len(),
            phases.iter().map(|p| Complex64::from_polar(1.0, s * p)),
        ));
        let zs = &q * d * q.adjoint();
        LagrangianFrame::from_unitary(&reference, &zs)
    })
}

/// `Mas(c, λ) − Mas(c, μ)` along a given path `c`.
pub fn hormander_along(
    path: &LagrangianPath,
    lambda: &LagrangianFrame,
    mu: &LagrangianFrame,
    convention: EndpointConvention,
) -> Result<HalfInteger> {
    let a = maslov_crossing(path, lambda, convention)?;
    let b = maslov_crossing(path, mu, convention)?;
    Ok(a.value - b.value)
}

/// Hörmander index `σ_H(ν₀, ν₁; λ, μ)`, evaluated along the geodesic from
/// `ν₀` to `ν₁`. The value does not depend on the connecting path.
pub fn hormander_index(
    nu0: &LagrangianFrame,
    nu1: &LagrangianFrame,
    lambda: &LagrangianFrame,
    mu: &LagrangianFrame,
    convention: EndpointConvention,
) -> Result<HalfInteger> {
    let path = geodesic(nu0, nu1)?;
    hormander_along(&path, lambda, mu, convention)
}
