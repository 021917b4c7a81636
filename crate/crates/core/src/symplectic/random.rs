//! Seeded random Lagrangians and paths.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use std::sync::Arc;

use super::{LagrangianFrame, LagrangianPath, SymplecticSpace};
use crate::error::Result;

pub fn symmetric<R: Rng>(rng: &mut R, n: usize, scale: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-scale..scale));
    (&a + a.transpose()) * 0.5
}

/// A unitary matrix from the QR factor of a random complex matrix.
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    a.qr().q()
}

pub fn orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    a.qr().q()
}

pub fn lagrangian<R: Rng>(rng: &mut R, space: &Arc<SymplecticSpace>) -> Result<LagrangianFrame> {
    let n = space.half_dim();
    let axes: Vec<usize> = (0..n).collect();
    let base = LagrangianFrame::coordinate(space, &axes)?;
    LagrangianFrame::from_unitary(&base, &unitary(rng, n))
}

/// `t ↦ exp(t·i·H₁) exp(t²·i·H₂)` applied to a random Lagrangian, with
/// Hermitian `H₁, H₂` of size roughly `scale`.
pub fn smooth_path<R: Rng>(
    rng: &mut R,
    space: &Arc<SymplecticSpace>,
    scale: f64,
) -> Result<LagrangianPath> {
    let n = space.half_dim();
    let start = lagrangian(rng, space)?;
    let herm = |rng: &mut R| {
        let a = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
        });
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    };
    let h1 = herm(rng).symmetric_eigen();
    let h2 = herm(rng).symmetric_eigen();
    LagrangianPath::from_fn(move |t| {
        let e = |h: &nalgebra::SymmetricEigen<Complex64, nalgebra::Dyn>, s: f64| {
            let d =
                DMatrix::from_diagonal(&h.eigenvalues.map(|l| Complex64::from_polar(1.0, s * l)));
            &h.eigenvectors * d * h.eigenvectors.adjoint()
        };
        let z = e(&h1, t) * e(&h2, t * t);
        LagrangianFrame::from_unitary(&start, &z)
    })
}

/// Closed path `t ↦ Q·diag(e^{i w_j t})·Qᵀ·exp(i·sin²(πt)·S)` applied to a
/// random Lagrangian, with winding numbers `w_j/π ∈ {−2, …, 2}` and a
/// symmetric wobble `S` that vanishes at both ends.
pub fn smooth_loop<R: Rng>(rng: &mut R, space: &Arc<SymplecticSpace>) -> Result<LagrangianPath> {
    use std::f64::consts::PI;
    let n = space.half_dim();
    let start = lagrangian(rng, space)?;
    let q = orthogonal(rng, n).map(|x| Complex64::new(x, 0.0));
    let w: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(-2i32..=2) as f64 * PI)
        .collect();
    let bump = symmetric(rng, n, 1.5);
    LagrangianPath::from_fn(move |t| {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            w.iter().map(|&x| Complex64::from_polar(1.0, x * t)),
        ));
        let b = bump.map(|x| Complex64::new(0.0, x * (PI * t).sin().powi(2)));
        let z = &q * d * q.adjoint() * b.exp();
        LagrangianFrame::from_unitary(&start, &z)
    })
}
