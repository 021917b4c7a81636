//! Structural diagnostics of the circle model.

use nalgebra::{DMatrix, Vector2};
use serde::Serialize;

use super::boundary::boundary_space;
use super::family::{OperatorFamily, Side};
use super::transfer::{arc_transfer, transfer};
use crate::error::{Error, Result};
use crate::linalg;
use crate::tol::RANK_TOL;

const GAUSS8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];
const MAX_PANEL: f64 = 0.05;

fn solution(
    fam: &OperatorFamily,
    t: f64,
    lambda: f64,
    a: f64,
    f0: &Vector2<f64>,
    u: f64,
) -> Vector2<f64> {
    transfer(fam, t, lambda, a, u) * f0
}

/// `|(λ₁ − λ₂)·∫⟨f, g⟩ − ω(γf, γg)|` over one arc, where `f`, `g` solve the
/// equation at levels `λ₁`, `λ₂` with initial values `f0`, `g0`. The integral
/// is the left side of Green's formula, computed by Gauss–Legendre quadrature.
pub fn green_form_defect(
    fam: &OperatorFamily,
    side: Side,
    t: f64,
    (l1, f0): (f64, Vector2<f64>),
    (l2, g0): (f64, Vector2<f64>),
) -> f64 {
    let (a, b) = side.arc();
    let bp = fam.breakpoints(a, b);
    let mut integral = 0.0;
    for w in bp.windows(2) {
        let panels = ((w[1] - w[0]) / MAX_PANEL).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / panels as f64;
        for p in 0..panels {
            let mid = w[0] + (p as f64 + 0.5) * h;
            for &(x, wt) in &GAUSS8 {
                for u in [mid - 0.5 * h * x, mid + 0.5 * h * x] {
                    let f = solution(fam, t, l1, a, &f0, u);
                    let g = solution(fam, t, l2, a, &g0, u);
                    integral += 0.5 * h * wt * f.dot(&g);
                }
            }
        }
    }
    let fb = solution(fam, t, l1, a, &f0, b);
    let gb = solution(fam, t, l2, a, &g0, b);
    let x = nalgebra::DVector::from_vec(vec![f0[0], f0[1], fb[0], fb[1]]);
    let y = nalgebra::DVector::from_vec(vec![g0[0], g0[1], gb[0], gb[1]]);
    let omega = boundary_space().omega_vec(&x, &y);
    ((l1 - l2) * integral - omega).abs()
}

/// Smallest singular value of a trace map given as a matrix whose columns
/// are the boundary values of a basis of solutions.
pub fn trace_map_sigma(trace: &DMatrix<f64>) -> f64 {
    linalg::singular_values_asc(trace)[0]
}

#[derive(Debug, Clone, Serialize)]
pub struct UniqueContinuation {
    pub min_sigma: f64,
    pub samples: usize,
}

/// Checks that no solution of `(A + C_t + s) f = 0` on the arc has vanishing
/// boundary trace, for `s` sampled in `[−eps0, eps0]`.
pub fn unique_continuation_check(
    fam: &OperatorFamily,
    side: Side,
    t: f64,
    eps0: f64,
) -> Result<UniqueContinuation> {
    let (a, b) = side.arc();
    let samples = 11;
    let mut min_sigma = f64::INFINITY;
    for i in 0..samples {
        let s = -eps0 + 2.0 * eps0 * i as f64 / (samples - 1) as f64;
        let m = arc_transfer(fam, t, -s, a, b)?;
        let trace = DMatrix::from_row_slice(
            4,
            2,
            &[
                1.0,
                0.0,
                0.0,
                1.0,
                m[(0, 0)],
                m[(0, 1)],
                m[(1, 0)],
                m[(1, 1)],
            ],
        );
        min_sigma = min_sigma.min(trace_map_sigma(&trace));
    }
    if min_sigma < RANK_TOL {
        return Err(Error::UniqueContinuation { sigma: min_sigma });
    }
    Ok(UniqueContinuation { min_sigma, samples })
}
