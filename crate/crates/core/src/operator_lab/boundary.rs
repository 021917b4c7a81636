//! Boundary values on an arc and the Lagrangians they define.
//!
//! A function on an arc `[a, b]` has boundary value `(f(a), f(b)) ∈ R⁴`, with
//! the Green form `ω((x₀, x₁), (y₀, y₁)) = ⟨σx₁, y₁⟩ − ⟨σx₀, y₀⟩`.

use nalgebra::DMatrix;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use super::family::{sigma, Mat2, OperatorFamily, Side};
use super::transfer::arc_transfer;
use crate::error::Result;
use crate::symplectic::{LagrangianFrame, SymplecticSpace};

/// `R⁴` with `J = diag(−σ, σ)`.
pub fn boundary_space() -> Arc<SymplecticSpace> {
    static SPACE: OnceLock<Arc<SymplecticSpace>> = OnceLock::new();
    Arc::clone(SPACE.get_or_init(|| {
        let s = sigma();
        let mut j = DMatrix::zeros(4, 4);
        for r in 0..2 {
            for c in 0..2 {
                j[(r, c)] = -s[(r, c)];
                j[(r + 2, c + 2)] = s[(r, c)];
            }
        }
        SymplecticSpace::new(j).expect("diag(-σ, σ) is a complex structure")
    }))
}

/// Orthonormal columns spanning `{(v, Mv)}` (or `{(Mv, v)}` when `swap`),
/// built from the singular value decomposition of `M` so that no
/// cancellation occurs for ill-conditioned `M`.
///
/// `M` must have determinant `1`, as transfer matrices do; the smaller
/// singular value is taken as `1 / s_max`, which keeps the span exactly
/// Lagrangian when `M` is large.
fn graph_columns(m: &Mat2, swap: bool) -> DMatrix<f64> {
    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v requested"));
    let sv = svd.singular_values;
    let big = if sv[0] >= sv[1] { 0 } else { 1 };
    let mut sing = [sv[0], sv[1]];
    sing[1 - big] = 1.0 / sv[big];
    let mut cols = DMatrix::zeros(4, 2);
    for i in 0..2 {
        let s = sing[i];
        let norm = (1.0 + s * s).sqrt();
        for r in 0..2 {
            let (top, bottom) = (v_t[(i, r)] / norm, s * u[(r, i)] / norm);
            let (x, y) = if swap { (bottom, top) } else { (top, bottom) };
            cols[(r, i)] = x;
            cols[(r + 2, i)] = y;
        }
    }
    cols
}

/// `span{(v, Mv)}`, the boundary values of solutions with transfer `M`.
pub fn graph_frame(m: &Mat2) -> Result<LagrangianFrame> {
    LagrangianFrame::new(&boundary_space(), graph_columns(m, false))
}

/// `span{(Mw, w)}`.
pub fn reverse_graph_frame(m: &Mat2) -> Result<LagrangianFrame> {
    LagrangianFrame::new(&boundary_space(), graph_columns(m, true))
}

/// Boundary values of all solutions of `(A + C_t − λ) f = 0` on one arc.
pub fn cauchy_data_space(
    fam: &OperatorFamily,
    side: Side,
    t: f64,
    lambda: f64,
) -> Result<LagrangianFrame> {
    let (a, b) = side.arc();
    graph_frame(&arc_transfer(fam, t, lambda, a, b)?)
}

/// Boundary values on `[0, π]` of functions that continue across both cut
/// points into a solution of `(A + C₀) f = 0` on `[π, 2π]`.
pub fn domain_lagrangian_d0(fam: &OperatorFamily) -> Result<LagrangianFrame> {
    // f(π) = w and f(2π) = f(0) = Ψw.
    reverse_graph_frame(&arc_transfer(fam, 0.0, 0.0, PI, 2.0 * PI)?)
}

/// Boundary values on `[π, 2π]` of functions that continue into a solution
/// of `(A + C₁) f = 0` on `[0, π]`.
pub fn domain_lagrangian_d1(fam: &OperatorFamily) -> Result<LagrangianFrame> {
    // f(2π) = f(0) = v and f(π) = Φv.
    reverse_graph_frame(&arc_transfer(fam, 1.0, 0.0, 0.0, PI)?)
}

/// Which `diag(1, −1)` eigenline is kept when the tangential coefficient vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroModeRule {
    /// `e₁` goes with the positive side, `e₂ = σe₁` with the negative side.
    #[default]
    FirstPositive,
    FirstNegative,
}

/// Spectral boundary Lagrangian: `which = 0` keeps the positive eigenline of
/// `b₀·diag(1, −1)` at both ends of `[0, π]`; `which = 1` keeps the
/// non-positive eigenline of `b₁·diag(1, −1)` at both ends of `[π, 2π]`.
pub fn aps_boundary_lagrangian(
    fam: &OperatorFamily,
    which: u8,
    rule: ZeroModeRule,
) -> Result<LagrangianFrame> {
    let b = if which == 0 { fam.b0 } else { fam.b1 };
    let positive_is_e1 = if b > 0.0 {
        true
    } else if b < 0.0 {
        false
    } else {
        rule == ZeroModeRule::FirstPositive
    };
    let keep_e1 = if which == 0 {
        positive_is_e1
    } else {
        !positive_is_e1
    };
    let axis = if keep_e1 { 0 } else { 1 };
    LagrangianFrame::coordinate(&boundary_space(), &[axis, axis + 2])
}
