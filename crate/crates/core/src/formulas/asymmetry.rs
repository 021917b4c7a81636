use serde::Serialize;
use std::f64::consts::PI;

use super::vanishing::{decompose_hormander, vanishing_certificate, Certificate, Decomposition};
use crate::error::{Error, Result};
use crate::index::HalfInteger;
use crate::operator_lab::{
    arc_transfer, boundary_space, cauchy_data_space, exp_traceless, graph_frame,
    reverse_graph_frame, sigma, OperatorFamily, Side, ZeroModeRule,
};
use crate::symplectic::{geodesic, hormander_along, LagrangianFrame};
use crate::tol::{EndpointConvention, RANK_TOL};

/// Kernel data of the two halves at a fixed `t`, as Lagrangians in the
/// boundary space `R⁴` of pairs `(f(0), f(π))`.
#[derive(Debug, Clone)]
pub struct HalfKernels {
    pub nu_minus: LagrangianFrame,
    pub nu_plus: LagrangianFrame,
    pub l_plus: LagrangianFrame,
    pub l_minus: LagrangianFrame,
}

/// `ν⁻`: traces of kernel elements on `[0, π]`; `ν⁺`: traces of kernel
/// elements on `[π, 2π]` read at the same two points; `L₊`: positive
/// eigenlines of the tangential operator at both cut points; `L₋ = J L₊`.
pub fn half_kernels(fam: &OperatorFamily, t: f64, rule: ZeroModeRule) -> Result<HalfKernels> {
    let nu_minus = cauchy_data_space(fam, Side::Minus, t, 0.0)?;
    let nu_plus = reverse_graph_frame(&arc_transfer(fam, t, 0.0, PI, 2.0 * PI)?)?;
    let b = fam.b_at(t);
    let e1 = b > 0.0 || (b == 0.0 && rule == ZeroModeRule::FirstPositive);
    let axis = if e1 { 0 } else { 1 };
    let l_plus = LagrangianFrame::coordinate(&boundary_space(), &[axis, axis + 2])?;
    let l_minus = l_plus.j_complement();
    Ok(HalfKernels {
        nu_minus,
        nu_plus,
        l_plus,
        l_minus,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymmetryReport {
    pub family: String,
    pub value: HalfInteger,
    /// The same index along a two-leg path through an unrelated Lagrangian.
    pub value_other_path: HalfInteger,
    /// Gap between `J ν⁺` and `ν⁻`; zero when the halves mirror each other.
    pub symmetry_defect: f64,
    /// `dim(ν⁺ ∩ L₋)`, `dim(ν⁻ ∩ L₋)`, `dim(ν⁺ ∩ ν⁻)`.
    pub intersections: [usize; 3],
    pub decomposition: Option<Decomposition>,
    pub certificate: Option<Certificate>,
}

impl AsymmetryReport {
    pub fn symmetric(&self) -> bool {
        self.symmetry_defect < RANK_TOL
    }

    pub fn path_independent(&self) -> bool {
        self.value == self.value_other_path
    }
}

/// `σ_H(ν⁺, L₊; ν⁻, L₋)` for the two halves of the circle at parameter `t`.
pub fn asymmetry_index(
    fam: &OperatorFamily,
    t: f64,
    rule: ZeroModeRule,
    convention: EndpointConvention,
) -> Result<AsymmetryReport> {
    let h = half_kernels(fam, t, rule)?;
    let intersections = [
        h.nu_plus.intersection_dim(&h.l_minus)?,
        h.nu_minus.intersection_dim(&h.l_minus)?,
        h.nu_plus.intersection_dim(&h.nu_minus)?,
    ];
    if intersections.iter().any(|&d| d > 2) {
        return Err(Error::InvalidInput(format!(
            "intersection dimensions {intersections:?} exceed the half dimension"
        )));
    }
    let direct = geodesic(&h.nu_plus, &h.l_plus)?;
    let value = hormander_along(&direct, &h.nu_minus, &h.l_minus, convention)?;
    let via = graph_frame(&exp_traceless(&(sigma() * 0.7)))?;
    let detour = geodesic(&h.nu_plus, &via)?.concat(&geodesic(&via, &h.l_plus)?)?;
    let value_other_path = hormander_along(&detour, &h.nu_minus, &h.l_minus, convention)?;
    let symmetry_defect = h.nu_plus.j_complement().gap(&h.nu_minus)?;
    let decomposition = match decompose_hormander(&h.nu_plus, &h.l_plus, &h.nu_minus, convention) {
        Ok(d) => Some(d),
        Err(Error::InvalidInput(_)) => None,
        Err(e) => return Err(e),
    };
    let certificate = if symmetry_defect < RANK_TOL {
        Some(vanishing_certificate(&h.nu_plus, &h.l_plus, convention)?)
    } else {
        None
    };
    Ok(AsymmetryReport {
        family: fam.name.clone(),
        value,
        value_other_path,
        symmetry_defect,
        intersections,
        decomposition,
        certificate,
    })
}

/// Builds a family whose two halves mirror each other: `base` is kept on
/// `[π, 2π]` and `[0, π]` carries `Id + R(u) σ C(2π − u) σ R(u)ᵀ` with
/// `R(u) = exp(uσ)`. The transfer matrices then satisfy `Φ = σ Ψ⁻¹ σ`,
/// so `J ν⁺ = ν⁻` at every `t`.
pub fn reflection_symmetric(base: &OperatorFamily) -> Result<OperatorFamily> {
    let b = base.clone();
    let s = sigma();
    let f = move |u: f64, t: f64| {
        if u >= PI {
            b.c(u, t)
        } else {
            let r = exp_traceless(&(s * u));
            crate::operator_lab::Mat2::identity() + r * s * b.c(2.0 * PI - u, t) * s * r.transpose()
        }
    };
    OperatorFamily::from_fn(
        &format!("{}-mirrored", base.name),
        base.b0,
        base.b1,
        vec![PI],
        base.t_speed(),
        f,
    )
}
