use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::{Crossing, HalfInteger, IndexReport, Method};
use crate::operator_lab::{
    aps_boundary_lagrangian, cauchy_data_space, domain_lagrangian_d0, domain_lagrangian_d1,
    spectral_flow_arc, spectral_flow_circle, unique_continuation_check, OperatorFamily, Side,
    SpectralFlow, ZeroModeRule,
};
use crate::symplectic::{hormander_index, maslov_crossing, LagrangianFrame, LagrangianPath};
use crate::tol::EndpointConvention;

/// Collar drift above this means the coefficient is not in product form.
pub const COLLAR_DRIFT_TOL: f64 = 1e-12;
/// Half-width of the spectral parameter interval sampled by the unique
/// continuation guard.
pub const DEFAULT_EPS0: f64 = 0.5;

/// One computed term of an identity together with how it was obtained.
#[derive(Debug, Clone, Serialize)]
pub struct Term {
    pub name: String,
    pub value: HalfInteger,
    pub method: Method,
    pub crossings: Vec<Crossing>,
}

impl Term {
    fn from_flow(name: &str, f: &SpectralFlow) -> Self {
        Term {
            name: name.into(),
            value: f.report.value,
            method: f.report.method,
            crossings: f.report.crossings.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    /// Boundary conditions from continuation across the other arc.
    Domain,
    /// Spectral boundary conditions of the tangential operator.
    Aps,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplittingReport {
    pub family: String,
    pub kind: BoundaryKind,
    pub convention: EndpointConvention,
    pub sf_total: HalfInteger,
    pub sf_minus: HalfInteger,
    pub sf_plus: HalfInteger,
    pub maslov_minus: HalfInteger,
    pub maslov_plus: HalfInteger,
    pub hormander_minus: HalfInteger,
    pub hormander_plus: HalfInteger,
    /// `sf_total` minus the right-hand side.
    pub residual: HalfInteger,
    /// Longest `t`-stretch with an eigenvalue near zero, over all three flows.
    pub near_zero_stretch: f64,
    pub provenance: Vec<Term>,
}

impl SplittingReport {
    /// The splitting identity holds and each arc flow equals its Maslov index.
    pub fn holds(&self) -> bool {
        self.residual == HalfInteger::ZERO
            && self.sf_minus == self.maslov_minus
            && self.sf_plus == self.maslov_plus
    }
}

/// Product form on the collars and unique continuation on both arcs.
pub fn check_guards(fam: &OperatorFamily, eps0: f64) -> Result<()> {
    let (drift, _) = fam.collar_defects();
    if drift > COLLAR_DRIFT_TOL {
        return Err(Error::InvalidInput(format!(
            "{}: coefficient varies on a collar (drift {drift:.3e})",
            fam.name
        )));
    }
    for side in [Side::Minus, Side::Plus] {
        for t in [0.0, 0.5, 1.0] {
            unique_continuation_check(fam, side, t, eps0)
                .map_err(|e| e.context(format!("{}: {} arc at t = {t}", fam.name, side.name())))?;
        }
    }
    Ok(())
}

/// `t ↦ γ(Ker(A + C_t))` on one arc.
pub fn cauchy_path(fam: &OperatorFamily, side: Side) -> Result<LagrangianPath> {
    let fam = fam.clone();
    LagrangianPath::from_fn(move |t| cauchy_data_space(&fam, side, t, 0.0))
}

/// Arc spectral flow with a fixed boundary condition and the Maslov index of
/// the Cauchy data path against the same boundary Lagrangian.
pub fn maslov_form_of_sf(
    fam: &OperatorFamily,
    side: Side,
    boundary: &LagrangianFrame,
    convention: EndpointConvention,
) -> Result<(SpectralFlow, IndexReport)> {
    let sf = spectral_flow_arc(fam, side, boundary, convention).map_err(|e| {
        e.context(format!(
            "{}: spectral flow on the {} arc",
            fam.name,
            side.name()
        ))
    })?;
    let path = cauchy_path(fam, side)?;
    let mas = maslov_crossing(&path, boundary, convention).map_err(|e| {
        e.context(format!(
            "{}: Maslov index on the {} arc",
            fam.name,
            side.name()
        ))
    })?;
    Ok((sf, mas))
}

struct Sides {
    total: SpectralFlow,
    minus: (SpectralFlow, IndexReport),
    plus: (SpectralFlow, IndexReport),
}

fn arc_flows(
    fam: &OperatorFamily,
    minus: &LagrangianFrame,
    plus: &LagrangianFrame,
    convention: EndpointConvention,
) -> Result<Sides> {
    check_guards(fam, DEFAULT_EPS0)?;
    let total = spectral_flow_circle(fam, convention)
        .map_err(|e| e.context(format!("{}: circle spectral flow", fam.name)))?;
    let minus = maslov_form_of_sf(fam, Side::Minus, minus, convention)?;
    let plus = maslov_form_of_sf(fam, Side::Plus, plus, convention)?;
    Ok(Sides { total, minus, plus })
}

fn report(
    fam: &OperatorFamily,
    kind: BoundaryKind,
    convention: EndpointConvention,
    s: Sides,
    hormander: (HalfInteger, HalfInteger),
) -> SplittingReport {
    let (sf_minus, sf_plus) = (s.minus.0.report.value, s.plus.0.report.value);
    let residual = s.total.report.value - (sf_minus + sf_plus + hormander.0 + hormander.1);
    let near_zero_stretch = s
        .total
        .near_zero_stretch
        .max(s.minus.0.near_zero_stretch)
        .max(s.plus.0.near_zero_stretch);
    let mas_term = |name: &str, r: &IndexReport| Term {
        name: name.into(),
        value: r.value,
        method: r.method,
        crossings: r.crossings.clone(),
    };
    SplittingReport {
        family: fam.name.clone(),
        kind,
        convention,
        sf_total: s.total.report.value,
        sf_minus,
        sf_plus,
        maslov_minus: s.minus.1.value,
        maslov_plus: s.plus.1.value,
        hormander_minus: hormander.0,
        hormander_plus: hormander.1,
        residual,
        near_zero_stretch,
        provenance: vec![
            Term::from_flow("sf_total", &s.total),
            Term::from_flow("sf_minus", &s.minus.0),
            Term::from_flow("sf_plus", &s.plus.0),
            mas_term("maslov_minus", &s.minus.1),
            mas_term("maslov_plus", &s.plus.1),
        ],
    }
}

/// Spectral flow on the circle against the two arc flows with boundary
/// conditions given by continuation across the other arc.
pub fn verify_splitting(
    fam: &OperatorFamily,
    convention: EndpointConvention,
) -> Result<SplittingReport> {
    let d0 = domain_lagrangian_d0(fam)?;
    let d1 = domain_lagrangian_d1(fam)?;
    let s = arc_flows(fam, &d0, &d1, convention)?;
    Ok(report(
        fam,
        BoundaryKind::Domain,
        convention,
        s,
        (HalfInteger::ZERO, HalfInteger::ZERO),
    ))
}

/// Spectral flow on the circle against the two arc flows with spectral
/// boundary conditions, corrected by two Hörmander indices.
pub fn verify_aps_splitting(
    fam: &OperatorFamily,
    rule: ZeroModeRule,
    convention: EndpointConvention,
) -> Result<SplittingReport> {
    let aps0 = aps_boundary_lagrangian(fam, 0, rule)?;
    let aps1 = aps_boundary_lagrangian(fam, 1, rule)?;
    let d0 = domain_lagrangian_d0(fam)?;
    let d1 = domain_lagrangian_d1(fam)?;
    let s = arc_flows(fam, &aps0, &aps1, convention)?;
    let h_minus = hormander_index(
        &cauchy_data_space(fam, Side::Minus, 0.0, 0.0)?,
        &cauchy_data_space(fam, Side::Minus, 1.0, 0.0)?,
        &d0,
        &aps0,
        convention,
    )
    .map_err(|e| {
        e.context(format!(
            "{}: Hörmander correction on the minus arc",
            fam.name
        ))
    })?;
    let h_plus = hormander_index(
        &cauchy_data_space(fam, Side::Plus, 0.0, 0.0)?,
        &cauchy_data_space(fam, Side::Plus, 1.0, 0.0)?,
        &d1,
        &aps1,
        convention,
    )
    .map_err(|e| {
        e.context(format!(
            "{}: Hörmander correction on the plus arc",
            fam.name
        ))
    })?;
    Ok(report(
        fam,
        BoundaryKind::Aps,
        convention,
        s,
        (h_minus, h_plus),
    ))
}
