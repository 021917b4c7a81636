//! Maslov index as a winding number of the Souriau unitary.
//!
//! Relative to a reference Lagrangian `R`, a Lagrangian `L = span X` has
//! unitary coordinates `Z = RᵀX + i (JR)ᵀX`; `W = Z Zᵀ` depends on `L` only,
//! and `dim(L ∩ R)` equals the multiplicity of the eigenvalue `1` of `W`
//! (equivalently of `−1` for the Souriau map `U = −W`). Eigenvalues move
//! counterclockwise exactly when the crossing form is positive, so the index
//! is the net number of eigenvalues passing through `1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use super::{LagrangianFrame, LagrangianPath};
use crate::error::{Error, Result};
use crate::index::{Crossing, HalfInteger, IndexReport, Method};
use crate::linalg;
use crate::tol::{EndpointConvention, RANK_TOL};

const MAX_DEPTH: usize = 40;

/// The Souriau unitary `U = −Z Zᵀ` of `frame` relative to `reference`.
pub fn souriau_unitary(
    frame: &LagrangianFrame,
    reference: &LagrangianFrame,
) -> Result<DMatrix<Complex64>> {
    let z = frame.unitary_coordinates(reference)?;
    Ok(-(&z * z.transpose()))
}

struct Node {
    t: f64,
    w: DMatrix<Complex64>,
    det_z: Complex64,
    /// Eigen-angles of `W` measured from `1`, in `(0, 2π]`.
    angles: Vec<f64>,
    /// Eigenvalues of `W` lying on `1` (within tolerance).
    on_cycle: usize,
}

fn node(
    path: &LagrangianPath,
    reference: &LagrangianFrame,
    t: f64,
    frame: Option<&LagrangianFrame>,
) -> Result<Node> {
    let owned;
    let frame = match frame {
        Some(f) => f,
        None => {
            owned = path.frame_at(t)?;
            &owned
        }
    };
    let z = frame.unitary_coordinates(reference)?;
    let w = &z * z.transpose();
    let det_z = z.determinant();
    let ev = linalg::complex_eigenvalues(&w)?;
    let mut on_cycle = 0;
    let angles = ev
        .iter()
        .map(|e| {
            let a = e.arg();
            if a.abs() < 2.0 * RANK_TOL {
                on_cycle += 1;
                TAU
            } else if a < 0.0 {
                a + TAU
            } else {
                a
            }
        })
        .collect();
    Ok(Node {
        t,
        w,
        det_z,
        angles,
        on_cycle,
    })
}

fn step_count(a: &Node, b: &Node) -> Option<i64> {
    let n = a.angles.len() as f64;
    if n * (&b.w - &a.w).norm() >= 1.0 {
        return None;
    }
    let dphase = 2.0 * (b.det_z / a.det_z).arg();
    let raw = (dphase - b.angles.iter().sum::<f64>() + a.angles.iter().sum::<f64>()) / TAU;
    let r = raw.round();
    ((raw - r).abs() < 1e-6).then_some(r as i64)
}

fn count_interval(
    path: &LagrangianPath,
    reference: &LagrangianFrame,
    a: &Node,
    b: Node,
    depth: usize,
    log: &mut Vec<Crossing>,
) -> Result<Node> {
    if let Some(c) = step_count(a, &b) {
        if c != 0 {
            log.push(Crossing {
                t: 0.5 * (a.t + b.t),
                dim: c.unsigned_abs() as usize,
                contribution: HalfInteger::from_int(c),
            });
        }
        return Ok(b);
    }
    if depth >= MAX_DEPTH {
        let raw = (2.0 * (b.det_z / a.det_z).arg() - b.angles.iter().sum::<f64>()
            + a.angles.iter().sum::<f64>())
            / TAU;
        if (raw - raw.round()).abs() >= 1e-6 {
            return Err(Error::NonIntegralWinding { value: raw });
        }
        return Err(Error::RefinementExhausted { t: a.t });
    }
    let mid = node(path, reference, 0.5 * (a.t + b.t), None)?;
    let mid = count_interval(path, reference, a, mid, depth + 1, log)?;
    count_interval(path, reference, &mid, b, depth + 1, log)
}

/// Maslov index of `path` against `reference` from the eigenvalue winding of
/// the Souriau unitary. Endpoint eigenvalues on the distinguished point are
/// weighted by `convention`, matching [`super::maslov_crossing`].
pub fn maslov_unitary(
    path: &LagrangianPath,
    reference: &LagrangianFrame,
    convention: EndpointConvention,
) -> Result<IndexReport> {
    reference.check_same_space(path.start())?;
    if path.is_constant()? {
        return Ok(IndexReport::zero(Method::UnitaryWinding));
    }
    let samples = path.samples();
    let mut log = Vec::new();
    let first = node(path, reference, samples[0].0, Some(&samples[0].1))?;
    let d0 = first.on_cycle;
    let mut prev = first;
    for (t, f) in &samples[1..] {
        let next = node(path, reference, *t, Some(f))?;
        prev = count_interval(path, reference, &prev, next, 0, &mut log)?;
    }
    let d1 = prev.on_cycle;
    // The step counts above take closed-on-the-left endpoints; shift to the
    // requested weighting.
    if convention == EndpointConvention::Symmetric {
        if d0 > 0 {
            log.insert(
                0,
                Crossing {
                    t: 0.0,
                    dim: d0,
                    contribution: HalfInteger::from_halves(-(d0 as i64)),
                },
            );
        }
        if d1 > 0 {
            log.push(Crossing {
                t: 1.0,
                dim: d1,
                contribution: HalfInteger::from_halves(d1 as i64),
            });
        }
    }
    Ok(IndexReport::from_crossings(log, Method::UnitaryWinding))
}

/// Eigen-angles of the Souriau unitary measured from the distinguished
/// point `−1`, in `(−π, π]`.
pub fn souriau_angles(frame: &LagrangianFrame, reference: &LagrangianFrame) -> Result<Vec<f64>> {
    let u = souriau_unitary(frame, reference)?;
    let mut a: Vec<f64> = linalg::complex_eigenvalues(&u)?
        .iter()
        .map(|e| {
            let x = (-e).arg();
            if x <= -PI {
                x + TAU
            } else {
                x
            }
        })
        .collect();
    a.sort_by(|x, y| x.total_cmp(y));
    Ok(a)
}
