//! Eigenvalues of boundary problems and spectral flow of families.
//!
//! A boundary problem is given by its Cauchy data `λ ↦ K(λ)` and a boundary
//! Lagrangian `ℓ`; `λ` is an eigenvalue exactly when `K(λ) ∩ ℓ ≠ {0}`, with
//! multiplicity the intersection dimension.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::boundary::graph_frame;
use super::family::{Mat2, OperatorFamily, Side};
use super::transfer::ArcPlan;
use crate::error::{Error, Result};
use crate::index::{Crossing, HalfInteger, IndexReport, Method};
use crate::linalg;
use crate::symplectic::LagrangianFrame;
use crate::tol::{EndpointConvention, MIN_INTERVAL};

/// Initial `λ` spacing of the eigenvalue search.
const LAMBDA_GRID: f64 = 0.05;
/// Eigenvalues are located to this width.
const LOCATE_WIDTH: f64 = 1e-11;
/// Located eigenvalues closer than this are one eigenvalue.
const MERGE_WIDTH: f64 = 1e-8;
/// Eigen-angles this close to `0` are on the cycle.
const ANGLE_TOL: f64 = 1e-12;
/// Eigenvalues are searched in `(−WINDOW, WINDOW)` at every `t`.
const WINDOW: f64 = 3.0;
const INITIAL_T_STEPS: usize = 64;
/// Steps next to an eigenvalue this close to zero are refined.
const NEAR_ZERO: f64 = 1e-3;
const NEAR_ZERO_STEP: f64 = 2.5e-4;
/// Safety factor on the eigenvalue speed bound.
const SPEED_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub lambda: f64,
    pub multiplicity: usize,
}

type Cauchy<'a> = dyn Fn(f64) -> Result<LagrangianFrame> + Sync + 'a;

#[derive(Clone, Copy)]
struct Node {
    lambda: f64,
    /// `arg det W`, with `W = Z Zᵀ` the unitary of `K(λ)` relative to `ℓ`.
    phase: f64,
    /// Sum of the eigen-angles of `W` in `[0, 2π)`.
    angle_sum: f64,
}

fn node(cauchy: &Cauchy<'_>, ell: &LagrangianFrame, lambda: f64) -> Result<Node> {
    let z = cauchy(lambda)?.unitary_coordinates(ell)?;
    let w = &z * z.transpose();
    let phase = w.determinant().arg();
    let angle_sum = linalg::complex_eigenvalues(&w)?
        .iter()
        .map(|e| {
            let a = e.arg();
            if a.abs() < ANGLE_TOL {
                0.0
            } else if a < 0.0 {
                a + TAU
            } else {
                a
            }
        })
        .sum();
    Ok(Node {
        lambda,
        phase,
        angle_sum,
    })
}

/// Clockwise rotation of `det W` from `a` to `b`, in `[0, 2π)`.
fn rotation(a: &Node, b: &Node) -> f64 {
    (a.phase - b.phase).rem_euclid(TAU)
}

/// Eigen-angles passing through `0` between `a` and `b`, given that every
/// angle turns clockwise by less than `2π` in total.
fn wraps(a: &Node, b: &Node) -> Option<usize> {
    let k = (rotation(a, b) - a.angle_sum + b.angle_sum) / TAU;
    let r = k.round();
    ((k - r).abs() < 1e-6 && r >= 0.0).then_some(r as usize)
}

/// Eigenvalues in `[lo, hi)` of the problem with Cauchy data `cauchy` and
/// boundary `ell`, sorted, with multiplicities.
///
/// As `λ` increases every eigen-angle of the unitary of `K(λ)` relative to
/// `ell` turns clockwise, and eigenvalues are the passes through angle `0`.
/// Steps are halved until the rotation of `det W` is small and additive over
/// the two halves, so no full turn goes unseen.
pub fn eigenvalues_in(
    cauchy: &Cauchy<'_>,
    ell: &LagrangianFrame,
    lo: f64,
    hi: f64,
) -> Result<Vec<Eigenvalue>> {
    if !(hi > lo) {
        return Err(Error::InvalidInput(format!("empty window [{lo}, {hi}]")));
    }
    let n = ((hi - lo) / LAMBDA_GRID).ceil().max(1.0) as usize;
    let mut nodes = Vec::with_capacity(n + 1);
    for i in 0..=n {
        nodes.push(node(cauchy, ell, lo + (hi - lo) * i as f64 / n as f64)?);
    }
    let mut out: Vec<Eigenvalue> = Vec::new();
    for w in nodes.windows(2) {
        let mut stack = vec![(w[0], w[1])];
        while let Some((a, b)) = stack.pop() {
            let mid = node(cauchy, ell, 0.5 * (a.lambda + b.lambda))?;
            let whole = rotation(&a, &b);
            let additive = (whole - rotation(&a, &mid) - rotation(&mid, &b)).abs() < 1e-7;
            let width = b.lambda - a.lambda;
            if (!additive || whole > FRAC_PI_2) && width > LOCATE_WIDTH {
                stack.push((mid, b));
                stack.push((a, mid));
                continue;
            }
            let k = wraps(&a, &b).ok_or(Error::RootIsolation { lambda: a.lambda })?;
            if k == 0 {
                continue;
            }
            if width <= LOCATE_WIDTH {
                out.push(Eigenvalue {
                    lambda: mid.lambda,
                    multiplicity: k,
                });
            } else {
                stack.push((mid, b));
                stack.push((a, mid));
            }
        }
    }
    out.sort_by(|x, y| x.lambda.total_cmp(&y.lambda));
    let mut merged: Vec<Eigenvalue> = Vec::new();
    for e in out {
        match merged.last_mut() {
            Some(last) if e.lambda - last.lambda < MERGE_WIDTH => {
                last.multiplicity += e.multiplicity
            }
            _ => merged.push(e),
        }
    }
    Ok(merged)
}

/// Eigenvalues on one arc with boundary condition `boundary`.
pub fn eigenvalues_on_arc(
    fam: &OperatorFamily,
    side: Side,
    t: f64,
    boundary: &LagrangianFrame,
    window: (f64, f64),
) -> Result<Vec<Eigenvalue>> {
    let (a, b) = side.arc();
    let plan = ArcPlan::new(fam, t, a, b);
    let k = |l: f64| graph_frame(&plan.solve_checked(l, a, b)?);
    eigenvalues_in(&k, boundary, window.0, window.1)
}

/// Periodic solutions: boundary values `(f(0), f(2π))` on the diagonal.
pub fn periodic_boundary() -> LagrangianFrame {
    graph_frame(&Mat2::identity()).expect("diagonal is Lagrangian")
}

/// Eigenvalues of `A + C_t` on the whole circle.
pub fn eigenvalues_on_circle(
    fam: &OperatorFamily,
    t: f64,
    window: (f64, f64),
) -> Result<Vec<Eigenvalue>> {
    let plan = ArcPlan::new(fam, t, 0.0, 2.0 * PI);
    let k = |l: f64| graph_frame(&plan.solve_checked(l, 0.0, 2.0 * PI)?);
    eigenvalues_in(&k, &periodic_boundary(), window.0, window.1)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralFlow {
    pub report: IndexReport,
    pub t_samples: usize,
    /// Longest `t`-stretch over which some eigenvalue stayed within `1e-4`
    /// of zero, exact zeros included.
    pub near_zero_stretch: f64,
}

struct Level {
    t: f64,
    /// Intersection dimension of `K(t, 0)` with the boundary.
    zero: usize,
    /// Positive eigenvalues after removing the `zero` ones closest to `0`.
    rest: Vec<f64>,
}

/// Cauchy data at a fixed `t`, as a function of `λ`.
pub type CauchyAt<'a> = Box<dyn Fn(f64) -> Result<LagrangianFrame> + Sync + 'a>;
type Family<'a> = dyn Fn(f64) -> CauchyAt<'a> + Sync + 'a;

fn level(k: &Family<'_>, ell: &LagrangianFrame, t: f64) -> Result<Level> {
    let cauchy = k(t);
    let eig = eigenvalues_in(&*cauchy, ell, -WINDOW, WINDOW)?;
    let zero = cauchy(0.0)?.intersection_dim(ell)?;
    let mut flat: Vec<f64> = eig
        .iter()
        .flat_map(|e| std::iter::repeat_n(e.lambda, e.multiplicity))
        .collect();
    flat.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let rest = flat.into_iter().skip(zero).collect();
    Ok(Level { t, zero, rest })
}

fn min_abs(l: &Level) -> f64 {
    l.rest.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()))
}

/// Picks a level `a` in `(0, WINDOW)` farther than `margin` from every
/// eigenvalue at both ends of a step.
fn cut_level(a: &Level, b: &Level, margin: f64) -> Option<f64> {
    let mut pts: Vec<f64> = a
        .rest
        .iter()
        .chain(&b.rest)
        .copied()
        .filter(|&x| x > 0.0 && x < WINDOW)
        .collect();
    pts.push(0.0);
    pts.push(WINDOW);
    pts.sort_by(f64::total_cmp);
    for w in pts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if mid - w[0] > margin && mid > margin && WINDOW - mid > margin {
            return Some(mid);
        }
    }
    None
}

fn count_halves(l: &Level, cut: f64, convention: EndpointConvention) -> i64 {
    let pos = l.rest.iter().filter(|&&x| x > 0.0 && x < cut).count() as i64;
    match convention {
        EndpointConvention::Symmetric => 2 * pos + l.zero as i64,
        EndpointConvention::LeftClosed => 2 * pos,
    }
}

/// Spectral flow of the family of boundary problems `t ↦ (K(t, ·), ell)`.
///
/// Over each `t`-step the eigenvalues move at most `speed·h`; the step is
/// measured by the change in the number of eigenvalues in `(0, a)` for a
/// level `a` that no eigenvalue can reach. Zero eigenvalues at sample
/// points count half under the symmetric convention.
pub fn spectral_flow(
    k: &Family<'_>,
    ell: &LagrangianFrame,
    speed: f64,
    convention: EndpointConvention,
) -> Result<SpectralFlow> {
    let mut levels: Vec<Level> = (0..=INITIAL_T_STEPS)
        .into_par_iter()
        .map(|i| level(k, ell, i as f64 / INITIAL_T_STEPS as f64))
        .collect::<Result<_>>()?;
    let speed = speed * SPEED_FACTOR;
    let mut crossings = Vec::new();
    let mut i = 0;
    while i + 1 < levels.len() {
        let (a, b) = (&levels[i], &levels[i + 1]);
        let h = b.t - a.t;
        let near = (min_abs(a) < NEAR_ZERO || min_abs(b) < NEAR_ZERO) && h > NEAR_ZERO_STEP;
        let cut = if near {
            None
        } else {
            cut_level(a, b, speed * h + 1e-9)
        };
        let Some(cut) = cut else {
            if h < MIN_INTERVAL {
                return Err(Error::TrackingAmbiguous { t0: a.t, t1: b.t });
            }
            let mid = level(k, ell, 0.5 * (a.t + b.t))?;
            levels.insert(i + 1, mid);
            continue;
        };
        let d = count_halves(b, cut, convention) - count_halves(a, cut, convention);
        if d != 0 {
            crossings.push(Crossing {
                t: 0.5 * (a.t + b.t),
                dim: d.unsigned_abs() as usize / 2,
                contribution: HalfInteger::from_halves(d),
            });
        }
        i += 1;
    }
    let mut stretch = 0.0f64;
    let mut start: Option<f64> = None;
    for l in &levels {
        if l.zero > 0 || min_abs(l) < 1e-4 {
            let s = *start.get_or_insert(l.t);
            stretch = stretch.max(l.t - s);
        } else {
            start = None;
        }
    }
    Ok(SpectralFlow {
        report: IndexReport::from_crossings(crossings, Method::EigenvalueCount),
        t_samples: levels.len(),
        near_zero_stretch: stretch,
    })
}

/// Spectral flow of `A_ℓ + C_t` on one arc with a fixed boundary Lagrangian.
pub fn spectral_flow_arc(
    fam: &OperatorFamily,
    side: Side,
    boundary: &LagrangianFrame,
    convention: EndpointConvention,
) -> Result<SpectralFlow> {
    let (a, b) = side.arc();
    let k = |t: f64| -> CauchyAt<'_> {
        let plan = ArcPlan::new(fam, t, a, b);
        Box::new(move |l| graph_frame(&plan.solve_checked(l, a, b)?))
    };
    spectral_flow(&k, boundary, fam.t_speed(), convention)
}

/// Spectral flow of `A + C_t` on the whole circle.
pub fn spectral_flow_circle(
    fam: &OperatorFamily,
    convention: EndpointConvention,
) -> Result<SpectralFlow> {
    let k = |t: f64| -> CauchyAt<'_> {
        let plan = ArcPlan::new(fam, t, 0.0, 2.0 * PI);
        Box::new(move |l| graph_frame(&plan.solve_checked(l, 0.0, 2.0 * PI)?))
    };
    spectral_flow(&k, &periodic_boundary(), fam.t_speed(), convention)
}

/// Circle eigenvalues of the ramp `C = t·Id`: `t + k`, each twice.
pub fn ramp_circle_eigenvalues(t: f64, window: (f64, f64)) -> Vec<Eigenvalue> {
    let mut out = Vec::new();
    let k0 = (window.0 - t).ceil() as i64;
    let k1 = (window.1 - t).floor() as i64;
    for k in k0..=k1 {
        out.push(Eigenvalue {
            lambda: t + k as f64,
            multiplicity: 2,
        });
    }
    out
}
