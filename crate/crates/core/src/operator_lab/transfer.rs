//! Fundamental solutions of `σ f′ + C(u, t) f = λ f`, i.e. `f′ = σ (C − λ) f`.

use std::f64::consts::PI;

use super::family::{sigma, Coefficient, Mat2, OperatorFamily};
use crate::error::{Error, Result};

/// `exp(G)` for a traceless `2 × 2` matrix, using `G² = −det(G)·Id`.
pub fn exp_traceless(g: &Mat2) -> Mat2 {
    let delta = -g.determinant();
    let (c, s) = if delta.abs() < 1e-8 {
        // Taylor to third order in delta.
        (
            1.0 + delta / 2.0 + delta * delta / 24.0 + delta * delta * delta / 720.0,
            1.0 + delta / 6.0 + delta * delta / 120.0 + delta * delta * delta / 5040.0,
        )
    } else if delta > 0.0 {
        let r = delta.sqrt();
        (r.cosh(), r.sinh() / r)
    } else {
        let r = (-delta).sqrt();
        (r.cos(), r.sin() / r)
    };
    Mat2::identity() * c + g * s
}

fn generator(fam: &OperatorFamily, u: f64, t: f64, lambda: f64) -> Mat2 {
    sigma() * (fam.c(u, t) - Mat2::identity() * lambda)
}

/// One fourth-order Magnus step over `[u, u + h]`.
fn magnus_step(fam: &OperatorFamily, u: f64, h: f64, t: f64, lambda: f64) -> Mat2 {
    let (a, b) = gauss_nodes(u, h);
    magnus_from(
        &generator(fam, a, t, lambda),
        &generator(fam, b, t, lambda),
        h,
    )
}

fn gauss_nodes(u: f64, h: f64) -> (f64, f64) {
    let r = 3f64.sqrt() / 6.0;
    (u + (0.5 - r) * h, u + (0.5 + r) * h)
}

fn magnus_from(g1: &Mat2, g2: &Mat2, h: f64) -> Mat2 {
    let omega = (g1 + g2) * (h / 2.0) + (g2 * g1 - g1 * g2) * (3f64.sqrt() * h * h / 12.0);
    exp_traceless(&omega)
}

fn smooth_segment(
    fam: &OperatorFamily,
    a: f64,
    b: f64,
    t: f64,
    lambda: f64,
    per_unit: usize,
) -> Mat2 {
    let n = ((b - a) * per_unit as f64).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let mut m = Mat2::identity();
    for i in 0..n {
        m = magnus_step(fam, a + i as f64 * h, h, t, lambda) * m;
    }
    m
}

enum Step {
    /// `σC` on a segment of length `h` where `C` is constant.
    Exact { sc: Mat2, h: f64 },
    /// `σC` at the two Gauss nodes of a Magnus step.
    Magnus { sc1: Mat2, sc2: Mat2, h: f64 },
}

/// The steps of the transfer over `[u0, u1]` at a fixed `t`, with `C`
/// sampled once so that many levels `λ` can be solved cheaply.
pub struct ArcPlan {
    steps: Vec<Step>,
}

impl ArcPlan {
    pub fn new(fam: &OperatorFamily, t: f64, u0: f64, u1: f64) -> Self {
        let s = sigma();
        let mut steps = Vec::new();
        for w in fam.breakpoints(u0, u1).windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            if fam.is_piecewise() {
                steps.push(Step::Exact {
                    sc: s * fam.c(0.5 * (a + b), t),
                    h: b - a,
                });
            } else {
                let n = ((b - a) * fam.steps_per_unit as f64).ceil().max(1.0) as usize;
                let h = (b - a) / n as f64;
                for i in 0..n {
                    let (x, y) = gauss_nodes(a + i as f64 * h, h);
                    steps.push(Step::Magnus {
                        sc1: s * fam.c(x, t),
                        sc2: s * fam.c(y, t),
                        h,
                    });
                }
            }
        }
        ArcPlan { steps }
    }

    pub fn solve(&self, lambda: f64) -> Mat2 {
        let ls = sigma() * lambda;
        let mut m = Mat2::identity();
        for step in &self.steps {
            let e = match step {
                Step::Exact { sc, h } => exp_traceless(&((sc - ls) * *h)),
                Step::Magnus { sc1, sc2, h } => magnus_from(&(sc1 - ls), &(sc2 - ls), *h),
            };
            m = e * m;
        }
        m
    }

    /// `solve` with the unimodularity check of `arc_transfer`.
    pub fn solve_checked(&self, lambda: f64, u0: f64, u1: f64) -> Result<Mat2> {
        check_unimodular(self.solve(lambda), u0, u1)
    }
}

fn segment(fam: &OperatorFamily, a: f64, b: f64, t: f64, lambda: f64) -> Mat2 {
    match &fam.coeff {
        Coefficient::Piecewise(_) => {
            exp_traceless(&(generator(fam, 0.5 * (a + b), t, lambda) * (b - a)))
        }
        _ => smooth_segment(fam, a, b, t, lambda, fam.steps_per_unit),
    }
}

/// The transfer matrix `f(u₀) ↦ f(u₁)` for `0 ≤ u₀ ≤ u₁ ≤ 2π`.
pub fn transfer(fam: &OperatorFamily, t: f64, lambda: f64, u0: f64, u1: f64) -> Mat2 {
    let bp = fam.breakpoints(u0, u1);
    let mut m = Mat2::identity();
    for w in bp.windows(2) {
        if w[1] > w[0] {
            m = segment(fam, w[0], w[1], t, lambda) * m;
        }
    }
    m
}

fn check_unimodular(m: Mat2, u0: f64, u1: f64) -> Result<Mat2> {
    let det = m.determinant();
    if !det.is_finite() || (det - 1.0).abs() > 1e-8 * m.norm_squared().max(1.0) {
        return Err(Error::Integrator {
            from: u0,
            to: u1,
            reason: format!("determinant {det:.3e}"),
        });
    }
    Ok(m)
}

/// Transfer across an arc, checked for unimodularity (the flow preserves
/// `σ`, so `det = 1`).
pub fn arc_transfer(fam: &OperatorFamily, t: f64, lambda: f64, u0: f64, u1: f64) -> Result<Mat2> {
    check_unimodular(transfer(fam, t, lambda, u0, u1), u0, u1)
}

/// Transfer once around the circle starting at `0`.
pub fn monodromy(fam: &OperatorFamily, t: f64, lambda: f64) -> Result<Mat2> {
    arc_transfer(fam, t, lambda, 0.0, 2.0 * PI)
}

/// Doubles the integrator resolution until the local error of a step,
/// estimated by step doubling, is below `1e-10` at a spread of `(u, t, λ)`
/// probes.
pub(super) fn calibrate_steps(fam: &OperatorFamily) -> Result<usize> {
    let levels = [-3.0, 0.0, 3.0];
    let mut per_unit = 4usize;
    while per_unit <= 1 << 14 {
        let h = 1.0 / per_unit as f64;
        let mut worst = 0.0f64;
        for i in 0..32 {
            let u = 2.0 * PI * i as f64 / 32.0;
            for t in [0.0, 0.5, 1.0] {
                for &l in &levels {
                    let one = magnus_step(fam, u, h, t, l);
                    let two = magnus_step(fam, u + h / 2.0, h / 2.0, t, l)
                        * magnus_step(fam, u, h / 2.0, t, l);
                    worst = worst.max((one - two).norm());
                }
            }
        }
        if worst < 1e-10 {
            return Ok(per_unit);
        }
        per_unit *= 2;
    }
    Err(Error::Integrator {
        from: 0.0,
        to: 2.0 * PI,
        reason: "step calibration did not converge".into(),
    })
}
