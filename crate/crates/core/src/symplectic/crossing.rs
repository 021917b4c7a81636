//! Maslov index by crossing forms.

use nalgebra::DMatrix;

use super::{LagrangianFrame, LagrangianPath};
use crate::error::{Error, Result};
use crate::index::{Crossing, HalfInteger, IndexReport, Method};
use crate::linalg;
use crate::tol::{EndpointConvention, CROSSING_FORM_TOL, FD_STEP, RANK_TOL};

/// Subdivisions of every sample step before certification starts.
const SUBSTEPS: usize = 4;
/// Singular values below this at a located crossing span the intersection.
const CROSSING_DIM_TOL: f64 = 1e-6;
/// Uncertified steps are not split below this length. Crossings closer
/// than `MERGE_RADIUS` are merged anyway, so finer location buys nothing.
const RESOLUTION: f64 = 1e-8;
/// An uncertified interval whose best sample is farther than this from the
/// cycle is reported as ambiguous rather than counted.
const SUSPECT_TOL: f64 = 1e-4;
/// Located crossings closer than this are the same crossing.
const MERGE_RADIUS: f64 = 1e-7;
/// Steps at least this long are checked through the frames themselves,
/// which vary continuously and so reveal a half turn that brings the span
/// back to itself. Shorter steps use the span only, so a discontinuous
/// choice of basis cannot stall the search.
const ORIENTED_STEP: f64 = 1e-6;
/// Longest chord (spectral bound on the change of `(JR)ᵀX`) a step may have
/// and still be certified.
const MAX_CHORD: f64 = 0.5;
/// Multiplier on the midpoint deviation used as the bound on the deviation
/// of the whole step from its chord.
const BOW_SAFETY: f64 = 2.0;

/// The quadratic crossing form of `path` against `reference` at `t`, in the
/// coordinates of an orthonormal basis of the intersection.
///
/// The path is written near `t` as the graph of a symmetric map from `c(t)`
/// to `J c(t)`; the form is the derivative of that map restricted to the
/// intersection.
pub fn crossing_form(
    path: &LagrangianPath,
    reference: &LagrangianFrame,
    t: f64,
) -> Result<DMatrix<f64>> {
    crossing_form_within(path, reference, t, CROSSING_DIM_TOL)
}

/// [`crossing_form`] with the intersection spanned by singular values below
/// `dim_tol`.
fn crossing_form_within(
    path: &LagrangianPath,
    reference: &LagrangianFrame,
    t: f64,
    dim_tol: f64,
) -> Result<DMatrix<f64>> {
    let x = path.frame_at(t)?;
    let jr = reference.space().apply_j(reference.frame());
    let m = jr.transpose() * x.frame();
    let sv = linalg::singular_values_asc(&m);
    let d = sv.iter().filter(|&&s| s < dim_tol).count();
    if d == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let v = linalg::smallest_right_singular_vectors(&m, d);

    let jx = x.space().apply_j(x.frame());
    let chart = |s: f64| -> Result<DMatrix<f64>> {
        let y = path.frame_at(t + s)?;
        let base = x.frame().transpose() * y.frame();
        let inv = base
            .try_inverse()
            .ok_or(Error::NonRegularCrossing { t, min_eig: 0.0 })?;
        Ok(jx.transpose() * y.frame() * inv)
    };
    let h = FD_STEP;
    let deriv = if t - h < 0.0 {
        let (a1, a2) = (chart(h)?, chart(2.0 * h)?);
        (a1 * 4.0 - a2) / (2.0 * h)
    } else if t + h > 1.0 {
        let (a1, a2) = (chart(-h)?, chart(-2.0 * h)?);
        (a1 * 4.0 - a2) / (-2.0 * h)
    } else {
        (chart(h)? - chart(-h)?) / (2.0 * h)
    };
    let sym = (&deriv + deriv.transpose()) * 0.5;
    Ok(v.transpose() * sym * &v)
}

/// Maslov index of `path` against the Maslov cycle of `reference`, summing
/// signatures of crossing forms.
///
/// Interior crossings contribute their full signature; crossings at `t = 0`
/// and `t = 1` are weighted by `convention`.
pub fn maslov_crossing(
    path: &LagrangianPath,
    reference: &LagrangianFrame,
    convention: EndpointConvention,
) -> Result<IndexReport> {
    reference.check_same_space(path.start())?;
    if path.is_constant()? {
        return Ok(IndexReport::zero(Method::CrossingForm));
    }
    let jr = reference.space().apply_j(reference.frame());
    let located = locate_crossings(path, &jr)?;

    let mut crossings = Vec::with_capacity(located.len());
    for (t, dim_tol) in located {
        let q = crossing_form_within(path, reference, t, dim_tol)?;
        if q.nrows() == 0 {
            continue;
        }
        let eig = linalg::symmetric_eigenvalues_asc(&q);
        let min_abs = eig.iter().fold(f64::INFINITY, |m, e| m.min(e.abs()));
        if min_abs < CROSSING_FORM_TOL {
            return Err(Error::NonRegularCrossing {
                t,
                min_eig: min_abs,
            });
        }
        let pos = eig.iter().filter(|&&e| e > 0.0).count();
        let neg = eig.len() - pos;
        let halves = if t == 0.0 {
            convention.start_halves(pos, neg)
        } else if t == 1.0 {
            convention.end_halves(pos, neg)
        } else {
            2 * (pos as i64 - neg as i64)
        };
        crossings.push(Crossing {
            t,
            dim: eig.len(),
            contribution: HalfInteger::from_halves(halves),
        });
    }
    Ok(IndexReport::from_crossings(crossings, Method::CrossingForm))
}

/// `‖P_a − P_b‖_F`. It dominates the gap, so the distance to a Maslov cycle
/// is 1-Lipschitz for it too, and unlike the gap it is locally Euclidean
/// along smooth paths.
fn projector_distance(a: &LagrangianFrame, b: &LagrangianFrame) -> Result<f64> {
    let s = a.principal_sines(b)?;
    Ok((2.0 * s.iter().map(|x| x * x).sum::<f64>()).sqrt())
}

/// A sampled point of a one-parameter family of Lagrangians together with
/// `M = (JR)ᵀX` and its smallest singular value, the distance to the cycle.
pub(crate) struct Probe {
    pub t: f64,
    pub sigma: f64,
    pub m: DMatrix<f64>,
    pub frame: LagrangianFrame,
}

impl Probe {
    pub fn new(jr: &DMatrix<f64>, t: f64, frame: LagrangianFrame) -> Self {
        let m = jr.transpose() * frame.frame();
        let sigma = linalg::singular_values_asc(&m)[0];
        Probe { t, sigma, m, frame }
    }
}

/// `sqrt(‖A‖₁ ‖A‖_∞)`, an upper bound for the spectral norm.
fn spectral_bound(a: &DMatrix<f64>) -> f64 {
    let col = a
        .column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let row = a
        .row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    (col * row).sqrt()
}

/// A parameter interval that could not be certified free of the cycle,
/// with its sample closest to the cycle as `(t, distance)`.
pub(crate) struct Suspect {
    pub a: f64,
    pub b: f64,
    pub best: (f64, f64),
}

/// Whether the step `[l, r]` with midpoint sample `mid` stays off the cycle.
///
/// By Weyl's inequality the distance to the cycle moves by at most the
/// spectral norm of the change in `M`. If `M` stays within `ε` of the chord
/// from `M_l` to `M_r`, every interior point is at distance at least
/// `(σ_l + σ_r − ‖M_r − M_l‖)/2 − ε`. The deviation `ε` is estimated from the
/// midpoint with a safety factor, which also exposes a path turning back
/// inside the step.
fn step_is_clear(l: &Probe, mid: &Probe, r: &Probe) -> bool {
    let chord = spectral_bound(&(&r.m - &l.m));
    let bow = (&mid.m - (&l.m + &r.m) * 0.5).norm();
    chord <= MAX_CHORD && l.sigma + r.sigma > chord + 2.0 * BOW_SAFETY * bow
}

/// Certified search for parameters where `eval(s)` meets the Maslov cycle of
/// the Lagrangian whose `J`-image is `jr`, between consecutive `probes`.
///
/// Steps are checked with [`step_is_clear`] and bisected otherwise. Below
/// `ORIENTED_STEP` the test switches to the projector distance, for which
/// the distance to the cycle is 1-Lipschitz independently of the choice of
/// basis: a step whose end distances sum to more than twice that chord is
/// clear. Steps still uncertified at `RESOLUTION` are returned, adjacent
/// ones merged.
pub(crate) fn certified_zeros(
    eval: &dyn Fn(f64) -> Result<LagrangianFrame>,
    jr: &DMatrix<f64>,
    probes: Vec<Probe>,
) -> Result<Vec<Suspect>> {
    let mut raw: Vec<(f64, f64, (f64, f64))> = Vec::new();
    let mut iter = probes.into_iter();
    let Some(mut left) = iter.next() else {
        return Ok(Vec::new());
    };
    for next in iter {
        let mut stack = vec![(next, 0usize)];
        while let Some((right, depth)) = stack.pop() {
            let h = right.t - left.t;
            let tm = 0.5 * (left.t + right.t);
            let mid = if h >= ORIENTED_STEP {
                let mid = Probe::new(jr, tm, eval(tm)?);
                if step_is_clear(&left, &mid, &right) {
                    left = right;
                    continue;
                }
                Some(mid)
            } else {
                let chord = projector_distance(&left.frame, &right.frame)?;
                if left.sigma + right.sigma > 2.0 * chord {
                    left = right;
                    continue;
                }
                None
            };
            if h < RESOLUTION || depth > 64 {
                let best = if left.sigma <= right.sigma {
                    (left.t, left.sigma)
                } else {
                    (right.t, right.sigma)
                };
                raw.push((left.t, right.t, best));
                left = right;
                continue;
            }
            let mid = match mid {
                Some(m) => m,
                None => Probe::new(jr, tm, eval(tm)?),
            };
            stack.push((right, depth + 1));
            stack.push((mid, depth + 1));
        }
    }
    let mut out: Vec<Suspect> = Vec::new();
    for (a, b, best) in raw {
        if let Some(last) = out.last_mut() {
            if a - last.b <= MERGE_RADIUS {
                last.b = b;
                if best.1 < last.best.1 {
                    last.best = best;
                }
                continue;
            }
        }
        out.push(Suspect { a, b, best });
    }
    Ok(out)
}

/// Times where the path meets the Maslov cycle, each with the tolerance that
/// decides the intersection there; ends are reported when the end frames lie
/// on the cycle.
///
/// A fast path can stay uncertified down to `RESOLUTION` with no sample
/// inside `CROSSING_DIM_TOL`; the tolerance then widens to cover the best
/// sample, and an interval with no sample near the cycle is an error.
fn locate_crossings(path: &LagrangianPath, jr: &DMatrix<f64>) -> Result<Vec<(f64, f64)>> {
    let samples = path.samples();
    let mut probes = vec![Probe::new(jr, samples[0].0, samples[0].1.clone())];
    for w in samples.windows(2) {
        let (t0, t1) = (w[0].0, w[1].0);
        for k in 1..SUBSTEPS {
            let t = t0 + (t1 - t0) * k as f64 / SUBSTEPS as f64;
            probes.push(Probe::new(jr, t, path.frame_at(t)?));
        }
        probes.push(Probe::new(jr, t1, w[1].1.clone()));
    }
    let at_start = probes[0].sigma < RANK_TOL;
    let at_end = probes[probes.len() - 1].sigma < RANK_TOL;
    let eval = |t: f64| path.frame_at(t);
    let suspects = certified_zeros(&eval, jr, probes)?;

    let mut located: Vec<(f64, f64)> = Vec::new();
    if at_start {
        located.push((0.0, CROSSING_DIM_TOL));
    }
    for s in suspects {
        let touches_start = at_start && s.a <= MERGE_RADIUS;
        let touches_end = at_end && s.b >= 1.0 - MERGE_RADIUS;
        if touches_start || touches_end {
            continue;
        }
        let (t, sigma) = s.best;
        if sigma >= SUSPECT_TOL {
            return Err(Error::TrackingAmbiguous { t0: s.a, t1: s.b });
        }
        located.push((t, CROSSING_DIM_TOL.max(2.0 * sigma)));
    }
    if at_end {
        located.push((1.0, CROSSING_DIM_TOL));
    }
    Ok(located)
}
