use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeSet;

use super::{TangentialSpectrum, TraceSide, TraceSpace};
use crate::error::{Error, Result};
use crate::index::IndexReport;
use crate::linalg;
use crate::symplectic::{
    maslov_crossing, random, LagrangianFrame, LagrangianPath, SymplecticSpace,
};
use crate::tol::{EndpointConvention, RANK_TOL};

/// A large space `𝓑` (the plus side) and a small space `L` (the minus side)
/// over the same spectrum, linked by the inclusions `i₊: L₊ → θ₊` and
/// `i₋: θ₋ → L₋`, together with a finite set `F` of pairs whose roles are
/// exchanged.
#[derive(Debug, Clone)]
pub struct ReductionSetup {
    pub big: TraceSpace,
    pub small: TraceSpace,
    /// Pairs `k` with `φ_{∓k}` moved into `F` and its partner into `G`.
    pub f_pairs: BTreeSet<usize>,
}

impl ReductionSetup {
    pub fn new(spectrum: TangentialSpectrum) -> Self {
        ReductionSetup {
            big: TraceSpace::new(spectrum.clone(), TraceSide::Plus),
            small: TraceSpace::new(spectrum, TraceSide::Minus),
            f_pairs: BTreeSet::new(),
        }
    }

    pub fn spectrum(&self) -> &TangentialSpectrum {
        &self.small.spectrum
    }

    pub fn dim_f(&self) -> usize {
        self.f_pairs.len()
    }

    /// Diagonal of `i₊` in orthonormal coordinates, one entry per pair.
    pub fn i_plus(&self) -> Vec<f64> {
        let (wb, ws) = (self.big.weights(), self.small.weights());
        self.spectrum()
            .plus_axes()
            .iter()
            .map(|&a| wb[a] / ws[a])
            .collect()
    }

    /// Diagonal of `i₋` in orthonormal coordinates, one entry per pair.
    pub fn i_minus(&self) -> Vec<f64> {
        let (wb, ws) = (self.big.weights(), self.small.weights());
        self.spectrum()
            .minus_axes()
            .iter()
            .map(|&a| ws[a] / wb[a])
            .collect()
    }

    /// `max |ω_𝓑(i₊a, x) − ω_L(a, i₋x)|` over random `a ∈ L₊`, `x ∈ θ₋`.
    pub fn compatibility_defect<R: Rng>(&self, rng: &mut R, samples: usize) -> f64 {
        let plus = self.spectrum().plus_axes();
        let minus = self.spectrum().minus_axes();
        let (ip, im) = (self.i_plus(), self.i_minus());
        let n = self.small.dim();
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let mut a = DVector::zeros(n);
            let mut x = DVector::zeros(n);
            let mut ia = DVector::zeros(n);
            let mut ix = DVector::zeros(n);
            for p in 0..plus.len() {
                a[plus[p]] = rng.gen_range(-1.0..1.0);
                x[minus[p]] = rng.gen_range(-1.0..1.0);
                ia[plus[p]] = ip[p] * a[plus[p]];
                ix[minus[p]] = im[p] * x[minus[p]];
            }
            let lhs = self.big.space().omega_vec(&ia, &x);
            let rhs = self.small.space().omega_vec(&a, &ix);
            worst = worst.max((lhs - rhs).abs());
        }
        worst
    }

    fn swapped_axes(&self, in_f: bool) -> Vec<usize> {
        let s = self.spectrum();
        let (plus, minus) = (s.plus_axes(), s.minus_axes());
        (0..plus.len())
            .map(|p| {
                if self.f_pairs.contains(&(p + 1)) == in_f {
                    plus[p]
                } else {
                    minus[p]
                }
            })
            .collect()
    }

    /// `λ₋ = F′ + i₊(G)` in `𝓑`.
    pub fn lambda_minus(&self) -> LagrangianFrame {
        LagrangianFrame::coordinate(self.big.space(), &self.swapped_axes(true))
            .expect("coordinate half")
    }

    /// `λ₊ = F + i₊(G′)` in `𝓑`.
    pub fn lambda_plus(&self) -> LagrangianFrame {
        LagrangianFrame::coordinate(self.big.space(), &self.swapped_axes(false))
            .expect("coordinate half")
    }

    /// `i₋(F) + G′` in `L`.
    pub fn l_plus_swapped(&self) -> LagrangianFrame {
        LagrangianFrame::coordinate(self.small.space(), &self.swapped_axes(false))
            .expect("coordinate half")
    }
}

/// `τ(ν) = {b + a : i₊(b) + x ∈ ν for some x ∈ θ₋, a = i₋(x)}`.
///
/// Writing `ν` as the span of `[X₊; X₋]`, each pair gives `b = X₊c / i₊`
/// and `a = i₋ X₋ c`.
pub fn reduce_lagrangian(setup: &ReductionSetup, nu: &LagrangianFrame) -> Result<LagrangianFrame> {
    if !nu.space().same_as(setup.big.space()) {
        return Err(Error::InvalidInput(
            "Lagrangian is not in the large space".into(),
        ));
    }
    let s = setup.spectrum();
    let (plus, minus) = (s.plus_axes(), s.minus_axes());
    let (ip, im) = (setup.i_plus(), setup.i_minus());
    let x = nu.frame();
    let mut y = DMatrix::zeros(x.nrows(), x.ncols());
    for p in 0..plus.len() {
        if ip[p] < RANK_TOL {
            return Err(Error::RankDeficient { sigma: ip[p] });
        }
        for c in 0..x.ncols() {
            y[(plus[p], c)] = x[(plus[p], c)] / ip[p];
            y[(minus[p], c)] = im[p] * x[(minus[p], c)];
        }
    }
    LagrangianFrame::new(setup.small.space(), y)
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitReduce {
    pub before: IndexReport,
    pub after: IndexReport,
    /// Largest `dim(c(t) ∩ θ₋)` over the stored samples.
    pub max_reference_intersection: usize,
}

impl SplitReduce {
    pub fn agrees(&self) -> bool {
        self.before.value == self.after.value
    }
}

/// Maslov index of a path in `𝓑` against `θ₋` and of its reduction in `L`
/// against `L₋`.
pub fn split_and_reduce(
    setup: &ReductionSetup,
    path: &LagrangianPath,
    convention: EndpointConvention,
) -> Result<SplitReduce> {
    let theta_minus = setup.big.theta_minus();
    let before = maslov_crossing(path, &theta_minus, convention)?;
    let mut max_reference_intersection = 0;
    for (_, f) in path.samples() {
        max_reference_intersection =
            max_reference_intersection.max(f.intersection_dim(&theta_minus)?);
    }
    let (st, p) = (setup.clone(), path.clone());
    let reduced = LagrangianPath::from_fn(move |t| reduce_lagrangian(&st, &p.frame_at(t)?))?;
    let after = maslov_crossing(&reduced, &setup.small.theta_minus(), convention)?;
    Ok(SplitReduce {
        before,
        after,
        max_reference_intersection,
    })
}

/// Greedily moves pairs into `F` until `λ₋ = F′ + i₊(G)` is transversal to
/// `target`. Each step swaps the `λ₋` axis carrying the most weight of the
/// current intersection.
pub fn choose_fg(
    setup: &ReductionSetup,
    target: &LagrangianFrame,
    bound: usize,
) -> Result<ReductionSetup> {
    let mut s = setup.clone();
    s.f_pairs.clear();
    loop {
        let lm = s.lambda_minus();
        let common = linalg::intersection_basis(target.frame(), lm.frame())?;
        if common.ncols() == 0 {
            return Ok(s);
        }
        if s.f_pairs.len() >= bound {
            return Err(Error::SearchExhausted { bound });
        }
        let axes = s.swapped_axes(true);
        let best = (0..axes.len())
            .filter(|p| !s.f_pairs.contains(&(p + 1)))
            .max_by(|&a, &b| {
                let wa = common.row(axes[a]).norm();
                let wb = common.row(axes[b]).norm();
                wa.total_cmp(&wb).then(b.cmp(&a))
            })
            .ok_or(Error::SearchExhausted { bound })?;
        s.f_pairs.insert(best + 1);
    }
}

/// Random path in `𝓑` that moves only inside one to three blocks of one or
/// two mode pairs and is a fixed graph over `θ₊` elsewhere.
pub fn random_block_path<R: Rng>(
    rng: &mut R,
    setup: &ReductionSetup,
    scale: f64,
) -> Result<LagrangianPath> {
    let s = setup.spectrum().clone();
    let k = s.order();
    let mut free: Vec<usize> = (1..=k).collect();
    let mut blocks = Vec::new();
    for _ in 0..rng.gen_range(1..=3usize.min(k)) {
        let m = if free.len() >= 2 {
            rng.gen_range(1..=2)
        } else {
            1
        };
        let mut pairs = Vec::with_capacity(m);
        for _ in 0..m {
            pairs.push(free.swap_remove(rng.gen_range(0..free.len())));
        }
        let path = random::smooth_path(rng, &SymplecticSpace::standard(m), scale)?;
        blocks.push((pairs, path));
    }
    let slopes: Vec<(usize, f64)> = free
        .iter()
        .map(|&p| (p, rng.gen_range(-2.0..2.0)))
        .collect();
    let (plus, minus) = (s.plus_axes(), s.minus_axes());
    let space = setup.big.space().clone();
    LagrangianPath::from_fn(move |t| {
        let mut x = DMatrix::zeros(2 * k, k);
        let mut col = 0;
        for &(p, slope) in &slopes {
            x[(plus[p - 1], col)] = 1.0;
            x[(minus[p - 1], col)] = slope;
            col += 1;
        }
        for (pairs, path) in &blocks {
            let f = path.frame_at(t)?;
            let m = pairs.len();
            for c in 0..m {
                for (i, &p) in pairs.iter().enumerate() {
                    // Standard coordinates (q_i, p_i) go to (φ_k, φ_{−k}).
                    x[(s.axis(p as i64), col)] = f.frame()[(i, c)];
                    x[(s.axis(-(p as i64)), col)] = f.frame()[(m + i, c)];
                }
                col += 1;
            }
        }
        LagrangianFrame::new(&space, x)
    })
}
