use nalgebra::Matrix2;
use rand::Rng;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Mat2 = Matrix2<f64>;

/// The complex structure `[[0, −1], [1, 0]]`.
pub fn sigma() -> Mat2 {
    Mat2::new(0.0, -1.0, 1.0, 0.0)
}

/// `σ · diag(1, −1)`, the coefficient realizing a tangential term `b·diag(1, −1)`.
pub fn tangential() -> Mat2 {
    Mat2::new(0.0, 1.0, 1.0, 0.0)
}

pub fn sym2(a: f64, b: f64, c: f64) -> Mat2 {
    Mat2::new(a, b, b, c)
}

/// Which arc of the circle: `Minus = [0, π]`, `Plus = [π, 2π]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn arc(self) -> (f64, f64) {
        match self {
            Side::Minus => (0.0, PI),
            Side::Plus => (PI, 2.0 * PI),
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Minus => "minus",
            Side::Plus => "plus",
        }
    }
}

/// Fraction of each arc taken by a collar on each side of a cut point.
pub const COLLAR: f64 = 0.1;

/// `C` constant on `[u0, u1)`, piecewise linear in `t` through `values` at `knots`.
#[derive(Debug, Clone)]
pub struct Piece {
    pub u0: f64,
    pub u1: f64,
    pub knots: Vec<f64>,
    pub values: Vec<Mat2>,
}

impl Piece {
    pub fn linear(u0: f64, u1: f64, at0: Mat2, at1: Mat2) -> Self {
        Piece {
            u0,
            u1,
            knots: vec![0.0, 1.0],
            values: vec![at0, at1],
        }
    }

    pub fn constant(u0: f64, u1: f64, c: Mat2) -> Self {
        Piece::linear(u0, u1, c, c)
    }

    pub fn at(&self, t: f64) -> Mat2 {
        let k = &self.knots;
        if t <= k[0] {
            return self.values[0];
        }
        for i in 1..k.len() {
            if t <= k[i] {
                let s = (t - k[i - 1]) / (k[i] - k[i - 1]);
                return self.values[i - 1] * (1.0 - s) + self.values[i] * s;
            }
        }
        self.values[k.len() - 1]
    }

    /// Largest `‖∂C/∂t‖₂` over the knot intervals.
    fn t_speed(&self) -> f64 {
        (1..self.knots.len())
            .map(|i| {
                (self.values[i] - self.values[i - 1]).norm() / (self.knots[i] - self.knots[i - 1])
            })
            .fold(0.0, f64::max)
    }
}

/// `C(u, t) = Σ_m A_m(t) cos(mu) + B_m(t) sin(mu)`, each coefficient linear in `t`.
#[derive(Debug, Clone)]
pub struct TrigTerm {
    pub m: u32,
    pub cos: [Mat2; 2],
    pub sin: [Mat2; 2],
}

type CoefficientFn = dyn Fn(f64, f64) -> Mat2 + Send + Sync;

#[derive(Clone)]
pub enum Coefficient {
    Piecewise(Vec<Piece>),
    Trig(Vec<TrigTerm>),
    /// A smooth coefficient given as a function, with `u`-breakpoints where
    /// it may fail to be smooth and a bound on `‖∂C/∂t‖`.
    Function {
        f: Arc<CoefficientFn>,
        breaks: Vec<f64>,
        t_speed: f64,
    },
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Piecewise(p) => f.debug_tuple("Piecewise").field(p).finish(),
            Coefficient::Trig(t) => f.debug_tuple("Trig").field(t).finish(),
            Coefficient::Function {
                breaks, t_speed, ..
            } => f
                .debug_struct("Function")
                .field("breaks", breaks)
                .field("t_speed", t_speed)
                .finish(),
        }
    }
}

/// The family `A + C_t = σ d/du + C(u, t)` on the circle `[0, 2π)`.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    pub name: String,
    pub b0: f64,
    pub b1: f64,
    pub coeff: Coefficient,
    /// Integrator steps per unit length for smooth coefficients.
    pub steps_per_unit: usize,
}

fn trig_eval(terms: &[TrigTerm], u: f64, t: f64) -> Mat2 {
    let mut c = Mat2::zeros();
    for term in terms {
        let (s, co) = (term.m as f64 * u).sin_cos();
        let a = term.cos[0] * (1.0 - t) + term.cos[1] * t;
        let b = term.sin[0] * (1.0 - t) + term.sin[1] * t;
        c += a * co + b * s;
    }
    c
}

impl OperatorFamily {
    fn build(name: &str, b0: f64, b1: f64, coeff: Coefficient) -> Result<Self> {
        let mut fam = OperatorFamily {
            name: name.to_string(),
            b0,
            b1,
            coeff,
            steps_per_unit: 0,
        };
        if let Coefficient::Piecewise(pieces) = &fam.coeff {
            check_cover(pieces)?;
        }
        if !matches!(fam.coeff, Coefficient::Piecewise(_)) {
            fam.steps_per_unit = super::transfer::calibrate_steps(&fam)?;
        }
        Ok(fam)
    }

    pub fn piecewise(name: &str, b0: f64, b1: f64, pieces: Vec<Piece>) -> Result<Self> {
        Self::build(name, b0, b1, Coefficient::Piecewise(pieces))
    }

    pub fn trig(name: &str, terms: Vec<TrigTerm>) -> Result<Self> {
        Self::build(name, 0.0, 0.0, Coefficient::Trig(terms))
    }

    pub fn from_fn<F>(
        name: &str,
        b0: f64,
        b1: f64,
        breaks: Vec<f64>,
        t_speed: f64,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64, f64) -> Mat2 + Send + Sync + 'static,
    {
        Self::build(
            name,
            b0,
            b1,
            Coefficient::Function {
                f: Arc::new(f),
                breaks,
                t_speed,
            },
        )
    }

    /// `C ≡ c` for all `t`.
    pub fn constant(c: Mat2) -> Result<Self> {
        Self::piecewise(
            "constant",
            0.0,
            0.0,
            vec![Piece::constant(0.0, 2.0 * PI, c)],
        )
    }

    /// `C(u, t) = t·Id`.
    pub fn ramp() -> Result<Self> {
        Self::piecewise(
            "ramp",
            0.0,
            0.0,
            vec![Piece::linear(
                0.0,
                2.0 * PI,
                Mat2::zeros(),
                Mat2::identity(),
            )],
        )
    }

    /// Product-form family: collars of width `COLLAR·π` around the cut points
    /// carry `∓b(t)·σ diag(1, −1)` with `b(t) = (1 − t) b₀ + t b₁`, and the
    /// interiors of the two arcs carry the given pieces.
    pub fn with_collars(
        name: &str,
        b0: f64,
        b1: f64,
        minus: Vec<Piece>,
        plus: Vec<Piece>,
    ) -> Result<Self> {
        let w = COLLAR * PI;
        let p = tangential();
        let mut pieces = vec![Piece::linear(0.0, w, -p * b0, -p * b1)];
        pieces.extend(minus);
        pieces.push(Piece::linear(PI - w, PI + w, p * b0, p * b1));
        pieces.extend(plus);
        pieces.push(Piece::linear(2.0 * PI - w, 2.0 * PI, -p * b0, -p * b1));
        Self::piecewise(name, b0, b1, pieces)
    }

    /// Random product-form family with 2 to 4 constant pieces inside each arc.
    /// A loop family returns to its starting coefficient at `t = 1`.
    pub fn random_piecewise<R: Rng>(rng: &mut R, is_loop: bool, scale: f64) -> Result<Self> {
        let b0 = random_b(rng);
        let b1 = if is_loop { b0 } else { random_b(rng) };
        let w = COLLAR * PI;
        let interior = |rng: &mut R, a: f64, b: f64| -> Vec<Piece> {
            let n = rng.gen_range(2..=4);
            let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(a..b)).collect();
            cuts.sort_by(f64::total_cmp);
            cuts.insert(0, a);
            cuts.push(b);
            cuts.windows(2)
                .map(|c| {
                    let s0 = random_sym(rng, scale);
                    if is_loop {
                        let mid = random_sym(rng, scale);
                        Piece {
                            u0: c[0],
                            u1: c[1],
                            knots: vec![0.0, 0.5, 1.0],
                            values: vec![s0, mid, s0],
                        }
                    } else {
                        Piece::linear(c[0], c[1], s0, random_sym(rng, scale))
                    }
                })
                .collect()
        };
        let minus = interior(rng, w, PI - w);
        let plus = interior(rng, PI + w, 2.0 * PI - w);
        let name = if is_loop {
            "random-loop"
        } else {
            "random-piecewise"
        };
        Self::with_collars(name, b0, b1, minus, plus)
    }

    /// Random trigonometric family of degree at most 3.
    pub fn random_trig<R: Rng>(rng: &mut R, scale: f64) -> Result<Self> {
        let degree = rng.gen_range(1..=3);
        let terms = (0..=degree)
            .map(|m| {
                let s = scale / (1.0 + m as f64);
                let pair = |rng: &mut R| [random_sym(rng, s), random_sym(rng, s)];
                let cos = pair(rng);
                let sin = if m == 0 {
                    [Mat2::zeros(); 2]
                } else {
                    pair(rng)
                };
                TrigTerm { m, cos, sin }
            })
            .collect();
        Self::trig("random-trig", terms)
    }

    /// `C(u, t)`, with `u` reduced to `[0, 2π)`.
    pub fn c(&self, u: f64, t: f64) -> Mat2 {
        let u = u.rem_euclid(2.0 * PI);
        match &self.coeff {
            Coefficient::Piecewise(pieces) => {
                let i = pieces.partition_point(|p| p.u1 <= u).min(pieces.len() - 1);
                pieces[i].at(t)
            }
            Coefficient::Trig(terms) => trig_eval(terms, u, t),
            Coefficient::Function { f, .. } => f(u, t),
        }
    }

    /// An upper bound for `sup_u ‖∂C/∂t‖₂`, which bounds eigenvalue speed.
    pub fn t_speed(&self) -> f64 {
        match &self.coeff {
            Coefficient::Piecewise(pieces) => pieces.iter().map(Piece::t_speed).fold(0.0, f64::max),
            Coefficient::Trig(terms) => terms
                .iter()
                .map(|tt| (tt.cos[1] - tt.cos[0]).norm() + (tt.sin[1] - tt.sin[0]).norm())
                .sum(),
            Coefficient::Function { t_speed, .. } => *t_speed,
        }
    }

    /// Points in `[u0, u1]` where `C` may jump, including the ends.
    pub fn breakpoints(&self, u0: f64, u1: f64) -> Vec<f64> {
        let mut out = vec![u0];
        let inner: Vec<f64> = match &self.coeff {
            Coefficient::Piecewise(pieces) => pieces.iter().map(|p| p.u0).collect(),
            Coefficient::Trig(_) => Vec::new(),
            Coefficient::Function { breaks, .. } => breaks.clone(),
        };
        out.extend(inner.into_iter().filter(|&b| b > u0 && b < u1));
        out.push(u1);
        out
    }

    pub fn is_piecewise(&self) -> bool {
        matches!(self.coeff, Coefficient::Piecewise(_))
    }

    /// `b(t) = (1 − t) b₀ + t b₁`.
    pub fn b_at(&self, t: f64) -> f64 {
        (1.0 - t) * self.b0 + t * self.b1
    }

    /// The same family run backwards in `t`.
    pub fn reversed(&self) -> Result<Self> {
        let coeff = match &self.coeff {
            Coefficient::Piecewise(pieces) => Coefficient::Piecewise(
                pieces
                    .iter()
                    .map(|p| Piece {
                        u0: p.u0,
                        u1: p.u1,
                        knots: p.knots.iter().rev().map(|k| 1.0 - k).collect(),
                        values: p.values.iter().rev().copied().collect(),
                    })
                    .collect(),
            ),
            Coefficient::Trig(terms) => Coefficient::Trig(
                terms
                    .iter()
                    .map(|tt| TrigTerm {
                        m: tt.m,
                        cos: [tt.cos[1], tt.cos[0]],
                        sin: [tt.sin[1], tt.sin[0]],
                    })
                    .collect(),
            ),
            Coefficient::Function { f, breaks, t_speed } => {
                let f = Arc::clone(f);
                Coefficient::Function {
                    f: Arc::new(move |u, t| f(u, 1.0 - t)),
                    breaks: breaks.clone(),
                    t_speed: *t_speed,
                }
            }
        };
        Ok(OperatorFamily {
            name: format!("{}-reversed", self.name),
            b0: self.b1,
            b1: self.b0,
            coeff,
            steps_per_unit: self.steps_per_unit,
        })
    }

    /// Samples the collars: `C` must be constant in `u` there and `−σC` must
    /// anticommute with `σ`. Returns the largest violation of each.
    pub fn collar_defects(&self) -> (f64, f64) {
        let w = COLLAR * PI;
        let collars = [(0.0, w), (PI - w, PI + w), (2.0 * PI - w, 2.0 * PI)];
        let s = sigma();
        let (mut drift, mut anti) = (0.0f64, 0.0f64);
        for k in 0..=8 {
            let t = k as f64 / 8.0;
            for &(a, b) in &collars {
                let c0 = self.c(a + 1e-12, t);
                for j in 1..=8 {
                    let u = a + (b - a - 2e-12) * j as f64 / 8.0 + 1e-12;
                    drift = drift.max((self.c(u, t) - c0).norm());
                }
                let tang = -s * c0;
                anti = anti.max((s * tang + tang * s).norm());
            }
        }
        (drift, anti)
    }
}

fn random_b<R: Rng>(rng: &mut R) -> f64 {
    let m = rng.gen_range(0.2..1.5);
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

pub fn random_sym<R: Rng>(rng: &mut R, scale: f64) -> Mat2 {
    sym2(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

fn check_cover(pieces: &[Piece]) -> Result<()> {
    if pieces.is_empty() {
        return Err(Error::InvalidInput("no pieces".into()));
    }
    let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
    if !close(pieces[0].u0, 0.0) || !close(pieces[pieces.len() - 1].u1, 2.0 * PI) {
        return Err(Error::InvalidInput("pieces must cover [0, 2π]".into()));
    }
    for p in pieces {
        if p.u1 <= p.u0 {
            return Err(Error::InvalidInput(format!(
                "empty piece [{}, {}]",
                p.u0, p.u1
            )));
        }
        if p.knots.len() != p.values.len() || p.knots.is_empty() {
            return Err(Error::InvalidInput(
                "knots and values differ in length".into(),
            ));
        }
        if p.knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("t-knots must increase".into()));
        }
        if p.values.iter().any(|v| (v - v.transpose()).amax() > 1e-14) {
            return Err(Error::InvalidInput("coefficient is not symmetric".into()));
        }
    }
    for w in pieces.windows(2) {
        if !close(w[0].u1, w[1].u0) {
            return Err(Error::InvalidInput("pieces must be contiguous".into()));
        }
    }
    Ok(())
}
