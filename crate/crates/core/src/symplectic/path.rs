use std::fmt;
use std::sync::Arc;

use super::LagrangianFrame;
use crate::error::{Error, Result};
use crate::tol::MAX_SAMPLE_GAP;

type Generator = dyn Fn(f64) -> Result<LagrangianFrame> + Send + Sync;

/// A continuous path `t ↦ c(t)` of Lagrangians over `[0, 1]`.
///
/// The path keeps its generator so the index algorithms can refine anywhere;
/// the stored samples are a grid on which successive frames are closer than
/// [`MAX_SAMPLE_GAP`] in the gap metric.
#[derive(Clone)]
pub struct LagrangianPath {
    generator: Arc<Generator>,
    samples: Vec<(f64, LagrangianFrame)>,
    budget: usize,
}

impl fmt::Debug for LagrangianPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LagrangianPath")
            .field("samples", &self.samples.len())
            .field("budget", &self.budget)
            .finish()
    }
}

pub const DEFAULT_BUDGET: usize = 1 << 14;
const INITIAL_SAMPLES: usize = 16;

impl LagrangianPath {
    pub fn from_fn<F>(f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<LagrangianFrame> + Send + Sync + 'static,
    {
        Self::with_budget(f, DEFAULT_BUDGET)
    }

    pub fn with_budget<F>(f: F, budget: usize) -> Result<Self>
    where
        F: Fn(f64) -> Result<LagrangianFrame> + Send + Sync + 'static,
    {
        let generator: Arc<Generator> = Arc::new(f);
        let mut samples = Vec::with_capacity(INITIAL_SAMPLES + 1);
        for i in 0..=INITIAL_SAMPLES {
            let t = i as f64 / INITIAL_SAMPLES as f64;
            samples.push((t, generator(t)?));
        }
        let space = Arc::clone(samples[0].1.space());
        for (_, f) in &samples {
            if !f.space().same_as(&space) {
                return Err(Error::InvalidInput(
                    "path leaves its symplectic space".into(),
                ));
            }
        }
        let mut path = LagrangianPath {
            generator,
            samples,
            budget,
        };
        path.refine_until(MAX_SAMPLE_GAP)?;
        Ok(path)
    }

    pub fn constant(frame: LagrangianFrame) -> Self {
        let g = frame.clone();
        LagrangianPath {
            generator: Arc::new(move |_| Ok(g.clone())),
            samples: vec![(0.0, frame.clone()), (1.0, frame)],
            budget: DEFAULT_BUDGET,
        }
    }

    /// Evaluates the generator; `t` is clamped to `[0, 1]`.
    pub fn frame_at(&self, t: f64) -> Result<LagrangianFrame> {
        (self.generator)(t.clamp(0.0, 1.0))
    }

    pub fn samples(&self) -> &[(f64, LagrangianFrame)] {
        &self.samples
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn start(&self) -> &LagrangianFrame {
        &self.samples[0].1
    }

    pub fn end(&self) -> &LagrangianFrame {
        &self.samples[self.samples.len() - 1].1
    }

    pub fn dim(&self) -> usize {
        self.start().space().dim()
    }

    /// Inserts midpoints until every step has gap below `max_gap`.
    pub fn refine_until(&mut self, max_gap: f64) -> Result<()> {
        let mut i = 0;
        while i + 1 < self.samples.len() {
            let (t0, ref f0) = self.samples[i];
            let (t1, ref f1) = self.samples[i + 1];
            if f0.gap(f1)? < max_gap {
                i += 1;
                continue;
            }
            if self.samples.len() >= self.budget || t1 - t0 < 1e-9 {
                return Err(Error::RefinementExhausted { t: t0 });
            }
            let tm = 0.5 * (t0 + t1);
            let fm = self.frame_at(tm)?;
            self.samples.insert(i + 1, (tm, fm));
        }
        Ok(())
    }

    /// True when no sample moves away from the start.
    pub fn is_constant(&self) -> Result<bool> {
        let s = self.start();
        for (_, f) in &self.samples {
            if s.gap(f)? > 1e-13 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Runs along `self` and then `other`, each at double speed.
    pub fn concat(&self, other: &LagrangianPath) -> Result<LagrangianPath> {
        self.start().check_same_space(other.start())?;
        let join = self.end().gap(other.start())?;
        if join > 1e-8 {
            return Err(Error::InvalidInput(format!(
                "paths do not meet (gap {join:.3e})"
            )));
        }
        let (a, b) = (Arc::clone(&self.generator), Arc::clone(&other.generator));
        let budget = self.budget.max(other.budget);
        LagrangianPath::with_budget(
            move |t| {
                if t <= 0.5 {
                    a(2.0 * t)
                } else {
                    b(2.0 * t - 1.0)
                }
            },
            budget,
        )
    }

    pub fn reversed(&self) -> Result<LagrangianPath> {
        let g = Arc::clone(&self.generator);
        LagrangianPath::with_budget(move |t| g(1.0 - t), self.budget)
    }
}
