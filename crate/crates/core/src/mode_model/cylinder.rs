use nalgebra::{DMatrix, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{TangentialSpectrum, TraceSpace};
use crate::error::Result;
use crate::operator_lab::{exp_traceless, random_sym, sigma, Mat2};
use crate::symplectic::LagrangianFrame;

/// Mode-wise model of the far half: a cylinder `[0, R] × Σ` on which the
/// pair `(φ_k, φ_{−k})` obeys `σ(∂_u + ℓ_k diag(1, −1)) f + V_k f = 0`,
/// closed off at `u = R` by a Lagrangian line.
///
/// `V_k` and the cap line depend only on `(seed, k)`, so the model is the
/// same at every truncation order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CappedCylinder {
    pub radius: f64,
    pub seed: u64,
    /// Size of the entries of `V_k`.
    pub coupling: f64,
}

impl Default for CappedCylinder {
    fn default() -> Self {
        CappedCylinder {
            radius: 1.0,
            seed: 0,
            coupling: 1.0,
        }
    }
}

impl CappedCylinder {
    fn block(&self, k: usize) -> (Mat2, f64) {
        let mut rng =
            ChaCha8Rng::seed_from_u64(self.seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let v = random_sym(&mut rng, self.coupling);
        let cap = rng.gen_range(0.0..std::f64::consts::PI);
        (v, cap)
    }

    /// Traces at `u = 0` of the solutions on pair `k`, as a unit vector in
    /// `(c_k, c_{−k})` coordinates.
    pub fn trace_line(&self, spectrum: &TangentialSpectrum, k: usize) -> Vector2<f64> {
        let (v, cap) = self.block(k);
        let l = spectrum.ell(k as i64);
        let b0 = Mat2::new(l, 0.0, 0.0, -l);
        // f' = (−B₀ + σV) f, integrated from the cap back to u = 0.
        let g = -b0 + sigma() * v;
        let back = exp_traceless(&(g * -self.radius));
        let f0 = back * Vector2::new(cap.cos(), cap.sin());
        f0 / f0.norm()
    }

    /// The traces as a Lagrangian of `space`, in its orthonormal coordinates.
    pub fn cauchy_data(&self, space: &TraceSpace) -> Result<LagrangianFrame> {
        let s = &space.spectrum;
        let k = s.order();
        let w = space.weights();
        let mut x = DMatrix::zeros(2 * k, k);
        for pair in 1..=k {
            let line = self.trace_line(s, pair);
            let (a, b) = (s.axis(pair as i64), s.axis(-(pair as i64)));
            x[(a, pair - 1)] = line[0] * w[a];
            x[(b, pair - 1)] = line[1] * w[b];
        }
        for mut c in x.column_iter_mut() {
            let n = c.norm();
            c /= n;
        }
        LagrangianFrame::new(space.space(), x)
    }
}
