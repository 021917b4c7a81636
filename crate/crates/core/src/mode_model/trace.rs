use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::TangentialSpectrum;
use crate::error::{Error, Result};
use crate::symplectic::{LagrangianFrame, SymplecticSpace};

/// Which side of the cut a trace space belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceSide {
    /// Positive modes in `H^{1/2}`, negative modes in `H^{−1/2}`.
    Minus,
    /// Positive modes in `H^{−1/2}`, negative modes in `H^{1/2}`.
    Plus,
}

/// Truncated boundary space of one side, in orthonormal coordinates
/// `y_k = w_k c_k` where `c_k` are the `L²` mode coefficients.
///
/// The weights of a pair `k, −k` multiply to one, so in these coordinates
/// the form `ω(x, y) = ⟨σx, y⟩` is the standard one with `σφ_k = φ_{−k}`.
#[derive(Debug, Clone)]
pub struct TraceSpace {
    pub spectrum: TangentialSpectrum,
    pub side: TraceSide,
    weights: Vec<f64>,
    space: Arc<SymplecticSpace>,
}

impl TraceSpace {
    pub fn new(spectrum: TangentialSpectrum, side: TraceSide) -> Self {
        let k = spectrum.order();
        let weights = (0..2 * k)
            .map(|a| {
                let mode = spectrum.mode(a);
                let l = spectrum.ell(mode).abs();
                if l == 0.0 {
                    return 1.0;
                }
                let smooth = (mode > 0) == (side == TraceSide::Minus);
                if smooth {
                    l.sqrt()
                } else {
                    1.0 / l.sqrt()
                }
            })
            .collect();
        TraceSpace {
            spectrum,
            side,
            weights,
            space: SymplecticSpace::standard(k),
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Orthonormal coordinates of a mode vector.
    pub fn to_hilbert(&self, v: &ModeVector) -> Result<DVector<f64>> {
        self.check(v)?;
        Ok(DVector::from_iterator(
            self.dim(),
            v.coeffs.iter().zip(&self.weights).map(|(c, w)| c * w),
        ))
    }

    pub fn from_hilbert(&self, y: &DVector<f64>) -> ModeVector {
        ModeVector {
            coeffs: DVector::from_iterator(
                self.dim(),
                y.iter().zip(&self.weights).map(|(c, w)| c / w),
            ),
        }
    }

    pub fn norm(&self, v: &ModeVector) -> Result<f64> {
        Ok(self.to_hilbert(v)?.norm())
    }

    /// `ω(x, y) = ⟨σx, y⟩_{L²}` evaluated on mode coefficients.
    pub fn omega(&self, x: &ModeVector, y: &ModeVector) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.space.omega_vec(&x.coeffs, &y.coeffs))
    }

    fn check(&self, v: &ModeVector) -> Result<()> {
        if v.coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.coeffs.len(),
            });
        }
        Ok(())
    }

    /// `θ₊`: positive modes plus the chosen half of the zero modes.
    pub fn theta_plus(&self) -> LagrangianFrame {
        LagrangianFrame::coordinate(&self.space, &self.spectrum.plus_axes())
            .expect("coordinate half is Lagrangian")
    }

    pub fn theta_minus(&self) -> LagrangianFrame {
        LagrangianFrame::coordinate(&self.space, &self.spectrum.minus_axes())
            .expect("coordinate half is Lagrangian")
    }
}

/// Mode coefficients `c_k`, in the coordinate order of the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector {
    pub coeffs: DVector<f64>,
}

impl ModeVector {
    pub fn zeros(spectrum: &TangentialSpectrum) -> Self {
        ModeVector {
            coeffs: DVector::zeros(spectrum.dim()),
        }
    }

    /// The single mode `φ_k`.
    pub fn basis(spectrum: &TangentialSpectrum, k: i64) -> Self {
        let mut v = Self::zeros(spectrum);
        v.coeffs[spectrum.axis(k)] = 1.0;
        v
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.norm()
    }
}

/// `(Σ |c_k|² max(|ℓ_k|, 1)^{2s})^{1/2}`.
pub fn sobolev_norm(spectrum: &TangentialSpectrum, v: &ModeVector, s: f64) -> Result<f64> {
    if v.coeffs.len() != spectrum.dim() {
        return Err(Error::DimensionMismatch {
            expected: spectrum.dim(),
            found: v.coeffs.len(),
        });
    }
    let sum: f64 = v
        .coeffs
        .iter()
        .enumerate()
        .map(|(a, c)| c * c * spectrum.ell(spectrum.mode(a)).abs().max(1.0).powf(2.0 * s))
        .sum();
    Ok(sum.sqrt())
}

/// Orthogonal projection onto `θ₊` in the orthonormal coordinates of `space`.
pub fn aps_projector(space: &TraceSpace) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(space.dim(), space.dim());
    for a in space.spectrum.plus_axes() {
        p[(a, a)] = 1.0;
    }
    p
}
