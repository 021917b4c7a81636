use nalgebra::DMatrix;
use num_complex::Complex64;
use std::sync::Arc;

use super::SymplecticSpace;
use crate::error::{Error, Result};
use crate::linalg;
use crate::tol::{FRAME_TOL, RANK_TOL};

/// A Lagrangian subspace stored as an orthonormal column frame.
#[derive(Debug, Clone)]
pub struct LagrangianFrame {
    space: Arc<SymplecticSpace>,
    frame: DMatrix<f64>,
}

impl LagrangianFrame {
    /// Orthonormalizes `columns` (modified Gram–Schmidt, column order kept)
    /// and checks that the span is Lagrangian.
    pub fn new(space: &Arc<SymplecticSpace>, columns: DMatrix<f64>) -> Result<Self> {
        if columns.nrows() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: columns.nrows(),
            });
        }
        if columns.ncols() != space.half_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.half_dim(),
                found: columns.ncols(),
            });
        }
        let frame = linalg::orthonormalize(&columns, RANK_TOL)?;
        let iso = space.omega(&frame, &frame);
        if iso.amax() > FRAME_TOL {
            return Err(Error::InvalidInput(format!(
                "span is not Lagrangian: |X^T J X| = {:.3e}",
                iso.amax()
            )));
        }
        Ok(LagrangianFrame {
            space: Arc::clone(space),
            frame,
        })
    }

    /// Span of the given coordinate axes.
    pub fn coordinate(space: &Arc<SymplecticSpace>, axes: &[usize]) -> Result<Self> {
        let mut m = DMatrix::zeros(space.dim(), axes.len());
        for (c, &a) in axes.iter().enumerate() {
            if a >= space.dim() {
                return Err(Error::InvalidInput(format!("axis {a} out of range")));
            }
            m[(a, c)] = 1.0;
        }
        LagrangianFrame::new(space, m)
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        &self.space
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.frame * self.frame.transpose()
    }

    /// `J` applied to the frame: the orthogonal (and ω-dual) complement.
    pub fn j_complement(&self) -> LagrangianFrame {
        LagrangianFrame {
            space: Arc::clone(&self.space),
            frame: self.space.apply_j(&self.frame),
        }
    }

    pub fn check_same_space(&self, other: &LagrangianFrame) -> Result<()> {
        if !self.space.same_as(&other.space) {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: other.space.dim(),
            });
        }
        Ok(())
    }

    /// Sines of the principal angles to `other`, ascending.
    pub fn principal_sines(&self, other: &LagrangianFrame) -> Result<Vec<f64>> {
        self.check_same_space(other)?;
        let resid = &other.frame - &self.frame * (self.frame.transpose() * &other.frame);
        Ok(linalg::singular_values_asc(&resid))
    }

    /// `dim(self ∩ other)`.
    pub fn intersection_dim(&self, other: &LagrangianFrame) -> Result<usize> {
        Ok(self
            .principal_sines(other)?
            .iter()
            .filter(|&&s| s < RANK_TOL)
            .count())
    }

    /// Gap-metric distance `‖P_self − P_other‖`.
    pub fn gap(&self, other: &LagrangianFrame) -> Result<f64> {
        Ok(self.principal_sines(other)?.last().copied().unwrap_or(0.0))
    }

    /// Largest isotropy and orthonormality defects.
    pub fn defects(&self) -> (f64, f64) {
        let k = self.dim();
        let orth = (self.frame.transpose() * &self.frame - DMatrix::identity(k, k)).amax();
        let iso = self.space.omega(&self.frame, &self.frame).amax();
        (orth, iso)
    }

    /// Unitary coordinates relative to `reference`: identifying the space
    /// with `reference ⊗ C` (multiplication by `i` acting as `J`), returns
    /// `Z = RᵀX + i (JR)ᵀX`.
    pub fn unitary_coordinates(&self, reference: &LagrangianFrame) -> Result<DMatrix<Complex64>> {
        self.check_same_space(reference)?;
        let r = &reference.frame;
        let jr = self.space.apply_j(r);
        let re = r.transpose() * &self.frame;
        let im = jr.transpose() * &self.frame;
        Ok(DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
            Complex64::new(re[(i, j)], im[(i, j)])
        }))
    }

    /// Inverse of [`unitary_coordinates`](Self::unitary_coordinates): the
    /// Lagrangian spanned by `R Re Z + JR Im Z` for a unitary `Z`.
    pub fn from_unitary(reference: &LagrangianFrame, z: &DMatrix<Complex64>) -> Result<Self> {
        let r = &reference.frame;
        let jr = reference.space.apply_j(r);
        let re = z.map(|c| c.re);
        let im = z.map(|c| c.im);
        LagrangianFrame::new(&reference.space, r * re + jr * im)
    }

    /// Image under a linear map of the ambient space into `target`.
    pub fn image(&self, map: &DMatrix<f64>, target: &Arc<SymplecticSpace>) -> Result<Self> {
        LagrangianFrame::new(target, map * &self.frame)
    }
}
