use nalgebra::DMatrix;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A real symplectic vector space `(R^dim, ω)` with `ω(x, y) = ⟨Jx, y⟩`,
/// where `J` is an orthogonal complex structure.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpace {
    j: DMatrix<f64>,
    /// `(column, sign)` of the single entry in each row when `J` is a signed
    /// permutation, so `J` can be applied without a dense product.
    signed_perm: Option<Vec<(usize, f64)>>,
}

fn signed_perm(j: &DMatrix<f64>) -> Option<Vec<(usize, f64)>> {
    (0..j.nrows())
        .map(|i| {
            let mut hit = None;
            for c in 0..j.ncols() {
                let v = j[(i, c)];
                if v == 0.0 {
                    continue;
                }
                if hit.is_some() || v.abs() != 1.0 {
                    return None;
                }
                hit = Some((c, v));
            }
            hit
        })
        .collect()
}

const STRUCTURE_TOL: f64 = 1e-12;

impl SymplecticSpace {
    pub fn new(j: DMatrix<f64>) -> Result<Arc<Self>> {
        let n = j.nrows();
        if j.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: j.ncols(),
            });
        }
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "symplectic dimension must be even and positive, got {n}"
            )));
        }
        let sq = &j * &j + DMatrix::identity(n, n);
        if sq.amax() > STRUCTURE_TOL {
            return Err(Error::InvalidInput(format!(
                "J^2 + Id has max entry {:.3e}",
                sq.amax()
            )));
        }
        let skew = &j + j.transpose();
        if skew.amax() > STRUCTURE_TOL {
            return Err(Error::InvalidInput(format!(
                "J + J^T has max entry {:.3e}",
                skew.amax()
            )));
        }
        let signed_perm = signed_perm(&j);
        Ok(Arc::new(SymplecticSpace { j, signed_perm }))
    }

    /// `R^{2n}` with `J = [[0, -I], [I, 0]]`.
    pub fn standard(n: usize) -> Arc<Self> {
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = -1.0;
            j[(n + i, i)] = 1.0;
        }
        let signed_perm = signed_perm(&j);
        Arc::new(SymplecticSpace { j, signed_perm })
    }

    /// Orthogonal direct sum of complex structures.
    pub fn direct_sum(blocks: &[DMatrix<f64>]) -> Result<Arc<Self>> {
        let n: usize = blocks.iter().map(|b| b.nrows()).sum();
        let mut j = DMatrix::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            j.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
            off += b.nrows();
        }
        SymplecticSpace::new(j)
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn half_dim(&self) -> usize {
        self.j.nrows() / 2
    }

    pub fn j(&self) -> &DMatrix<f64> {
        &self.j
    }

    /// `J x`.
    pub fn apply_j(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.signed_perm {
            Some(p) => DMatrix::from_fn(x.nrows(), x.ncols(), |i, c| p[i].1 * x[(p[i].0, c)]),
            None => &self.j * x,
        }
    }

    pub fn omega(&self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
        self.apply_j(x).transpose() * y
    }

    pub fn omega_vec(&self, x: &nalgebra::DVector<f64>, y: &nalgebra::DVector<f64>) -> f64 {
        (&self.j * x).dot(y)
    }

    pub fn same_as(&self, other: &SymplecticSpace) -> bool {
        std::ptr::eq(self, other)
            || (self.dim() == other.dim() && (&self.j - &other.j).amax() <= STRUCTURE_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_structure_is_valid() {
        let s = SymplecticSpace::standard(3);
        assert!(SymplecticSpace::new(s.j().clone()).is_ok());
        assert_eq!(s.dim(), 6);
    }

    #[test]
    fn rejects_odd_and_non_complex() {
        assert!(SymplecticSpace::new(DMatrix::identity(3, 3)).is_err());
        assert!(SymplecticSpace::new(DMatrix::identity(2, 2)).is_err());
        let mut bad = SymplecticSpace::standard(1).j().clone();
        bad[(0, 1)] = -2.0;
        assert!(SymplecticSpace::new(bad).is_err());
    }

    #[test]
    fn direct_sum_of_opposite_blocks() {
        let s = SymplecticSpace::standard(1);
        let neg = -s.j().clone();
        let sum = SymplecticSpace::direct_sum(&[neg, s.j().clone()]).unwrap();
        assert_eq!(sum.dim(), 4);
        assert_eq!(sum.j()[(0, 1)], 1.0);
        assert_eq!(sum.j()[(3, 2)], 1.0);
    }
}
