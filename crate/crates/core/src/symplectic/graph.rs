use nalgebra::DMatrix;
use std::sync::Arc;

use super::{LagrangianFrame, LagrangianPath, SymplecticSpace};
use crate::error::{Error, Result};
use crate::tol::FRAME_TOL;

/// `{x + T x : x ∈ plus}` for a map `T: plus → minus` given in frame
/// coordinates (`T` is `dim(minus) × dim(plus)`).
///
/// `plus` and `minus` must be transversal, and the graph is Lagrangian
/// exactly when `(J plus)ᵀ minus · T` is symmetric.
pub fn graph_lagrangian(
    plus: &LagrangianFrame,
    minus: &LagrangianFrame,
    t: &DMatrix<f64>,
) -> Result<LagrangianFrame> {
    plus.check_same_space(minus)?;
    let n = plus.dim();
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: t.nrows().max(t.ncols()),
        });
    }
    if plus.intersection_dim(minus)? != 0 {
        return Err(Error::InvalidInput(
            "graph over non-transversal pair".into(),
        ));
    }
    let coupling = plus.space().omega(plus.frame(), minus.frame()) * t;
    let asym = (&coupling - coupling.transpose()).amax();
    if asym > FRAME_TOL * (1.0 + coupling.amax()) {
        return Err(Error::InvalidInput(format!(
            "graph is not Lagrangian: asymmetry {asym:.3e}"
        )));
    }
    LagrangianFrame::new(plus.space(), plus.frame() + minus.frame() * t)
}

/// A Lagrangian splitting `plus ⊕ minus` with `minus = J plus`.
#[derive(Debug, Clone)]
pub struct Polarization {
    pub plus: LagrangianFrame,
    pub minus: LagrangianFrame,
}

impl Polarization {
    pub fn new(plus: LagrangianFrame) -> Self {
        let minus = plus.j_complement();
        Polarization { plus, minus }
    }

    /// `R^{2n}` split into its first and second halves of coordinates.
    pub fn standard(n: usize) -> Result<Self> {
        let space = SymplecticSpace::standard(n);
        let axes: Vec<usize> = (0..n).collect();
        Ok(Polarization::new(LagrangianFrame::coordinate(
            &space, &axes,
        )?))
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        self.plus.space()
    }

    /// Graph of `T: plus → minus`; `T` symmetric in these coordinates makes
    /// `σ ∘ T` selfadjoint on `plus`.
    pub fn graph(&self, t: &DMatrix<f64>) -> Result<LagrangianFrame> {
        graph_lagrangian(&self.plus, &self.minus, t)
    }

    /// Graph over `minus` of `−s·σ T σ: minus → plus`, which in frame
    /// coordinates is the matrix `−s T`.
    pub fn mirror_graph(&self, t: &DMatrix<f64>, s: f64) -> Result<LagrangianFrame> {
        graph_lagrangian(&self.minus, &self.plus, &(t * -s))
    }
}

/// The path `s ↦ graph(−s·σTσ)` from `minus` to the mirror of `graph(T)`,
/// checked to stay transversal to `graph(T)` and to `plus` at every sample.
pub fn transversal_connecting_path(pol: &Polarization, t: &DMatrix<f64>) -> Result<LagrangianPath> {
    let graph = pol.graph(t)?;
    let p = pol.clone();
    let tm = t.clone();
    let path = LagrangianPath::from_fn(move |s| p.mirror_graph(&tm, s))?;
    for (s, f) in path.samples() {
        for other in [&graph, &pol.plus] {
            let dim = f.intersection_dim(other)?;
            if dim != 0 {
                return Err(Error::TransversalityViolated { t: *s, dim });
            }
        }
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_map_returns_plus() {
        let pol = Polarization::standard(2).unwrap();
        let g = pol.graph(&DMatrix::zeros(2, 2)).unwrap();
        assert!(g.gap(&pol.plus).unwrap() < 1e-15);
    }

    #[test]
    fn line_graph_in_plane() {
        let pol = Polarization::standard(1).unwrap();
        let a = 0.75;
        let g = pol.graph(&DMatrix::from_element(1, 1, a)).unwrap();
        let expect = DMatrix::from_column_slice(2, 1, &[1.0, a]) / (1.0 + a * a).sqrt();
        assert!((g.frame() - expect).amax() < 1e-15);
    }

    #[test]
    fn non_symmetric_generator_rejected() {
        let pol = Polarization::standard(2).unwrap();
        let t = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(pol.graph(&t).is_err());
    }

    #[test]
    fn zero_generator_gives_constant_path_at_minus() {
        let pol = Polarization::standard(2).unwrap();
        let path = transversal_connecting_path(&pol, &DMatrix::zeros(2, 2)).unwrap();
        assert!(path.is_constant().unwrap());
        assert!(path.start().gap(&pol.minus).unwrap() < 1e-15);
    }

    #[test]
    fn endpoint_is_mirror_graph() {
        let pol = Polarization::standard(2).unwrap();
        let t = DMatrix::from_row_slice(2, 2, &[0.3, -1.2, -1.2, 2.0]);
        let path = transversal_connecting_path(&pol, &t).unwrap();
        let mirror = pol.mirror_graph(&t, 1.0).unwrap();
        assert!(path.end().gap(&mirror).unwrap() < 1e-14);
        // The mirror is J applied to graph(T).
        let jg = pol.graph(&t).unwrap().j_complement();
        assert!(mirror.gap(&jg).unwrap() < 1e-13);
    }
}
