use nalgebra::DMatrix;
use serde::Serialize;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::index::HalfInteger;
use crate::linalg;
use crate::symplectic::{
    hormander_index, maslov_crossing, transversal_connecting_path, LagrangianFrame, Polarization,
    SymplecticSpace,
};
use crate::tol::{EndpointConvention, RANK_TOL};

/// Orthonormal basis of the orthogonal complement of `span(w)`.
fn complement(w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = w.nrows();
    let p = DMatrix::identity(n, n) - w * w.transpose();
    let eig = p.symmetric_eigen();
    let cols: Vec<_> = (0..n)
        .filter(|&i| eig.eigenvalues[i] > 0.5)
        .map(|i| eig.eigenvectors.column(i).clone_owned())
        .collect();
    if cols.len() != n - w.ncols() {
        return Err(Error::RankDeficient { sigma: 0.0 });
    }
    if cols.is_empty() {
        return Ok(DMatrix::zeros(n, 0));
    }
    linalg::orthonormalize(&DMatrix::from_columns(&cols), RANK_TOL)
}

/// A `J`-invariant subspace with orthonormal basis `q`, viewed as a
/// symplectic space of its own.
struct Block {
    q: DMatrix<f64>,
    space: Arc<SymplecticSpace>,
}

impl Block {
    fn new(ambient: &SymplecticSpace, q: DMatrix<f64>) -> Result<Self> {
        let j = q.transpose() * ambient.j() * &q;
        Ok(Block {
            space: SymplecticSpace::new(j)?,
            q,
        })
    }

    /// `frame ∩ block` in block coordinates; fails unless the intersection
    /// is half-dimensional in the block.
    fn restrict(&self, frame: &LagrangianFrame) -> Result<LagrangianFrame> {
        let x = linalg::intersection_basis(frame.frame(), &self.q)?;
        if 2 * x.ncols() != self.q.ncols() {
            return Err(Error::InvalidInput(format!(
                "Lagrangian does not split along the block: intersection dimension {} in block of dimension {}",
                x.ncols(),
                self.q.ncols()
            )));
        }
        LagrangianFrame::new(&self.space, self.q.transpose() * x)
    }
}

/// `σ_H(ν⁺, L₊; ν⁻, J L₊)` split along `ℓ₀ = ν⁺ ∩ J L₊`: the block
/// `ℓ₀ ⊕ Jℓ₀` and its orthogonal complement are both `J`-invariant and all
/// four Lagrangians split along them when `ν⁻` contains `ℓ₀` or `Jℓ₀`.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub ell0_dim: usize,
    pub block: HalfInteger,
    pub complement: HalfInteger,
    pub direct: HalfInteger,
}

impl Decomposition {
    pub fn consistent(&self) -> bool {
        self.block + self.complement == self.direct
    }
}

struct Split {
    ell0_dim: usize,
    block: Option<[LagrangianFrame; 4]>,
    rest: Option<[LagrangianFrame; 4]>,
}

fn split(
    nu_plus: &LagrangianFrame,
    l_plus: &LagrangianFrame,
    nu_minus: &LagrangianFrame,
) -> Result<Split> {
    nu_plus.check_same_space(l_plus)?;
    nu_plus.check_same_space(nu_minus)?;
    let space = nu_plus.space();
    let l_minus = l_plus.j_complement();
    let ell0 = linalg::intersection_basis(nu_plus.frame(), l_minus.frame())?;
    let k = ell0.ncols();
    if k == 0 {
        return Ok(Split {
            ell0_dim: 0,
            block: None,
            rest: Some([nu_plus.clone(), l_plus.clone(), nu_minus.clone(), l_minus]),
        });
    }
    let w = {
        let jl = space.apply_j(&ell0);
        let mut w = DMatrix::zeros(space.dim(), 2 * k);
        w.columns_mut(0, k).copy_from(&ell0);
        w.columns_mut(k, k).copy_from(&jl);
        w
    };
    let four = [nu_plus, l_plus, nu_minus, &l_minus];
    let restrict_all = |b: &Block| -> Result<[LagrangianFrame; 4]> {
        Ok([
            b.restrict(four[0])?,
            b.restrict(four[1])?,
            b.restrict(four[2])?,
            b.restrict(four[3])?,
        ])
    };
    let block = restrict_all(&Block::new(space, w.clone())?)?;
    let q = complement(&w)?;
    let rest = if q.ncols() == 0 {
        None
    } else {
        Some(restrict_all(&Block::new(space, q)?)?)
    };
    Ok(Split {
        ell0_dim: k,
        block: Some(block),
        rest,
    })
}

fn hormander4(
    f: &Option<[LagrangianFrame; 4]>,
    convention: EndpointConvention,
) -> Result<HalfInteger> {
    match f {
        Some(f) => hormander_index(&f[0], &f[1], &f[2], &f[3], convention),
        None => Ok(HalfInteger::ZERO),
    }
}

/// Computes `σ_H(ν⁺, L₊; ν⁻, J L₊)` directly and through the `ℓ₀` splitting.
pub fn decompose_hormander(
    nu_plus: &LagrangianFrame,
    l_plus: &LagrangianFrame,
    nu_minus: &LagrangianFrame,
    convention: EndpointConvention,
) -> Result<Decomposition> {
    let s = split(nu_plus, l_plus, nu_minus)?;
    let block = hormander4(&s.block, convention)?;
    let complement = hormander4(&s.rest, convention)?;
    let direct = hormander_index(
        nu_plus,
        l_plus,
        nu_minus,
        &l_plus.j_complement(),
        convention,
    )?;
    Ok(Decomposition {
        ell0_dim: s.ell0_dim,
        block,
        complement,
        direct,
    })
}

/// Trace of the argument that `σ_H(ν, L₊; Jν, J L₊)` vanishes.
///
/// On the part transversal to `L₋ = J L₊`, `ν` is the graph of some `T` and
/// the path `s ↦ graph(−sσTσ)` runs from `L₋` to `Jν` without meeting `ν` or
/// `L₊`, so both Maslov indices along it vanish. The `ℓ₀` block is
/// evaluated separately.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub ell0_dim: usize,
    /// Samples of the connecting path checked for transversality.
    pub samples: usize,
    pub maslov_against_graph: HalfInteger,
    pub maslov_against_plus: HalfInteger,
    pub block: HalfInteger,
    pub value: HalfInteger,
    /// `σ_H` evaluated along the geodesic in the full space.
    pub direct: HalfInteger,
}

impl Certificate {
    pub fn vanishes(&self) -> bool {
        self.value == HalfInteger::ZERO && self.direct == HalfInteger::ZERO
    }
}

/// Certificate for a Lagrangian `ν` against the polarization `L₊ ⊕ J L₊`.
pub fn vanishing_certificate(
    nu: &LagrangianFrame,
    l_plus: &LagrangianFrame,
    convention: EndpointConvention,
) -> Result<Certificate> {
    let mirror = nu.j_complement();
    let s = split(nu, l_plus, &mirror)?;
    let block = hormander4(&s.block, convention)?;
    let direct = hormander_index(nu, l_plus, &mirror, &l_plus.j_complement(), convention)?;
    let Some([nu_r, plus_r, _, _]) = &s.rest else {
        return Ok(Certificate {
            ell0_dim: s.ell0_dim,
            samples: 0,
            maslov_against_graph: HalfInteger::ZERO,
            maslov_against_plus: HalfInteger::ZERO,
            block,
            value: block,
            direct,
        });
    };
    let pol = Polarization::new(plus_r.clone());
    let a = pol.plus.frame().transpose() * nu_r.frame();
    let b = pol.minus.frame().transpose() * nu_r.frame();
    let a_inv = a
        .try_inverse()
        .ok_or(Error::TransversalityViolated { t: 0.0, dim: 1 })?;
    let t = b * a_inv;
    let t = (&t + t.transpose()) * 0.5;
    let path = transversal_connecting_path(&pol, &t)?;
    let graph = pol.graph(&t)?;
    let m_graph = maslov_crossing(&path, &graph, convention)?.value;
    let m_plus = maslov_crossing(&path, &pol.plus, convention)?.value;
    // σ_H(ν, L₊; Jν, L₋) = −σ_H(Jν, L₋; ν, L₊) and the path runs L₋ → Jν.
    let value = block + (m_graph - m_plus);
    Ok(Certificate {
        ell0_dim: s.ell0_dim,
        samples: path.samples().len(),
        maslov_against_graph: m_graph,
        maslov_against_plus: m_plus,
        block,
        value,
        direct,
    })
}

/// Certificate for `ν = graph(T)` over `pol.plus`.
pub fn vanishing_certificate_for_graph(
    pol: &Polarization,
    t: &DMatrix<f64>,
    convention: EndpointConvention,
) -> Result<Certificate> {
    vanishing_certificate(&pol.graph(t)?, &pol.plus, convention)
}
