//! Small dense helpers shared by the symplectic and operator modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gram–Schmidt with one re-orthogonalization pass (classical, in
/// matrix-vector form), processing the columns in their given order.
/// Deterministic and smooth in the input while the columns stay independent.
pub fn orthonormalize(m: &DMatrix<f64>, rank_tol: f64) -> Result<DMatrix<f64>> {
    let mut q = m.clone();
    for j in 0..m.ncols() {
        let scale = m.column(j).norm().max(1.0);
        let mut v = q.column(j).clone_owned();
        if j > 0 {
            let done = q.columns(0, j);
            for _pass in 0..2 {
                let c = done.tr_mul(&v);
                v.gemv(-1.0, &done, &c, 1.0);
            }
        }
        let n = v.norm();
        if n <= rank_tol * scale {
            return Err(Error::RankDeficient { sigma: n / scale });
        }
        q.column_mut(j).copy_from(&(v / n));
    }
    Ok(q)
}

/// Singular values in ascending order.
///
/// Computed with faer. The bidiagonal SVD in nalgebra 0.35 can loop forever
/// or produce NaN on residual matrices that are mostly exact zeros, which
/// the crossing search meets routinely.
pub fn singular_values_asc(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let view = faer::MatRef::from_column_major_slice(m.as_slice(), m.nrows(), m.ncols());
    let mut s = match view.singular_values() {
        Ok(s) => s,
        // Last resort, accurate to about √ε‖m‖ for the small values.
        Err(_) => symmetric_eigenvalues_asc(&(m.transpose() * m))
            .iter()
            .map(|&l| l.max(0.0).sqrt())
            .collect(),
    };
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// Right singular vectors belonging to the `k` smallest singular values of a
/// square or tall matrix, as columns.
pub fn smallest_right_singular_vectors(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    // Eigenvectors of MᵀM are the right singular vectors; ordering by
    // eigenvalue is stable for the small matrices used here.
    let gram = m.transpose() * m;
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let cols: Vec<DVector<f64>> = order
        .iter()
        .take(k)
        .map(|&i| eig.eigenvectors.column(i).clone_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(m.ncols(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of `span(x) ∩ span(w)` for `w` with orthonormal columns.
pub fn intersection_basis(x: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if w.ncols() == 0 || x.ncols() == 0 {
        return Ok(DMatrix::zeros(x.nrows(), 0));
    }
    let residual = x - w * (w.transpose() * x);
    let k = singular_values_asc(&residual)
        .iter()
        .filter(|&&s| s < crate::tol::RANK_TOL)
        .count();
    let c = smallest_right_singular_vectors(&residual, k);
    orthonormalize(&(x * c), crate::tol::RANK_TOL)
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues_asc(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut v: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Eigenvalues of a (numerically) normal complex matrix via complex Schur.
pub fn complex_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let schur = m.clone().try_schur(1e-14, 10_000).ok_or_else(|| {
        Error::InvalidInput("complex Schur decomposition did not converge".into())
    })?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Spectral norm.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    singular_values_asc(m).last().copied().unwrap_or(0.0)
}

/// Golden-section minimization of `f` on `[a, b]`; returns the minimizer and
/// the minimum found (including the interval ends).
pub fn golden_min(mut a: f64, mut b: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (fa0, fb0) = (f(a), f(b));
    let (a0, b0) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0;
    while (b - a) > tol && iters < 200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    let mut best = if fc < fd { (c, fc) } else { (d, fd) };
    if fa0 <= best.1 {
        best = (a0, fa0);
    }
    if fb0 < best.1 {
        best = (b0, fb0);
    }
    best
}

/// Bisection for a sign change of `f` on `[a, b]` (`f(a)` and `f(b)` of
/// opposite signs).
pub fn bisect_root(mut a: f64, mut b: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        if (b - a) <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormalize_keeps_span_and_order() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        let q = orthonormalize(&m, 1e-12).unwrap();
        assert!((q.transpose() * &q - DMatrix::identity(2, 2)).norm() < 1e-14);
        assert!((q[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((q[(1, 1)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthonormalize_rejects_dependent_columns() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 1.0, 2.0]);
        assert!(matches!(
            orthonormalize(&m, 1e-10),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn golden_finds_v_shaped_minimum() {
        let (x, fx) = golden_min(0.0, 1.0, 1e-13, |t| (t - 0.3141).abs());
        assert!((x - 0.3141).abs() < 1e-12);
        assert!(fx < 1e-12);
    }

    #[test]
    fn bisection_finds_root() {
        let r = bisect_root(0.0, 2.0, 1e-14, |x| x * x - 2.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn complex_eigenvalues_of_diagonal_unitary() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::from_polar(1.0, 0.3),
            Complex64::from_polar(1.0, -2.0),
        ]));
        let mut ev = complex_eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        assert!((ev[0].arg() + 2.0).abs() < 1e-12);
        assert!((ev[1].arg() - 0.3).abs() < 1e-12);
    }
}
