//! Fourier–Galerkin discretization of `σ d/du + C(u, t)` for trigonometric
//! coefficients, used as an independent check of the monodromy method.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::family::{sigma, Coefficient, Mat2, OperatorFamily};
use crate::error::{Error, Result};
use crate::index::HalfInteger;
use crate::tol::EndpointConvention;

const ZERO: f64 = 1e-9;

fn fourier_coefficient(terms: &[super::family::TrigTerm], m: i64, t: f64) -> DMatrix<Complex64> {
    let mut c = DMatrix::<Complex64>::zeros(2, 2);
    for term in terms {
        let a = term.cos[0] * (1.0 - t) + term.cos[1] * t;
        let b = term.sin[0] * (1.0 - t) + term.sin[1] * t;
        let add = |c: &mut DMatrix<Complex64>, f: &dyn Fn(f64, f64) -> Complex64| {
            for i in 0..2 {
                for j in 0..2 {
                    c[(i, j)] += f(a[(i, j)], b[(i, j)]);
                }
            }
        };
        let tm = term.m as i64;
        if tm == 0 && m == 0 {
            add(&mut c, &|x, _| Complex64::new(x, 0.0));
        } else if tm != 0 && m == tm {
            add(&mut c, &|x, y| Complex64::new(x / 2.0, -y / 2.0));
        } else if tm != 0 && m == -tm {
            add(&mut c, &|x, y| Complex64::new(x / 2.0, y / 2.0));
        }
    }
    c
}

/// Eigenvalues of the Galerkin matrix on the modes `e^{iku}`, `|k| ≤ n`.
pub fn galerkin_eigenvalues(fam: &OperatorFamily, t: f64, n: usize) -> Result<Vec<f64>> {
    let Coefficient::Trig(terms) = &fam.coeff else {
        return Err(Error::InvalidInput(
            "Galerkin discretization needs a trigonometric family".into(),
        ));
    };
    let n = n as i64;
    let size = 2 * (2 * n + 1) as usize;
    let s: Mat2 = sigma();
    let mut h = DMatrix::<Complex64>::zeros(size, size);
    for kp in -n..=n {
        for k in -n..=n {
            let c = fourier_coefficient(terms, kp - k, t);
            let (r, col) = (2 * (kp + n) as usize, 2 * (k + n) as usize);
            for i in 0..2 {
                for j in 0..2 {
                    let mut v = c[(i, j)];
                    if k == kp {
                        v += Complex64::new(0.0, k as f64 * s[(i, j)]);
                    }
                    h[(r + i, col + j)] = v;
                }
            }
        }
    }
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Spectral flow of the Galerkin matrices, read off from the change in the
/// number of non-positive eigenvalues between `t = 0` and `t = 1`.
pub fn galerkin_spectral_flow(
    fam: &OperatorFamily,
    n: usize,
    convention: EndpointConvention,
) -> Result<HalfInteger> {
    let halves = |t: f64| -> Result<i64> {
        let ev = galerkin_eigenvalues(fam, t, n)?;
        let neg = ev.iter().filter(|&&x| x < -ZERO).count() as i64;
        let zero = ev.iter().filter(|&&x| x.abs() <= ZERO).count() as i64;
        Ok(match convention {
            EndpointConvention::Symmetric => 2 * neg + zero,
            EndpointConvention::LeftClosed => 2 * (neg + zero),
        })
    };
    Ok(HalfInteger::from_halves(halves(0.0)? - halves(1.0)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_lab::family::TrigTerm;

    fn ramp_trig() -> OperatorFamily {
        OperatorFamily::trig(
            "ramp",
            vec![TrigTerm {
                m: 0,
                cos: [Mat2::zeros(), Mat2::identity()],
                sin: [Mat2::zeros(); 2],
            }],
        )
        .unwrap()
    }

    #[test]
    fn ramp_spectrum_is_shifted_integers() {
        let ev = galerkin_eigenvalues(&ramp_trig(), 0.25, 5).unwrap();
        assert_eq!(ev.len(), 22);
        for (i, x) in ev.iter().enumerate() {
            let k = (i / 2) as f64 - 5.0;
            assert!((x - (k + 0.25)).abs() < 1e-12);
        }
    }

    #[test]
    fn ramp_flow_is_two() {
        for conv in [
            EndpointConvention::Symmetric,
            EndpointConvention::LeftClosed,
        ] {
            assert_eq!(
                galerkin_spectral_flow(&ramp_trig(), 12, conv).unwrap(),
                HalfInteger::from_int(2)
            );
        }
    }
}
