use nalgebra::DMatrix;
use serde::Serialize;
use std::io::Write;

use crate::error::{Error, Result};
use crate::linalg;

/// Singular values of `P − Q` at one truncation order, largest first.
#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    #[serde(rename = "K")]
    pub k: usize,
    pub singular_values: Vec<f64>,
}

impl DecayRow {
    pub fn norm(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn count_above(&self, threshold: f64) -> usize {
        self.singular_values
            .iter()
            .filter(|&&s| s > threshold)
            .count()
    }

    /// The `j`-th largest singular value, `j ≥ 1`.
    pub fn nth(&self, j: usize) -> f64 {
        self.singular_values.get(j - 1).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
}

/// Threshold for the "large singular value" count.
pub const LARGE_SINGULAR_VALUE: f64 = 0.5;
/// Singular values below this count as zero for rank statements.
pub const RANK_ZERO: f64 = 1e-10;

impl DecayTable {
    /// Relative change of the `j`-th singular value between the last two
    /// orders, for `j = 1..=j_max`.
    pub fn last_relative_changes(&self, j_max: usize) -> Vec<f64> {
        let n = self.rows.len();
        if n < 2 {
            return vec![0.0; j_max];
        }
        let (a, b) = (&self.rows[n - 2], &self.rows[n - 1]);
        (1..=j_max)
            .map(|j| {
                let (x, y) = (a.nth(j), b.nth(j));
                if x.max(y) < RANK_ZERO {
                    0.0
                } else {
                    (y - x).abs() / x.max(RANK_ZERO)
                }
            })
            .collect()
    }

    /// Fixed-`j` singular values change by less than `rel` between the last
    /// two orders and the count above [`LARGE_SINGULAR_VALUE`] never moves.
    pub fn stabilizes(&self, j_max: usize, rel: f64) -> bool {
        let counts: Vec<usize> = self
            .rows
            .iter()
            .map(|r| r.count_above(LARGE_SINGULAR_VALUE))
            .collect();
        counts.windows(2).all(|w| w[0] == w[1])
            && self.last_relative_changes(j_max).iter().all(|&c| c < rel)
    }

    /// Every row has at most `bound` singular values above [`RANK_ZERO`].
    pub fn rank_at_most(&self, bound: usize) -> bool {
        self.rows.iter().all(|r| r.count_above(RANK_ZERO) <= bound)
    }

    /// Long format with columns `K, j, singular_value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidInput(format!("writing CSV: {e}"));
        w.write_record(["K", "j", "singular_value"]).map_err(io)?;
        for row in &self.rows {
            for (j, s) in row.singular_values.iter().enumerate() {
                w.write_record([row.k.to_string(), (j + 1).to_string(), format!("{s:.17e}")])
                    .map_err(io)?;
            }
        }
        w.flush()
            .map_err(|e| Error::InvalidInput(format!("writing CSV: {e}")))?;
        Ok(())
    }
}

/// Coordinates of order `small` inside order `large` for the layout where
/// modes `1..=K` come first and `−1..=−K` second.
pub fn embedding(small: usize, large: usize) -> Vec<usize> {
    (0..small).chain(large..large + small).collect()
}

fn check_projection(p: &DMatrix<f64>, name: &str, k: usize) -> Result<()> {
    let n = p.nrows();
    if n != p.ncols() || n != 2 * k {
        return Err(Error::DimensionMismatch {
            expected: 2 * k,
            found: n,
        });
    }
    let sym = (p - p.transpose()).amax();
    let idem = (p * p - p).amax();
    if sym > 1e-10 || idem > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "{name} at K = {k} is not an orthogonal projection"
        )));
    }
    Ok(())
}

/// Singular values of `P_K − Q_K` over a sweep of truncation orders.
///
/// The pair at a smaller order must be the compression of the pair at the
/// next larger order to the smaller coordinates; otherwise the sweep would
/// compare unrelated operators and the input is rejected.
pub fn projection_difference_report<F>(pair_at: F, orders: &[usize]) -> Result<DecayTable>
where
    F: Fn(usize) -> Result<(DMatrix<f64>, DMatrix<f64>)>,
{
    let mut rows = Vec::with_capacity(orders.len());
    let mut prev: Option<(usize, DMatrix<f64>, DMatrix<f64>)> = None;
    for &k in orders {
        let (p, q) = pair_at(k)?;
        check_projection(&p, "P", k)?;
        check_projection(&q, "Q", k)?;
        if let Some((k0, p0, q0)) = &prev {
            if *k0 >= k {
                return Err(Error::InvalidInput(
                    "truncation orders must increase".into(),
                ));
            }
            let idx = embedding(*k0, k);
            let sub = |m: &DMatrix<f64>| {
                DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
            };
            if (sub(&p) - p0).amax() > 1e-9 || (sub(&q) - q0).amax() > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "projections at K = {k0} and K = {k} are not compatible"
                )));
            }
        }
        let mut s = linalg::singular_values_asc(&(&p - &q));
        s.reverse();
        rows.push(DecayRow {
            k,
            singular_values: s,
        });
        prev = Some((k, p, q));
    }
    Ok(DecayTable { rows })
}
