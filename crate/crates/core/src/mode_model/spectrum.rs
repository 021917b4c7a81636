use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::operator_lab::ZeroModeRule;

/// Spectral data of a tangential operator with the pairing `k ↔ −k`.
///
/// Only `ℓ_k` for `k = 1..=K` is stored; `ℓ_{−k} = −ℓ_k`. Modes with
/// `0 < |k| ≤ N₀` are zero modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentialSpectrum {
    ell: Vec<f64>,
    n0: usize,
    law: Option<Law>,
    pub zero_rule: ZeroModeRule,
}

/// Closed-form eigenvalue laws that extend to any truncation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    /// `ℓ_k = sign(k)·max(|k| − N₀, 0)`.
    Linear,
}

/// On-disk form of a spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumFile {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N0", default)]
    pub n0: usize,
    /// `(k, ℓ_k)` pairs for every nonzero `k` in `[−K, K]`.
    #[serde(default)]
    pub entries: Option<Vec<(i64, f64)>>,
    #[serde(default)]
    pub law: Option<Law>,
    #[serde(default)]
    pub zero_rule: ZeroModeRule,
}

impl TangentialSpectrum {
    /// `ℓ_k = sign(k)·max(|k| − N₀, 0)` truncated at `K`.
    pub fn linear(k: usize, n0: usize) -> Result<Self> {
        let ell = (1..=k).map(|j| j.saturating_sub(n0) as f64).collect();
        Self::from_positive(ell, n0, Some(Law::Linear), ZeroModeRule::default())
    }

    /// From `ℓ_1, …, ℓ_K`.
    pub fn from_positive(
        ell: Vec<f64>,
        n0: usize,
        law: Option<Law>,
        zero_rule: ZeroModeRule,
    ) -> Result<Self> {
        if ell.is_empty() {
            return Err(Error::InvalidInput("spectrum needs K ≥ 1".into()));
        }
        if n0 > ell.len() {
            return Err(Error::InvalidInput(format!(
                "N0 = {n0} exceeds K = {}",
                ell.len()
            )));
        }
        for (i, &l) in ell.iter().enumerate() {
            let k = i + 1;
            let ok = if k <= n0 {
                l == 0.0
            } else {
                l > 0.0 && l.is_finite()
            };
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "ℓ_{k} = {l} violates the sign pattern for N0 = {n0}"
                )));
            }
        }
        Ok(TangentialSpectrum {
            ell,
            n0,
            law,
            zero_rule,
        })
    }

    pub fn from_file_data(f: &SpectrumFile) -> Result<Self> {
        match (&f.entries, f.law) {
            (Some(_), Some(_)) => Err(Error::InvalidInput(
                "give either `entries` or `law`, not both".into(),
            )),
            (None, None) | (None, Some(Law::Linear)) => {
                let mut s = Self::linear(f.k, f.n0)?;
                s.zero_rule = f.zero_rule;
                Ok(s)
            }
            (Some(entries), None) => {
                let mut pos = vec![None; f.k];
                let mut neg = vec![None; f.k];
                for &(k, l) in entries {
                    let idx = k.unsigned_abs() as usize;
                    if k == 0 || idx > f.k {
                        return Err(Error::InvalidInput(format!(
                            "mode index {k} outside [−K, K] \\ {{0}}"
                        )));
                    }
                    let slot = if k > 0 {
                        &mut pos[idx - 1]
                    } else {
                        &mut neg[idx - 1]
                    };
                    if slot.replace(l).is_some() {
                        return Err(Error::InvalidInput(format!("mode {k} listed twice")));
                    }
                }
                let mut ell = Vec::with_capacity(f.k);
                for i in 0..f.k {
                    match (pos[i], neg[i]) {
                        (Some(a), Some(b)) if a == -b => ell.push(a),
                        (Some(a), Some(b)) => {
                            return Err(Error::InvalidInput(format!(
                                "ℓ_{} = {a} but ℓ_-{} = {b}",
                                i + 1,
                                i + 1
                            )))
                        }
                        _ => return Err(Error::InvalidInput(format!("mode ±{} missing", i + 1))),
                    }
                }
                Self::from_positive(ell, f.n0, None, f.zero_rule)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: SpectrumFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("spectrum file: {e}")))?;
        Self::from_file_data(&f)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_file_data(&self) -> SpectrumFile {
        let entries = if self.law.is_some() {
            None
        } else {
            Some(
                (1..=self.order() as i64)
                    .flat_map(|k| [(k, self.ell(k)), (-k, self.ell(-k))])
                    .collect(),
            )
        };
        SpectrumFile {
            k: self.order(),
            n0: self.n0,
            entries,
            law: self.law,
            zero_rule: self.zero_rule,
        }
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.ell.len()
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Number of coordinates, `2K`.
    pub fn dim(&self) -> usize {
        2 * self.ell.len()
    }

    /// `ℓ_k` for `0 < |k| ≤ K`.
    pub fn ell(&self, k: i64) -> f64 {
        let v = self.ell[k.unsigned_abs() as usize - 1];
        if k > 0 {
            v
        } else {
            -v
        }
    }

    /// Coordinate index of mode `k`: modes `1..=K` first, then `−1..=−K`.
    pub fn axis(&self, k: i64) -> usize {
        let i = k.unsigned_abs() as usize - 1;
        if k > 0 {
            i
        } else {
            self.order() + i
        }
    }

    /// Mode index of a coordinate.
    pub fn mode(&self, axis: usize) -> i64 {
        let k = self.order();
        if axis < k {
            axis as i64 + 1
        } else {
            -((axis - k) as i64 + 1)
        }
    }

    /// The same spectrum at another truncation order. Shrinking always
    /// works; growing needs a closed-form law.
    pub fn with_order(&self, k: usize) -> Result<Self> {
        if k <= self.order() {
            let mut s = self.clone();
            s.ell.truncate(k);
            s.n0 = s.n0.min(k);
            return Ok(s);
        }
        match self.law {
            Some(Law::Linear) => {
                let mut s = Self::linear(k, self.n0)?;
                s.zero_rule = self.zero_rule;
                Ok(s)
            }
            None => Err(Error::InvalidInput(format!(
                "spectrum given by explicit entries up to K = {} cannot be extended to K = {k}",
                self.order()
            ))),
        }
    }

    /// Whether mode `k > 0` or its partner `−k` belongs to the positive half
    /// `θ₊`: nonzero modes by the sign of `ℓ`, zero modes by the rule.
    pub fn plus_axis_of_pair(&self, k: usize) -> usize {
        let k = k as i64;
        if self.ell(k) > 0.0 || self.zero_rule == ZeroModeRule::FirstPositive {
            self.axis(k)
        } else {
            self.axis(-k)
        }
    }

    /// Coordinates spanning `θ₊`, one per pair.
    pub fn plus_axes(&self) -> Vec<usize> {
        (1..=self.order())
            .map(|k| self.plus_axis_of_pair(k))
            .collect()
    }

    /// Coordinates spanning `θ₋ = σθ₊`.
    pub fn minus_axes(&self) -> Vec<usize> {
        (1..=self.order())
            .map(|k| {
                let p = self.plus_axis_of_pair(k);
                if p == self.axis(k as i64) {
                    self.axis(-(k as i64))
                } else {
                    self.axis(k as i64)
                }
            })
            .collect()
    }
}
