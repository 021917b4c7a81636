//! Numerical tolerances and the endpoint convention shared by every index
//! computation in the crate.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Orthonormality and isotropy tolerance for Lagrangian frames.
pub const FRAME_TOL: f64 = 1e-10;
/// Singular values below this count towards an intersection dimension.
pub const RANK_TOL: f64 = 1e-8;
/// Crossing forms with an eigenvalue smaller than this are non-regular.
pub const CROSSING_FORM_TOL: f64 = 1e-8;
/// Eigenvalues of a selfadjoint realization closer than this to zero are
/// treated as lying exactly on zero.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-9;
/// Finite-difference step used when differentiating a path in a chart.
pub const FD_STEP: f64 = 1e-6;
/// Bisection stops once an interval is shorter than this.
pub const MIN_INTERVAL: f64 = 1e-10;
/// Maximal gap-metric distance between successive samples of a path.
pub const MAX_SAMPLE_GAP: f64 = 0.5;

/// How crossings that sit exactly on an endpoint of a path are weighted.
///
/// Interior crossings always contribute their full signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EndpointConvention {
    /// Half the signature at both endpoints. Values lie in ½ℤ; the Hörmander
    /// index is antisymmetric under exchanging its two pairs.
    #[default]
    Symmetric,
    /// Positive part of the signature at `t = 0`, negative part at `t = 1`.
    /// Integer valued.
    LeftClosed,
}

/// The convention used unless a caller overrides it.
pub const DEFAULT_CONVENTION: EndpointConvention = EndpointConvention::Symmetric;

impl EndpointConvention {
    /// Contribution, in half units, of a crossing at `t = 0` whose form has
    /// `pos` positive and `neg` negative eigenvalues.
    pub fn start_halves(self, pos: usize, neg: usize) -> i64 {
        match self {
            EndpointConvention::Symmetric => pos as i64 - neg as i64,
            EndpointConvention::LeftClosed => 2 * pos as i64,
        }
    }

    /// Contribution, in half units, of a crossing at `t = 1`.
    pub fn end_halves(self, pos: usize, neg: usize) -> i64 {
        match self {
            EndpointConvention::Symmetric => pos as i64 - neg as i64,
            EndpointConvention::LeftClosed => -2 * neg as i64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EndpointConvention::Symmetric => "symmetric",
            EndpointConvention::LeftClosed => "left-closed",
        }
    }
}

impl fmt::Display for EndpointConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EndpointConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symmetric" => Ok(EndpointConvention::Symmetric),
            "left-closed" => Ok(EndpointConvention::LeftClosed),
            other => Err(format!(
                "unknown convention `{other}` (expected `symmetric` or `left-closed`)"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn left_closed_counts_positive_start_negative_end() {
        let c = EndpointConvention::LeftClosed;
        assert_eq!(c.start_halves(2, 1), 4);
        assert_eq!(c.end_halves(2, 1), -2);
    }

    #[test]
    fn symmetric_halves_signature() {
        let c = EndpointConvention::Symmetric;
        assert_eq!(c.start_halves(2, 1), 1);
        assert_eq!(c.end_halves(0, 3), -3);
    }

    #[test]
    fn parses_names() {
        for c in [
            EndpointConvention::Symmetric,
            EndpointConvention::LeftClosed,
        ] {
            assert_eq!(c.name().parse::<EndpointConvention>().unwrap(), c);
        }
        assert!("other".parse::<EndpointConvention>().is_err());
    }
}
