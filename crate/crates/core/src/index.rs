//! Index values and the reports that carry them.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub};

/// An element of ½ℤ, stored exactly as twice its value.
///
/// Under the left-closed convention every index is an integer; under the
/// symmetric convention endpoint crossings contribute half their signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInteger {
    twice: i64,
}

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger { twice: 0 };

    pub const fn from_halves(twice: i64) -> Self {
        HalfInteger { twice }
    }

    pub const fn from_int(n: i64) -> Self {
        HalfInteger { twice: 2 * n }
    }

    pub const fn halves(self) -> i64 {
        self.twice
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn as_integer(self) -> Option<i64> {
        self.is_integer().then_some(self.twice / 2)
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_zero(self) -> bool {
        self.twice == 0
    }
}

impl From<i64> for HalfInteger {
    fn from(n: i64) -> Self {
        HalfInteger::from_int(n)
    }
}

impl Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, rhs: Self) -> Self {
        HalfInteger::from_halves(self.twice + rhs.twice)
    }
}

impl AddAssign for HalfInteger {
    fn add_assign(&mut self, rhs: Self) {
        self.twice += rhs.twice;
    }
}

impl Sub for HalfInteger {
    type Output = HalfInteger;
    fn sub(self, rhs: Self) -> Self {
        HalfInteger::from_halves(self.twice - rhs.twice)
    }
}

impl Neg for HalfInteger {
    type Output = HalfInteger;
    fn neg(self) -> Self {
        HalfInteger::from_halves(-self.twice)
    }
}

impl Sum for HalfInteger {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(HalfInteger::ZERO, Add::add)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

// Serialized as a plain JSON number; halves are exact in binary floating point.
impl Serialize for HalfInteger {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_integer() {
            s.serialize_i64(self.twice / 2)
        } else {
            s.serialize_f64(self.to_f64())
        }
    }
}

impl<'de> Deserialize<'de> for HalfInteger {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        let twice = 2.0 * v;
        if (twice - twice.round()).abs() > 1e-12 {
            return Err(serde::de::Error::custom(format!(
                "{v} is not a half-integer"
            )));
        }
        Ok(HalfInteger::from_halves(twice.round() as i64))
    }
}

/// Which algorithm produced an index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    CrossingForm,
    UnitaryWinding,
    EigenvalueCount,
}

/// One signed event contributing to an index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t: f64,
    pub dim: usize,
    pub contribution: HalfInteger,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub value: HalfInteger,
    pub crossings: Vec<Crossing>,
    pub method: Method,
}

impl IndexReport {
    pub fn from_crossings(crossings: Vec<Crossing>, method: Method) -> Self {
        let value = crossings.iter().map(|c| c.contribution).sum();
        IndexReport {
            value,
            crossings,
            method,
        }
    }

    pub fn zero(method: Method) -> Self {
        IndexReport {
            value: HalfInteger::ZERO,
            crossings: Vec::new(),
            method,
        }
    }

    /// Checks that the logged contributions add up to the value.
    pub fn is_consistent(&self) -> bool {
        self.crossings
            .iter()
            .map(|c| c.contribution)
            .sum::<HalfInteger>()
            == self.value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_arithmetic() {
        let a = HalfInteger::from_halves(3);
        assert_eq!(a.to_string(), "3/2");
        assert_eq!((a + a).to_string(), "3");
        assert_eq!((a - a), HalfInteger::ZERO);
        assert_eq!((-a).halves(), -3);
        assert_eq!(HalfInteger::from_int(2).as_integer(), Some(2));
        assert_eq!(a.as_integer(), None);
    }

    #[test]
    fn json_roundtrip() {
        for h in [-3, -2, 0, 1, 4] {
            let v = HalfInteger::from_halves(h);
            let s = serde_json::to_string(&v).unwrap();
            assert_eq!(serde_json::from_str::<HalfInteger>(&s).unwrap(), v);
        }
        assert!(serde_json::from_str::<HalfInteger>("0.3").is_err());
    }

    #[test]
    fn report_sums_contributions() {
        let r = IndexReport::from_crossings(
            vec![
                Crossing {
                    t: 0.0,
                    dim: 1,
                    contribution: HalfInteger::from_halves(1),
                },
                Crossing {
                    t: 0.5,
                    dim: 1,
                    contribution: HalfInteger::from_int(-1),
                },
            ],
            Method::CrossingForm,
        );
        assert_eq!(r.value, HalfInteger::from_halves(-1));
        assert!(r.is_consistent());
    }
}
