use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Exact rational used for defects and `p * count` products.
pub type Exact = Ratio<i128>;

/// An edge density `p = a/b` with `0 < a < b` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RationalDensity {
    a: u64,
    b: u64,
}

fn gcd(mut x: u64, mut y: u64) -> u64 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

impl RationalDensity {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        if a == 0 || a >= b {
            return invalid(format!("density {a}/{b} must satisfy 0 < a < b"));
        }
        if gcd(a, b) != 1 {
            return invalid(format!("density {a}/{b} is not in lowest terms"));
        }
        Ok(RationalDensity { a, b })
    }

    pub const HALF: RationalDensity = RationalDensity { a: 1, b: 2 };

    pub fn numer(&self) -> u64 {
        self.a
    }

    pub fn denom(&self) -> u64 {
        self.b
    }

    pub fn value(&self) -> Exact {
        Ratio::new(self.a as i128, self.b as i128)
    }

    pub fn as_f64(&self) -> f64 {
        self.a as f64 / self.b as f64
    }

    /// `|count - p * total|` computed exactly.
    pub fn defect(&self, count: u128, total: u128) -> Exact {
        let lhs = Ratio::from_integer(count as i128);
        let rhs = self.value() * Ratio::from_integer(total as i128);
        let d = lhs - rhs;
        if d < Ratio::from_integer(0) {
            -d
        } else {
            d
        }
    }
}

impl fmt::Display for RationalDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.b)
    }
}

impl FromStr for RationalDensity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| Error::InvalidParameter(format!("density {s:?} must be written a/b")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| Error::InvalidParameter(format!("density {s:?}: {e}")))
        };
        RationalDensity::new(parse(a)?, parse(b)?)
    }
}

impl TryFrom<String> for RationalDensity {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<RationalDensity> for String {
    fn from(p: RationalDensity) -> String {
        p.to_string()
    }
}

/// Renders an exact rational as `"a/b"` (or `"a"` for integers).
pub fn fraction_string(x: &Exact) -> String {
    if *x.denom() == 1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Exact) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(RationalDensity::new(1, 1).is_err());
        assert!(RationalDensity::new(0, 3).is_err());
        assert!(RationalDensity::new(2, 4).is_err());
        assert!(RationalDensity::new(3, 2).is_err());
        let p: RationalDensity = "1/3".parse().unwrap();
        assert_eq!((p.numer(), p.denom()), (1, 3));
        assert!("1-3".parse::<RationalDensity>().is_err());
        assert_eq!(p.to_string(), "1/3");
    }

    #[test]
    fn exact_defect() {
        let p = RationalDensity::new(3, 10).unwrap();
        assert_eq!(p.defect(3, 10), Ratio::from_integer(0));
        assert_eq!(p.defect(0, 10), Ratio::from_integer(3));
        assert_eq!(fraction_string(&p.defect(1, 5)), "1/2");
        assert_eq!(fraction_string(&RationalDensity::HALF.defect(20, 20)), "10");
    }
}
