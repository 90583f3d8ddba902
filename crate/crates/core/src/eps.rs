//! The accuracy parameter. Every algorithm here needs `1/eps` to be an
//! integer, so it is stored as that integer and compared by cross-multiplying.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpsError {
    #[error("eps must be of the form 1/m with m >= 1, got {0}")]
    NotUnitFraction(String),
    #[error("eps must be at most {max}, got 1/{m}")]
    TooLarge { m: u64, max: String },
}

/// `eps = 1/m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Eps {
    m: u64,
}

impl Eps {
    pub fn from_inverse(m: u64) -> Result<Eps, EpsError> {
        if m == 0 {
            return Err(EpsError::NotUnitFraction("1/0".into()));
        }
        Ok(Eps { m })
    }

    /// Accepts `num/den` only when it reduces to a unit fraction.
    pub fn from_ratio(num: u64, den: u64) -> Result<Eps, EpsError> {
        if num == 0 || den == 0 || den % num != 0 {
            return Err(EpsError::NotUnitFraction(format!("{num}/{den}")));
        }
        Eps::from_inverse(den / num)
    }

    /// The integer `1/eps`.
    pub fn inv(self) -> u64 {
        self.m
    }

    pub fn at_most_half(self) -> Result<Eps, EpsError> {
        if self.m < 2 {
            return Err(EpsError::TooLarge {
                m: self.m,
                max: "1/2".into(),
            });
        }
        Ok(self)
    }

    pub fn to_big(self) -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(self.m))
    }

    pub fn to_f64(self) -> f64 {
        1.0 / self.m as f64
    }

    /// `value <= eps * bound`
    pub fn fraction_le(self, value: i64, bound: i64) -> bool {
        (value as i128) * (self.m as i128) <= bound as i128
    }
}

impl fmt::Display for Eps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}", self.m)
    }
}

impl FromStr for Eps {
    type Err = EpsError;

    /// Parses `1/4`, `0.25` or `4` is rejected (it is not at most one).
    fn from_str(s: &str) -> Result<Eps, EpsError> {
        let bad = || EpsError::NotUnitFraction(s.to_string());
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            return Eps::from_ratio(a, b);
        }
        let v: f64 = s.parse().map_err(|_| bad())?;
        if !(v > 0.0 && v <= 1.0) {
            return Err(bad());
        }
        let m = (1.0 / v).round();
        if (1.0 / m - v).abs() > 1e-12 {
            return Err(bad());
        }
        Eps::from_inverse(m as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("1/4".parse::<Eps>().unwrap().inv(), 4);
        assert_eq!("2/8".parse::<Eps>().unwrap().inv(), 4);
        assert_eq!("0.1".parse::<Eps>().unwrap().inv(), 10);
        assert!("2/3".parse::<Eps>().is_err());
        assert!("0.3".parse::<Eps>().is_err());
        assert!("1/0".parse::<Eps>().is_err());
    }

    #[test]
    fn half_bound() {
        assert!(Eps::from_inverse(1).unwrap().at_most_half().is_err());
        assert!(Eps::from_inverse(2).unwrap().at_most_half().is_ok());
    }
}
