//! Parsing and formatting helpers for exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::{Error, Result};

/// Parses `"7"` or `"num/den"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| bad())?;
            let d: BigInt = den.trim().parse().map_err(|_| bad())?;
            if d == BigInt::ZERO {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
    }
}

/// Formats a rational as `"num/den"` with a positive denominator, always
/// including the denominator (`9` becomes `"9/1"`). Used for JSON fields.
pub fn fmt_num_den(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Formats a rational compactly: bare integer when the denominator is one,
/// `"num/den"` otherwise. Used for the `a,b,c,d` form syntax.
pub fn fmt_compact(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Shorthand for a rational from a machine-integer pair.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for an integer rational.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational(" 12 / 9 ").unwrap(), rat(4, 3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn formatting() {
        assert_eq!(fmt_num_den(&rat(7, 9)), "7/9");
        assert_eq!(fmt_num_den(&int(9)), "9/1");
        assert_eq!(fmt_compact(&int(-4)), "-4");
        assert_eq!(fmt_compact(&rat(2, -4)), "-1/2");
    }
}
