//! Exact rational probabilities.

use num::{BigInt, BigRational, One, Zero};

pub type Rational = BigRational;

/// `n/d` as an exact rational.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn q0() -> Rational {
    Rational::zero()
}

pub fn q1() -> Rational {
    Rational::one()
}

pub fn half() -> Rational {
    q(1, 2)
}

/// Canonical `num/den` rendering, denominator always present.
pub fn fmt_frac(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_frac(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rational::from_integer(n))
        }
    }
}

/// Lossy conversion for entropy computations.
pub fn to_f64(r: &Rational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().expect("rational representable as f64")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_roundtrip() {
        for (n, d) in [(0, 1), (1, 2), (3, 4), (7, 8), (1, 1)] {
            let r = q(n, d);
            assert_eq!(parse_frac(&fmt_frac(&r)).unwrap(), r);
        }
        assert_eq!(parse_frac("3"), Some(q(3, 1)));
        assert_eq!(parse_frac("1/0"), None);
    }
}
