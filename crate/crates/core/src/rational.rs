//! Exact number kernel: arbitrary-precision rationals and a few helpers
//! used throughout the crate.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// All arithmetic in this crate is exact rational arithmetic. `Rational`
/// values are always reduced with a positive denominator (guaranteed by
/// `Ratio::new`).
pub type Rational = num_rational::BigRational;

/// Shorthand constructor from machine integers.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// 2^exp as a `BigInt`.
pub fn pow2(exp: u64) -> BigInt {
    BigInt::from(BigUint::one() << usize::try_from(exp).expect("exponent fits usize"))
}

/// Parses "a/b" or a plain integer "a".
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Input(format!("cannot parse rational from {text:?}"));
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer: BigInt = n.parse().map_err(|_| bad())?;
    let denom: BigInt = d.parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(Error::Input(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(numer, denom))
}

/// Canonical "numer/denom" form (also for integers, so files round-trip
/// without a special case).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// True when 0 <= r < 1.
pub fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && r < &Rational::one()
}

/// Reduces r into [0,1) modulo 1.
pub fn frac_mod1(r: &Rational) -> Rational {
    let f = r.fract();
    if f.is_negative() {
        f + Rational::one()
    } else {
        f
    }
}

/// If r is a dyadic rational p/2^e in lowest terms, returns e
/// (0 for integers). Returns `None` for non-dyadic rationals.
pub fn dyadic_exponent(r: &Rational) -> Option<u64> {
    let denom = r.denom().magnitude();
    if denom.is_one() {
        return Some(0);
    }
    let e = denom.trailing_zeros()?;
    if (denom >> e as usize).is_one() {
        Some(e)
    } else {
        None
    }
}

/// Lossy conversion for report output; exact values are carried separately.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for text in ["3/4", "-1/2", "0/1", "7/1"] {
            let r = parse_rational(text).unwrap();
            let back = parse_rational(&format_rational(&r)).unwrap();
            assert_eq!(r, back);
        }
        assert_eq!(parse_rational("5").unwrap(), rat(5, 1));
        assert_eq!(parse_rational(" 2/6 ").unwrap(), rat(1, 3));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn dyadic_detection() {
        assert_eq!(dyadic_exponent(&rat(1, 2)), Some(1));
        assert_eq!(dyadic_exponent(&rat(3, 8)), Some(3));
        assert_eq!(dyadic_exponent(&rat(2, 8)), Some(2)); // reduces to 1/4
        assert_eq!(dyadic_exponent(&rat(0, 1)), Some(0));
        assert_eq!(dyadic_exponent(&rat(1, 3)), None);
        assert_eq!(dyadic_exponent(&rat(5, 6)), None);
    }

    #[test]
    fn frac_wraps_negatives() {
        assert_eq!(frac_mod1(&rat(-1, 4)), rat(3, 4));
        assert_eq!(frac_mod1(&rat(9, 4)), rat(1, 4));
        assert_eq!(frac_mod1(&rat(2, 1)), rat(0, 1));
    }

    #[test]
    fn pow2_small_values() {
        assert_eq!(pow2(0), BigInt::from(1));
        assert_eq!(pow2(10), BigInt::from(1024));
    }
}
