//! Arbitrary-precision rational scalars.
//!
//! `num::BigRational` already maintains the canonical form we rely on
//! everywhere (lowest terms, positive denominator, zero as 0/1); this module
//! adds the text round-trip used by the file formats: integers print without
//! a denominator (`"-3"`), everything else as `"num/den"` (`"2/3"`).

use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};

pub type Rational = num::BigRational;

/// Shorthand for small rational constants.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for small integer constants.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let numer: BigInt = num
        .parse()
        .map_err(|_| format!("invalid rational `{s}`: bad numerator"))?;
    let denom: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| format!("invalid rational `{s}`: bad denominator"))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(format!("invalid rational `{s}`: zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

/// True when the value is an integer `>= 0`.
pub fn is_nonneg_integer(q: &Rational) -> bool {
    q.denom().is_one() && !q.numer().is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_after_arithmetic() {
        let a = rat(2, 4);
        assert_eq!(a, rat(1, 2));
        assert_eq!(a.numer(), &BigInt::from(1));
        assert_eq!(a.denom(), &BigInt::from(2));

        let b = rat(1, -3);
        assert_eq!(b.denom(), &BigInt::from(3));
        assert_eq!(b.numer(), &BigInt::from(-1));

        let zero = rat(0, -7);
        assert!(zero.is_zero());
        assert_eq!(zero.denom(), &BigInt::from(1));

        let sum = rat(1, 6) + rat(1, 3);
        assert_eq!(sum, rat(1, 2));
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "7", "-3", "2/3", "-5/4", "22/7"] {
            let q = parse_rational(s).unwrap();
            assert_eq!(format_rational(&q), s);
        }
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert_eq!(format_rational(&parse_rational("1/-2").unwrap()), "-1/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/").is_err());
    }
}
