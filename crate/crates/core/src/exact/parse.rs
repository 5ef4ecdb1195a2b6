//! Exact parsing of decimal and fraction literals into big rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Parses `"3/5"`, `"-12"`, `"0.6"`, `"1.25e-3"` into an exact rational.
///
/// Decimal input is read digit-for-digit, so `"0.6"` is `3/5` and not the
/// nearest binary double.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::parse("rational", input, "empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_decimal(num.trim()).ok_or_else(|| Error::parse("rational", input, "bad numerator"))?;
        let d = parse_decimal(den.trim()).ok_or_else(|| Error::parse("rational", input, "bad denominator"))?;
        if d.is_zero() {
            return Err(Error::parse("rational", input, "zero denominator"));
        }
        return Ok(n / d);
    }
    parse_decimal(s).ok_or_else(|| Error::parse("rational", input, "not a decimal or a/b literal"))
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all_digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Converts a double into the rational with the shortest decimal expansion
/// that round-trips to it, so `0.6_f64` becomes `3/5`.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::parse("rational", &x.to_string(), "not finite"));
    }
    // `{:?}` prints the shortest round-trip representation, possibly with an exponent.
    parse_rational(&format!("{x:?}"))
}

/// Formats an exact rational as `num/den` (always with a denominator).
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_literals() {
        assert_eq!(parse_rational("0.6").unwrap(), r(3, 5));
        assert_eq!(parse_rational("3/5").unwrap(), r(3, 5));
        assert_eq!(parse_rational("-12").unwrap(), r(-12, 1));
        assert_eq!(parse_rational("1.25e-3").unwrap(), r(1, 800));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        assert_eq!(parse_rational("2E2").unwrap(), r(200, 1));
        assert_eq!(parse_rational("0.7/2").unwrap(), r(7, 20));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "abc", "1/0", "1.2.3", "-", "1e", "0x10"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn doubles_round_trip_through_shortest_decimal() {
        assert_eq!(rational_from_f64(0.6).unwrap(), r(3, 5));
        assert_eq!(rational_from_f64(1e-20).unwrap(), BigRational::new(1.into(), num_traits::pow(BigInt::from(10), 20)));
        assert!(rational_from_f64(f64::NAN).is_err());
    }

    #[test]
    fn formats_with_denominator() {
        assert_eq!(format_rational(&BigRational::zero()), "0/1");
        assert_eq!(format_rational(&r(-6, 4)), "-3/2");
    }
}
