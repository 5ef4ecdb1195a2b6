use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use super::monomial::{filter_lt, Decision, Monomial};
use super::parse::{format_rational, parse_rational, rational_from_f64};
use super::surd::QuadSurd;
use crate::error::{Error, Result};

/// Relative tolerance attached to values that only exist as doubles.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// A real number carried as a double with an absolute error bound, plus the
/// exact field element when one is known.
#[derive(Clone, Debug, PartialEq)]
pub struct Real {
    approx: f64,
    err: f64,
    exact: Option<QuadSurd>,
}

impl Real {
    pub fn exact(x: QuadSurd) -> Self {
        Real {
            approx: x.to_f64(),
            err: x.f64_error(),
            exact: Some(x),
        }
    }

    pub fn rational(r: BigRational) -> Self {
        Self::exact(QuadSurd::rational(r))
    }

    pub fn integer(n: i64) -> Self {
        Self::exact(QuadSurd::integer(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::exact(QuadSurd::ratio(n, d))
    }

    /// A value known only as a double; it gets the float tolerance as its
    /// error bound and never takes the exact path.
    pub fn float(x: f64) -> Self {
        Real {
            approx: x,
            err: x.abs() * FLOAT_TOLERANCE + f64::MIN_POSITIVE,
            exact: None,
        }
    }

    /// A double with an explicit absolute error bound.
    pub fn float_with_error(x: f64, err: f64) -> Self {
        Real {
            approx: x,
            err,
            exact: None,
        }
    }

    /// Parses a real literal: `a/b`, decimals, `golden` (φ−1), `sqrt2`
    /// (√2−1), `sqrt(n)`, or `float:<x>` for an inexact double.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "golden" => return Ok(Self::exact(QuadSurd::golden())),
            "sqrt2" => return Ok(Self::exact(QuadSurd::sqrt2_minus_one())),
            _ => {}
        }
        if let Some(inner) = t.strip_prefix("sqrt(").and_then(|x| x.strip_suffix(')')) {
            let r = parse_rational(inner)?;
            return QuadSurd::sqrt(&r)
                .map(Self::exact)
                .ok_or_else(|| Error::parse("real", s, "negative radicand"));
        }
        if let Some(inner) = t.strip_prefix("float:") {
            let x: f64 = inner
                .trim()
                .parse()
                .map_err(|_| Error::parse("real", s, "bad float"))?;
            return Ok(Self::float(x));
        }
        parse_rational(t).map(Self::rational)
    }

    /// Converts a double through its shortest decimal, keeping it exact.
    pub fn from_f64(x: f64) -> Result<Self> {
        rational_from_f64(x).map(Self::rational)
    }

    pub fn approx(&self) -> f64 {
        self.approx
    }

    pub fn error(&self) -> f64 {
        self.err
    }

    pub fn exact_value(&self) -> Option<&QuadSurd> {
        self.exact.as_ref()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.exact.as_ref().and_then(|x| x.as_rational())
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Exactly known to be irrational.
    pub fn is_irrational(&self) -> bool {
        self.exact.as_ref().is_some_and(|x| !x.is_rational())
    }

    fn combine(approx: f64, err: f64, exact: Option<QuadSurd>) -> Self {
        match exact {
            Some(x) => {
                let e = x.f64_error();
                Real {
                    approx: x.to_f64(),
                    err: e,
                    exact: Some(x),
                }
            }
            None => Real {
                approx,
                err: err + approx.abs() * f64::EPSILON,
                exact: None,
            },
        }
    }

    pub fn add(&self, o: &Real) -> Real {
        let exact = match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => a.checked_add(b),
            _ => None,
        };
        Self::combine(self.approx + o.approx, self.err + o.err, exact)
    }

    pub fn sub(&self, o: &Real) -> Real {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Real) -> Real {
        let exact = match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => a.checked_mul(b),
            _ => None,
        };
        let err = self.approx.abs() * o.err + o.approx.abs() * self.err + self.err * o.err;
        Self::combine(self.approx * o.approx, err, exact)
    }

    pub fn scale_int(&self, k: i64) -> Real {
        let exact = self
            .exact
            .as_ref()
            .map(|x| x.scale(&BigRational::from_integer(k.into())));
        Self::combine(self.approx * k as f64, self.err * (k as f64).abs(), exact)
    }

    pub fn neg(&self) -> Real {
        Real {
            approx: -self.approx,
            err: self.err,
            exact: self.exact.as_ref().map(QuadSurd::neg),
        }
    }

    pub fn abs(&self) -> Real {
        match &self.exact {
            Some(x) => Real::exact(x.abs()),
            None => Real {
                approx: self.approx.abs(),
                err: self.err,
                exact: None,
            },
        }
    }

    /// Decides `|self| < bound`.
    pub fn abs_lt(&self, bound: &Monomial) -> Decision {
        if let Some(b) = filter_lt(self.approx.abs(), self.err, bound.to_f64(), bound.rel_error()) {
            return Decision::from_bool(b);
        }
        match &self.exact {
            Some(x) => super::monomial::abs_lt(x, bound),
            None => Decision::Undecided,
        }
    }

    /// Decides `self < other`; `None` if undecidable.
    pub fn lt(&self, other: &Real) -> Option<bool> {
        let d = self.sub(other);
        if d.approx + d.err < 0.0 {
            return Some(true);
        }
        if d.approx - d.err > 0.0 {
            return Some(false);
        }
        let (a, b) = (self.exact.as_ref()?, other.exact.as_ref()?);
        a.checked_cmp(b).map(|o| o.is_lt())
    }

    /// `self ^ e` for a positive `self`. Stays exact when the result is
    /// rational or a square root of a rational; otherwise a double with a
    /// propagated error bound.
    pub fn pow_rational(&self, e: &BigRational) -> Real {
        if e.is_one() {
            return self.clone();
        }
        if let Some(r) = self.as_rational() {
            if let Some(x) = rational_pow_exact(r, e) {
                return Real::exact(x);
            }
        }
        let ef = e.to_f64().unwrap_or(f64::NAN);
        let approx = self.approx.powf(ef);
        let rel_in = if self.approx > 0.0 { self.err / self.approx } else { f64::INFINITY };
        let err = approx * (ef.abs() * rel_in * 1.01 + 8.0 * f64::EPSILON * (1.0 + (ef * self.approx.ln()).abs()));
        Real::float_with_error(approx, err)
    }

    /// The larger of two values; when they cannot be ordered the result is
    /// a double covering both.
    pub fn max(&self, other: &Real) -> Real {
        match self.lt(other) {
            Some(true) => other.clone(),
            Some(false) => self.clone(),
            None => {
                let hi = self.approx.max(other.approx);
                let spread = (self.approx - other.approx).abs();
                Real::float_with_error(hi, self.err.max(other.err) + spread)
            }
        }
    }

    pub fn min(&self, other: &Real) -> Real {
        self.neg().max(&other.neg()).neg()
    }

    /// Floor, exact when possible; the float floor otherwise.
    pub fn floor(&self) -> BigInt {
        let f = self.approx.floor();
        let near_integer = (self.approx - f) <= self.err || (f + 1.0 - self.approx) <= self.err;
        if near_integer || f.abs() > 9.0e15 {
            if let Some(x) = &self.exact {
                return x.floor();
            }
        }
        BigInt::from(f as i64)
    }

    pub fn floor_i64(&self) -> i64 {
        self.floor().to_i64().unwrap_or(if self.approx > 0.0 { i64::MAX } else { i64::MIN })
    }
}

/// `r ^ e` exactly, when that is rational or the square root of a rational.
fn rational_pow_exact(r: &BigRational, e: &BigRational) -> Option<QuadSurd> {
    if !r.is_positive() {
        return None;
    }
    let a = e.numer().to_i32()?;
    let b = e.denom().to_u32()?;
    if a.unsigned_abs() > 256 || b > 64 {
        return None;
    }
    let x = num_traits::pow(r.clone(), a.unsigned_abs() as usize);
    let x = if a < 0 { x.recip() } else { x };
    if b == 1 {
        return Some(QuadSurd::rational(x));
    }
    let (n, d) = (x.numer().nth_root(b), x.denom().nth_root(b));
    if num_traits::pow(n.clone(), b as usize) == *x.numer() && num_traits::pow(d.clone(), b as usize) == *x.denom() {
        return Some(QuadSurd::rational(BigRational::new(n, d)));
    }
    if b == 2 {
        return QuadSurd::sqrt(&x);
    }
    None
}

impl From<QuadSurd> for Real {
    fn from(x: QuadSurd) -> Self {
        Real::exact(x)
    }
}

/// `17`-significant-digit style output: exact rationals as `a/b`, other
/// values as the shortest round-trip decimal.
impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) => f.write_str(&format_rational(r)),
            None => write!(f, "{}", self.approx),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_symbolic_constants() {
        let g = Real::parse("golden").unwrap();
        assert!(g.is_irrational());
        assert!((g.approx() - 0.6180339887498949).abs() < 1e-16);
        let s = Real::parse("sqrt(2)").unwrap();
        assert!((s.approx() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(Real::parse("0.3").unwrap().as_rational().is_some());
        assert!(!Real::parse("float:0.3").unwrap().is_exact());
        assert!(Real::parse("sqrt(-1)").is_err());
    }

    #[test]
    fn exact_arithmetic_propagates() {
        let g = Real::parse("golden").unwrap();
        let sq = g.mul(&g).add(&g);
        assert_eq!(sq.as_rational(), Some(&BigRational::from_integer(1.into())));
        let mixed = g.add(&Real::float(0.1));
        assert!(!mixed.is_exact());
    }

    #[test]
    fn display_uses_fractions_when_exact() {
        assert_eq!(Real::integer(0).to_string(), "0/1");
        assert_eq!(Real::float(0.875).to_string(), "0.875");
    }

    #[test]
    fn rational_powers() {
        let r = Real::parse("1e-4").unwrap();
        assert_eq!(r.pow_rational(&BigRational::new(1.into(), 2.into())), Real::parse("1/100").unwrap());
        let t = Real::integer(2).pow_rational(&BigRational::new(1.into(), 2.into()));
        assert!(t.is_irrational());
        let u = Real::parse("1e-3").unwrap().pow_rational(&BigRational::new(7.into(), 8.into()));
        assert!(!u.is_exact());
        assert!((u.approx() - 2.371373705661655e-3).abs() < 1e-17);
        assert!(u.error() < 1e-16);
    }

    #[test]
    fn floor_near_integers_is_exact() {
        // 3·(1/3) sits on an integer; the float path alone could go either way.
        let x = Real::ratio(1, 3).scale_int(3);
        assert_eq!(x.floor_i64(), 1);
        let y = Real::ratio(-1, 3).scale_int(3);
        assert_eq!(y.floor_i64(), -1);
    }
}
