use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::parse::format_rational;

/// An exact element `a + b·√r` of a real quadratic field, with `a, b`
/// rational and `r` a non-square positive integer (or `b = r = 0` for a
/// plain rational).
///
/// Two surds can be combined only when they live in the same field; the
/// binary operations return `None` otherwise. Rationals combine with
/// anything.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    a: BigRational,
    b: BigRational,
    r: BigInt,
}

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

impl QuadSurd {
    pub fn rational(a: BigRational) -> Self {
        QuadSurd {
            a,
            b: BigRational::zero(),
            r: BigInt::zero(),
        }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::rational(BigRational::new(n.into(), d.into()))
    }

    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    /// `a + b·√r`. Panics if `r < 0`.
    pub fn new(a: BigRational, b: BigRational, r: BigInt) -> Self {
        assert!(!r.is_negative(), "negative radicand");
        if b.is_zero() || r.is_zero() {
            return Self::rational(a);
        }
        if let Some(s) = exact_sqrt(&r) {
            return Self::rational(a + b * BigRational::from_integer(s));
        }
        let mut r = r;
        let mut b = b;
        for &p in &SMALL_PRIMES {
            let sq = BigInt::from(p * p);
            while r.is_multiple_of(&sq) {
                r /= &sq;
                b *= BigRational::from_integer(p.into());
            }
        }
        QuadSurd { a, b, r }
    }

    /// Exact square root of a non-negative rational.
    pub fn sqrt(x: &BigRational) -> Option<Self> {
        if x.is_negative() {
            return None;
        }
        let den = x.denom().clone();
        let radicand = x.numer() * &den;
        Some(Self::new(
            BigRational::zero(),
            BigRational::new(BigInt::one(), den),
            radicand,
        ))
    }

    /// `√n` for a non-negative integer.
    pub fn sqrt_int(n: u64) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), BigInt::from(n))
    }

    /// The golden-ratio conjugate `φ − 1 = (√5 − 1)/2`.
    pub fn golden() -> Self {
        Self::new(
            BigRational::new((-1).into(), 2.into()),
            BigRational::new(1.into(), 2.into()),
            5.into(),
        )
    }

    /// `√2 − 1`.
    pub fn sqrt2_minus_one() -> Self {
        Self::new(BigRational::from_integer((-1).into()), BigRational::one(), 2.into())
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_coefficient(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.r
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Rewrites `self` and `other` over a common radicand, if one exists.
    fn unify(&self, other: &Self) -> Option<(BigRational, BigRational, BigRational, BigRational, BigInt)> {
        if other.b.is_zero() {
            return Some((self.a.clone(), self.b.clone(), other.a.clone(), BigRational::zero(), self.r.clone()));
        }
        if self.b.is_zero() {
            return Some((self.a.clone(), BigRational::zero(), other.a.clone(), other.b.clone(), other.r.clone()));
        }
        if self.r == other.r {
            return Some((self.a.clone(), self.b.clone(), other.a.clone(), other.b.clone(), self.r.clone()));
        }
        // √r2 = (k / r1)·√r1 when r1·r2 = k².
        let k = exact_sqrt(&(&self.r * &other.r))?;
        let b2 = &other.b * BigRational::new(k, self.r.clone());
        Some((self.a.clone(), self.b.clone(), other.a.clone(), b2, self.r.clone()))
    }

    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        let (a1, b1, a2, b2, r) = self.unify(other)?;
        Some(Self::new(a1 + a2, b1 + b2, r))
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let (a1, b1, a2, b2, r) = self.unify(other)?;
        Some(Self::new(a1 - a2, b1 - b2, r))
    }

    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        let (a1, b1, a2, b2, r) = self.unify(other)?;
        let rr = BigRational::from_integer(r.clone());
        let a = &a1 * &a2 + &b1 * &b2 * rr;
        let b = a1 * b2 + a2 * b1;
        Some(Self::new(a, b, r))
    }

    pub fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let rr = BigRational::from_integer(self.r.clone());
        let norm = &self.a * &self.a - &self.b * &self.b * rr;
        Some(Self::new(&self.a / &norm, -&self.b / &norm, self.r.clone()))
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        self.checked_mul(&other.checked_inv()?)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(&self.a * k, &self.b * k, self.r.clone())
    }

    pub fn add_rational(&self, k: &BigRational) -> Self {
        QuadSurd {
            a: &self.a + k,
            b: self.b.clone(),
            r: self.r.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        QuadSurd {
            a: -&self.a,
            b: -&self.b,
            r: self.r.clone(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base).expect("same field");
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base).expect("same field");
            }
        }
        acc
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // Opposite signs: the larger of a² and b²r wins. They cannot tie
        // because r is not a perfect square.
        let a2 = &self.a * &self.a;
        let b2r = &self.b * &self.b * BigRational::from_integer(self.r.clone());
        if a2 > b2r {
            sa
        } else {
            sb
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Exact comparison, `None` when the two live in different fields.
    pub fn checked_cmp(&self, other: &Self) -> Option<Ordering> {
        let diff = self.checked_sub(other)?;
        Some(diff.signum().cmp(&0))
    }

    pub fn cmp_rational(&self, k: &BigRational) -> Ordering {
        self.add_rational(&-k).signum().cmp(&0)
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        // Integer guess from floor(a) + floor(b√r), then correct by exact
        // comparison; the guess is off by at most 2.
        let mut k = self.a.floor().to_integer();
        if !self.b.is_zero() {
            let t = &self.b * &self.b * BigRational::from_integer(self.r.clone());
            let root = (t.numer() * t.denom()).sqrt();
            let s = BigRational::new(root, t.denom().clone()).floor().to_integer();
            if self.b.is_positive() {
                k += s;
            } else {
                k -= s + 1;
            }
        }
        loop {
            let kr = BigRational::from_integer(k.clone());
            if self.cmp_rational(&kr) == Ordering::Less {
                k -= 1;
                continue;
            }
            let k1 = BigRational::from_integer(&k + 1);
            if self.cmp_rational(&k1) != Ordering::Less {
                k += 1;
                continue;
            }
            return k;
        }
    }

    /// Nearest integer, ties resolved to even.
    pub fn round_half_even(&self) -> BigInt {
        let f = self.floor();
        let half = BigRational::from_integer(f.clone()) + BigRational::new(1.into(), 2.into());
        match self.cmp_rational(&half) {
            Ordering::Less => f,
            Ordering::Greater => f + 1,
            Ordering::Equal => {
                if f.is_even() {
                    f
                } else {
                    f + 1
                }
            }
        }
    }

    /// Distance to the nearest integer, `‖x‖`.
    pub fn dist_to_integer(&self) -> Self {
        let f = BigRational::from_integer(self.floor());
        let lo = self.add_rational(&-&f);
        let hi = lo.add_rational(&-BigRational::one()).neg();
        if lo.checked_cmp(&hi) == Some(Ordering::Greater) {
            hi
        } else {
            lo
        }
    }

    /// Opposite signs on the two parts: evaluating `a + b√r` directly would
    /// cancel, so go through the conjugate `(a² − b²r)/(a − b√r)`.
    fn cancels(&self) -> bool {
        sign_of(&self.a) * sign_of(&self.b) < 0
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let s = b * self.r.to_f64().unwrap_or(f64::NAN).sqrt();
        let direct = a + s;
        if self.cancels() && direct.abs() < 0.25 * a.abs().max(s.abs()) {
            let norm = &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.r.clone());
            norm.to_f64().unwrap_or(f64::NAN) / (a - s)
        } else {
            direct
        }
    }

    /// Upper bound on `|to_f64() − self|`.
    pub fn f64_error(&self) -> f64 {
        let scale = if self.b.is_zero() {
            self.a.to_f64().unwrap_or(f64::INFINITY).abs()
        } else if self.cancels() {
            // direct sum loses at most a factor 4 of magnitude; conjugate is relative
            4.0 * self.to_f64().abs()
        } else {
            let a = self.a.to_f64().unwrap_or(f64::INFINITY).abs();
            let b = self.b.to_f64().unwrap_or(f64::INFINITY).abs();
            a + b * self.r.to_f64().unwrap_or(f64::INFINITY).sqrt()
        };
        8.0 * f64::EPSILON * scale + f64::MIN_POSITIVE
    }
}

fn sign_of(x: &BigRational) -> i8 {
    match x.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl From<BigRational> for QuadSurd {
    fn from(a: BigRational) -> Self {
        Self::rational(a)
    }
}

impl From<i64> for QuadSurd {
    fn from(n: i64) -> Self {
        Self::integer(n)
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return f.write_str(&format_rational(&self.a));
        }
        if !self.a.is_zero() {
            write!(f, "{}+", format_rational(&self.a))?;
        }
        write!(f, "{}*sqrt({})", format_rational(&self.b), self.r)
    }
}
