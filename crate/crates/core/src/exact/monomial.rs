use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::parse::format_rational;
use super::surd::QuadSurd;

static MAX_ROOT_DEGREE: AtomicU32 = AtomicU32::new(64);

/// Largest root degree the exact comparison will clear by exponentiation.
pub fn max_root_degree() -> u32 {
    MAX_ROOT_DEGREE.load(AtomicOrdering::Relaxed)
}

/// Sets the root-degree cap from a precision budget in bits (degree = bits / 4).
/// Comparisons needing a larger degree come back undecided.
pub fn set_precision_bits(bits: u32) {
    MAX_ROOT_DEGREE.store((bits / 4).max(1), AtomicOrdering::Relaxed);
}

/// A positive real `∏ base_k ^ exp_k` with exact positive bases and rational
/// exponents. Every bound in the toolkit (`ψ(Q)/2`, `(2^{-m} Q ψ(Q)^m)^{-1/d}`,
/// `δ^{d/s} q^{-τ-1}`, ...) has this shape, so strict comparisons against it
/// can be settled exactly by raising both sides to the common root degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    factors: Vec<(QuadSurd, BigRational)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { factors: Vec::new() }
    }

    /// `base ^ exp`; `base` must be positive.
    pub fn power(base: QuadSurd, exp: BigRational) -> Self {
        assert!(base.signum() > 0, "monomial base must be positive");
        Monomial { factors: vec![(base, exp)] }.simplified()
    }

    pub fn constant(base: QuadSurd) -> Self {
        Self::power(base, BigRational::one())
    }

    pub fn integer(n: u64) -> Self {
        Self::constant(QuadSurd::rational(BigRational::from_integer(n.into())))
    }

    pub fn rational(r: BigRational) -> Self {
        Self::constant(QuadSurd::rational(r))
    }

    /// `n ^ (num/den)`.
    pub fn int_pow(n: u64, exp: BigRational) -> Self {
        Self::power(QuadSurd::rational(BigRational::from_integer(n.into())), exp)
    }

    pub fn factors(&self) -> &[(QuadSurd, BigRational)] {
        &self.factors
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Monomial { factors }.simplified()
    }

    pub fn pow(&self, e: &BigRational) -> Self {
        Monomial {
            factors: self.factors.iter().map(|(b, x)| (b.clone(), x * e)).collect(),
        }
        .simplified()
    }

    pub fn recip(&self) -> Self {
        self.pow(&-BigRational::one())
    }

    /// Merges repeated bases and drops trivial factors.
    fn simplified(self) -> Self {
        let mut out: Vec<(QuadSurd, BigRational)> = Vec::with_capacity(self.factors.len());
        for (base, exp) in self.factors {
            if let Some(slot) = out.iter_mut().find(|(b, _)| *b == base) {
                slot.1 += exp;
            } else {
                out.push((base, exp));
            }
        }
        let one = QuadSurd::one();
        out.retain(|(b, e)| !e.is_zero() && *b != one);
        Monomial { factors: out }
    }

    /// True when the factors cancel symbolically.
    pub fn is_structurally_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn to_f64(&self) -> f64 {
        if self.factors.iter().all(|(_, e)| e.is_integer()) {
            return self
                .factors
                .iter()
                .map(|(b, e)| b.to_f64().powi(e.to_integer().to_i32().unwrap_or(i32::MAX)))
                .product();
        }
        let log: f64 = self
            .factors
            .iter()
            .map(|(b, e)| e.to_f64().unwrap_or(f64::NAN) * b.to_f64().ln())
            .sum();
        log.exp()
    }

    /// Relative error bound on [`Monomial::to_f64`].
    pub fn rel_error(&self) -> f64 {
        let log_mag: f64 = self
            .factors
            .iter()
            .map(|(b, e)| (e.to_f64().unwrap_or(f64::INFINITY) * b.to_f64().ln()).abs() + e.to_f64().unwrap_or(0.0).abs())
            .sum();
        16.0 * f64::EPSILON * (1.0 + log_mag) * (1 + self.factors.len()) as f64
    }

    /// Common denominator of the exponents.
    pub fn root_degree(&self) -> BigRational {
        let l = self
            .factors
            .iter()
            .fold(num_bigint::BigInt::one(), |acc, (_, e)| acc.lcm(e.denom()));
        BigRational::from_integer(l)
    }

    /// `self ^ degree` as an exact field element, when `degree` clears every
    /// exponent denominator and all bases share a field.
    fn exact_power(&self, degree: u32) -> Option<QuadSurd> {
        let mut acc = QuadSurd::one();
        let deg = BigRational::from_integer(degree.into());
        for (base, e) in &self.factors {
            let k = (e * &deg).to_integer();
            let kk = k.abs().to_u32()?;
            let mut term = base.pow(kk);
            if k.is_negative() {
                term = term.checked_inv()?;
            }
            acc = acc.checked_mul(&term)?;
        }
        Some(acc)
    }

    /// Exact comparison of a real `x` against this positive monomial.
    /// `None` when the root degree exceeds the cap or the fields differ.
    pub fn cmp_exact(&self, x: &QuadSurd) -> Option<Ordering> {
        if x.signum() <= 0 {
            return Some(Ordering::Less);
        }
        let degree = self.root_degree().to_integer().to_u32()?;
        if degree > max_root_degree() {
            return None;
        }
        let rhs = self.exact_power(degree)?;
        x.pow(degree).checked_cmp(&rhs)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, (b, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "({b})^({})", format_rational(e))?;
        }
        Ok(())
    }
}

/// Outcome of a strict-inequality test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    Yes,
    No,
    /// Neither the float filter nor exact arithmetic could settle it.
    Undecided,
}

impl Decision {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Decision::Yes
        } else {
            Decision::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Decision::Yes
    }

    pub fn and(self, other: Decision) -> Decision {
        match (self, other) {
            (Decision::No, _) | (_, Decision::No) => Decision::No,
            (Decision::Yes, Decision::Yes) => Decision::Yes,
            _ => Decision::Undecided,
        }
    }
}

/// Float filter for `x < bound`, where `x` carries an absolute error bound
/// and `bound` a relative one. `None` when the intervals overlap.
#[inline]
pub fn filter_lt(x: f64, x_err: f64, bound: f64, bound_rel_err: f64) -> Option<bool> {
    let slack = bound.abs() * bound_rel_err;
    if x + x_err < bound - slack {
        Some(true)
    } else if x - x_err > bound + slack {
        Some(false)
    } else {
        None
    }
}

/// Decides `|x| < bound` for an exact `x`: float filter first, exact fallback.
pub fn abs_lt(x: &QuadSurd, bound: &Monomial) -> Decision {
    let xf = x.to_f64().abs();
    if let Some(b) = filter_lt(xf, x.f64_error(), bound.to_f64(), bound.rel_error()) {
        return Decision::from_bool(b);
    }
    match bound.cmp_exact(&x.abs()) {
        Some(Ordering::Less) => Decision::Yes,
        Some(_) => Decision::No,
        None => Decision::Undecided,
    }
}
