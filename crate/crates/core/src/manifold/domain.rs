use std::fmt;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, Rational, Real};

/// An open axis-aligned box with rational corners.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    lower: Vec<Rational>,
    upper: Vec<Rational>,
}

impl BoxDomain {
    pub fn new(lower: Vec<Rational>, upper: Vec<Rational>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidParameter("box corners must be non-empty and of equal length".into()));
        }
        if let Some(i) = (0..lower.len()).find(|&i| lower[i] >= upper[i]) {
            return Err(Error::InvalidParameter(format!(
                "box side {i} is empty: {} >= {}",
                lower[i], upper[i]
            )));
        }
        Ok(BoxDomain { lower, upper })
    }

    /// `(0, 1)^d`.
    pub fn unit(d: usize) -> Self {
        Self::cube(d, Rational::from_integer(0.into()), Rational::from_integer(1.into()))
    }

    /// `(lo, hi)^d`.
    pub fn cube(d: usize, lo: Rational, hi: Rational) -> Self {
        BoxDomain {
            lower: vec![lo; d],
            upper: vec![hi; d],
        }
    }

    /// Parses `lo:hi,lo:hi,...`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for side in s.split(',') {
            let (lo, hi) = side
                .split_once(':')
                .ok_or_else(|| Error::parse("domain", s, "expected lo:hi per axis"))?;
            lower.push(parse_rational(lo)?);
            upper.push(parse_rational(hi)?);
        }
        Self::new(lower, upper)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[Rational] {
        &self.lower
    }

    pub fn upper(&self) -> &[Rational] {
        &self.upper
    }

    pub fn lower_f64(&self, i: usize) -> f64 {
        self.lower[i].to_f64().unwrap_or(f64::NAN)
    }

    pub fn upper_f64(&self, i: usize) -> f64 {
        self.upper[i].to_f64().unwrap_or(f64::NAN)
    }

    /// Strict membership. A coordinate whose side of a face cannot be
    /// decided counts as outside.
    pub fn contains(&self, a: &[Real]) -> bool {
        a.len() == self.dim()
            && a.iter().enumerate().all(|(i, x)| {
                Real::rational(self.lower[i].clone()).lt(x) == Some(true)
                    && x.lt(&Real::rational(self.upper[i].clone())) == Some(true)
            })
    }

    /// Exact strict membership of `p/q`.
    pub fn contains_rational(&self, p: &[i64], q: u64) -> bool {
        p.len() >= self.dim()
            && (0..self.dim()).all(|i| {
                let x = Rational::new(p[i].into(), q.into());
                self.lower[i] < x && x < self.upper[i]
            })
    }

    /// The integers `p` with `lower_i < p/q < upper_i`, as an inclusive range
    /// (empty when `lo > hi`).
    pub fn interior_range(&self, i: usize, q: u64) -> (i64, i64) {
        let qq = Rational::from_integer(q.into());
        let lo: crate::exact::BigInt = (&self.lower[i] * &qq).floor().to_integer() + 1;
        let hi: crate::exact::BigInt = (&self.upper[i] * &qq).ceil().to_integer() - 1;
        (lo.to_i64().unwrap_or(i64::MIN), hi.to_i64().unwrap_or(i64::MAX))
    }

    /// Distance to the boundary in the sup norm; exact for exact points.
    pub fn inradius_at(&self, a: &[Real]) -> Real {
        let mut r: Option<Real> = None;
        for (i, x) in a.iter().enumerate() {
            let lo = x.sub(&Real::rational(self.lower[i].clone()));
            let hi = Real::rational(self.upper[i].clone()).sub(x);
            let m = lo.min(&hi);
            r = Some(match r {
                None => m,
                Some(prev) => prev.min(&m),
            });
        }
        r.unwrap_or_else(|| Real::integer(0))
    }

    /// Lebesgue measure.
    pub fn volume(&self) -> Rational {
        (0..self.dim()).fold(Rational::from_integer(1.into()), |acc, i| acc * (&self.upper[i] - &self.lower[i]))
    }
}

impl fmt::Display for BoxDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sides: Vec<String> = (0..self.dim())
            .map(|i| format!("({}, {})", format_rational(&self.lower[i]), format_rational(&self.upper[i])))
            .collect();
        f.write_str(&sides.join(" x "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_ranges_are_strict() {
        let u = BoxDomain::unit(1);
        assert_eq!(u.interior_range(0, 4), (1, 3));
        assert_eq!(u.interior_range(0, 1), (1, 0));
        let b = BoxDomain::parse("-1/2:1/2").unwrap();
        assert_eq!(b.interior_range(0, 4), (-1, 1));
        assert!(!b.contains_rational(&[2], 4));
        assert!(b.contains_rational(&[1], 4));
    }

    #[test]
    fn inradius_is_distance_to_nearest_face() {
        let u = BoxDomain::unit(2);
        let a = [Real::ratio(1, 4), Real::ratio(3, 5)];
        assert_eq!(u.inradius_at(&a), Real::ratio(1, 4));
        assert!(u.contains(&a));
        assert!(!u.contains(&[Real::integer(0), Real::ratio(1, 2)]));
    }

    #[test]
    fn rejects_empty_sides() {
        assert!(BoxDomain::parse("1:0").is_err());
        assert!(BoxDomain::parse("0:1,2").is_err());
    }
}
