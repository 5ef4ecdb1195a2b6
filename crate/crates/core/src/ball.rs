//! Open balls in the supremum norm.

use crate::error::{Error, Result};
use crate::exact::{Rational, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<Real>,
    pub radius: Real,
}

impl Ball {
    pub fn new(center: Vec<Real>, radius: Real) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidParameter("ball center must be non-empty".into()));
        }
        if radius.approx() - radius.error() <= 0.0 && radius.exact_value().is_none_or(|r| r.signum() <= 0) {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    /// Ambient dimension `k`.
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// `x` strictly inside (sup norm), judged in double precision.
    pub fn contains_f64(&self, x: &[f64]) -> bool {
        self.center
            .iter()
            .zip(x)
            .all(|(c, xi)| (xi - c.approx()).abs() < self.radius.approx())
    }
}

/// `B(x, r) ↦ B(x, r^{s/k})`.
pub fn scale_ball(b: &Ball, s: &Rational, k: usize) -> Result<Ball> {
    if b.dim() != k {
        return Err(Error::InvalidParameter(format!("ball lives in R^{} but k = {k}", b.dim())));
    }
    if s <= &Rational::from_integer(0.into()) {
        return Err(Error::InvalidParameter(format!("scaling exponent must be positive, got {s}")));
    }
    let e = s / Rational::from_integer(k.into());
    Ok(Ball {
        center: b.center.clone(),
        radius: b.radius.pow_rational(&e),
    })
}
