//! Exponent arithmetic: the critical exponent `s`, the auxiliary exponent
//! `η`, and the Jarník series classifier.

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::psi::{ApproxFunction, PsiKind};

/// `s = (n+1)/(τ+1) − m`.
pub fn critical_exponent(n: u32, m: u32, tau: &Rational) -> Result<Rational> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if m >= n {
        return Err(Error::InvalidParameter(format!("codimension m = {m} must be < n = {n}")));
    }
    if !tau.is_positive() {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    Ok(Rational::from_integer((n + 1).into()) / (tau + Rational::one()) - Rational::from_integer(m.into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaExponent {
    /// `η = (1 − mτ)/d`.
    pub eta: Rational,
    /// `η > 0`.
    pub valid: bool,
    /// `η ≥ τ`, which happens exactly when `τ ≤ 1/n`.
    pub boundary: bool,
}

/// `η` from `dη + mτ = 1`. Never fails; out-of-range input is flagged.
pub fn eta_exponent(d: u32, m: u32, tau: &Rational) -> EtaExponent {
    let d = d.max(1);
    let eta = (Rational::one() - Rational::from_integer(m.into()) * tau) / Rational::from_integer(d.into());
    EtaExponent {
        valid: eta.is_positive(),
        boundary: eta >= *tau,
        eta,
    }
}

/// All exponents attached to `(n, m, τ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentBundle {
    pub n: u32,
    pub m: u32,
    pub d: u32,
    pub tau: Rational,
    pub s: Rational,
    pub eta: EtaExponent,
}

impl ExponentBundle {
    pub fn new(n: u32, m: u32, tau: Rational) -> Result<Self> {
        let s = critical_exponent(n, m, &tau)?;
        let d = n - m;
        let eta = eta_exponent(d, m, &tau);
        Ok(ExponentBundle { n, m, d, tau, s, eta })
    }

    /// `1/n < τ < 1/m`, where `0 < η < τ` and `0 < s < d`.
    pub fn in_open_range(&self) -> bool {
        let lo = Rational::new(1.into(), self.n.into());
        lo < self.tau && (self.m == 0 || self.tau < Rational::new(1.into(), self.m.into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JarnikClass {
    MeasureZero,
    MeasureInfinity,
}

/// Classifies `Σ q^{n−s} ψ(q)^s` for a power law `ψ = c·q^{−τ}`.
///
/// The term is `c^s q^{n−s−sτ}`; the series converges iff the exponent is
/// below −1. At exactly −1 it is the harmonic series, which diverges.
pub fn jarnik_classify(psi: &ApproxFunction, n: u32, s: &Rational) -> Result<JarnikClass> {
    let tau = match psi.kind() {
        PsiKind::PowerLaw { tau, .. } => tau,
        PsiKind::Tabulated { .. } => {
            return Err(Error::Unclassifiable("tabulated psi has no closed-form asymptotics".into()))
        }
    };
    let nn = Rational::from_integer(n.into());
    if !s.is_positive() || *s >= nn {
        return Err(Error::InvalidParameter(format!("s = {s} must lie in (0, {n})")));
    }
    let exponent = &nn - s - s * tau;
    Ok(if exponent < -Rational::one() {
        JarnikClass::MeasureZero
    } else {
        JarnikClass::MeasureInfinity
    })
}

/// `(d + 1 − τm)/(τ + 1)`: the heuristic growth exponent of near-point
/// counts per band measured at the band's own resolution.
pub fn band_count_exponent(d: u32, m: u32, tau: &Rational) -> Rational {
    (Rational::from_integer((d + 1).into()) - tau * Rational::from_integer(m.into())) / (tau + Rational::one())
}
