//! Approximating functions `ψ: N → (0, ∞)`.

use std::cmp::Ordering;
use std::path::Path;

use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::exact::{parse_rational, Monomial, QuadSurd, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum PsiKind {
    /// `c · q^{-τ}` with `c > 0`, `τ ≥ 0`.
    PowerLaw { coef: Monomial, tau: Rational },
    /// Finite table of `(q, ψ(q))` with strictly increasing `q`, extended
    /// as a step function: `ψ(q) = ψ(q_k)` for the largest `q_k ≤ q`, and
    /// `ψ(q_1)` below the first entry.
    Tabulated { entries: Vec<(u64, Rational)> },
}

/// A positive, non-increasing approximating function.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxFunction {
    kind: PsiKind,
    normalized: bool,
    coef_f64: f64,
    tau_f64: f64,
}

impl ApproxFunction {
    pub fn power_law(c: Rational, tau: Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidParameter(format!("psi coefficient must be positive, got {c}")));
        }
        Self::power_law_monomial(Monomial::rational(c), tau)
    }

    /// Power law with a symbolic coefficient (for instance `c₀ = w^{1/m}`).
    pub fn power_law_monomial(coef: Monomial, tau: Rational) -> Result<Self> {
        if tau.is_negative() {
            return Err(Error::InvalidParameter(format!("psi exponent must be >= 0, got {tau}")));
        }
        let coef_f64 = coef.to_f64();
        let tau_f64 = tau.to_f64().unwrap_or(f64::NAN);
        Ok(ApproxFunction {
            kind: PsiKind::PowerLaw { coef, tau },
            normalized: false,
            coef_f64,
            tau_f64,
        })
    }

    /// `q^{-τ}`.
    pub fn inverse_power(tau: Rational) -> Result<Self> {
        Self::power_law(Rational::one(), tau)
    }

    /// Builds a tabulated function, rejecting any ascent.
    pub fn tabulated(entries: Vec<(u64, Rational)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("psi table is empty".into()));
        }
        for (i, (q, v)) in entries.iter().enumerate() {
            if *q == 0 {
                return Err(Error::InvalidParameter("psi table rows need q >= 1".into()));
            }
            if !v.is_positive() {
                return Err(Error::InvalidParameter(format!("psi({q}) = {v} is not positive")));
            }
            if i > 0 {
                let (q0, v0) = &entries[i - 1];
                if q <= q0 {
                    return Err(Error::InvalidParameter(format!(
                        "psi table q values must strictly increase ({q0} then {q})"
                    )));
                }
                if v > v0 {
                    return Err(Error::NonMonotone {
                        q_lo: *q0,
                        psi_lo: v0.to_f64().unwrap_or(f64::NAN),
                        q_hi: *q,
                        psi_hi: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(ApproxFunction {
            kind: PsiKind::Tabulated { entries },
            normalized: false,
            coef_f64: f64::NAN,
            tau_f64: f64::NAN,
        })
    }

    /// Parses a `q,psi` CSV table (header required).
    pub fn from_table_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().unwrap_or("");
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols != ["q", "psi"] {
            return Err(Error::parse("psi table", header, "header must be `q,psi`"));
        }
        let mut entries = Vec::new();
        for line in lines {
            let (q, v) = line
                .split_once(',')
                .ok_or_else(|| Error::parse("psi table", line, "expected two columns"))?;
            let q: u64 = q
                .trim()
                .parse()
                .map_err(|_| Error::parse("psi table", line, "q is not a positive integer"))?;
            entries.push((q, parse_rational(v)?));
        }
        Self::tabulated(entries)
    }

    /// `pow:<c>:<tau>` or `table:<path>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if let Some(rest) = s.strip_prefix("pow:") {
            let (c, tau) = rest
                .split_once(':')
                .ok_or_else(|| Error::parse("psi", spec, "expected pow:<c>:<tau>"))?;
            return Self::power_law(parse_rational(c)?, parse_rational(tau)?);
        }
        if let Some(path) = s.strip_prefix("table:") {
            let text = std::fs::read_to_string(Path::new(path.trim()))?;
            return Self::from_table_csv(&text);
        }
        Err(Error::parse("psi", spec, "expected pow:<c>:<tau> or table:<path>"))
    }

    /// Clamps values to `≤ 1`.
    pub fn normalized(mut self) -> Self {
        self.normalized = true;
        self
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn kind(&self) -> &PsiKind {
        &self.kind
    }

    pub fn tau(&self) -> Option<&Rational> {
        match &self.kind {
            PsiKind::PowerLaw { tau, .. } => Some(tau),
            PsiKind::Tabulated { .. } => None,
        }
    }

    pub fn coef(&self) -> Option<&Monomial> {
        match &self.kind {
            PsiKind::PowerLaw { coef, .. } => Some(coef),
            PsiKind::Tabulated { .. } => None,
        }
    }

    fn table_value(entries: &[(u64, Rational)], q: u64) -> &Rational {
        let i = entries.partition_point(|(k, _)| *k <= q);
        &entries[i.saturating_sub(1)].1
    }

    fn raw(&self, q: u64) -> Monomial {
        let q = q.max(1);
        match &self.kind {
            PsiKind::PowerLaw { coef, tau } => coef.mul(&Monomial::int_pow(q, -tau)),
            PsiKind::Tabulated { entries } => Monomial::rational(Self::table_value(entries, q).clone()),
        }
    }

    /// `ψ(q)` as an exact bound.
    pub fn value(&self, q: u64) -> Monomial {
        let v = self.raw(q);
        if !self.normalized {
            return v;
        }
        let f = v.to_f64();
        let above_one = if f > 1.0 + 1e-9 {
            true
        } else if f < 1.0 - 1e-9 {
            false
        } else {
            match v.cmp_exact(&QuadSurd::one()) {
                Some(o) => o == Ordering::Less,
                None => f > 1.0,
            }
        };
        if above_one {
            Monomial::one()
        } else {
            v
        }
    }

    /// `ψ(q)` as a double; relative error at most [`ApproxFunction::F64_REL_ERROR`].
    #[inline]
    pub fn value_f64(&self, q: u64) -> f64 {
        let q = q.max(1);
        let v = match &self.kind {
            PsiKind::PowerLaw { .. } => {
                if self.tau_f64 == 0.0 {
                    self.coef_f64
                } else {
                    self.coef_f64 * (q as f64).powf(-self.tau_f64)
                }
            }
            PsiKind::Tabulated { entries } => Self::table_value(entries, q).to_f64().unwrap_or(f64::NAN),
        };
        if self.normalized {
            v.min(1.0)
        } else {
            v
        }
    }

    pub const F64_REL_ERROR: f64 = 1e-13;

    /// `B = inf_Q Q·ψ(Q)`. Zero (a hypothesis failure) for power laws with `τ > 1`.
    pub fn inf_q_psi(&self) -> Result<Monomial> {
        match &self.kind {
            PsiKind::PowerLaw { tau, .. } => {
                if *tau > Rational::one() {
                    return Err(Error::HypothesisViolated(format!(
                        "inf Q psi(Q) = 0 because tau = {tau} > 1"
                    )));
                }
                // Qψ(Q) is non-decreasing for τ ≤ 1 (clamping included), so Q = 1.
                Ok(self.value(1))
            }
            PsiKind::Tabulated { entries } => {
                let mut best = self.value(1);
                for (q, _) in entries {
                    let cand = Monomial::integer(*q).mul(&self.value(*q));
                    if cand.to_f64() < best.to_f64() {
                        best = cand;
                    }
                }
                Ok(best)
            }
        }
    }

    /// `κ = inf_Q Q^τ ψ(Q)` as a double; zero when the infimum vanishes.
    pub fn kappa_f64(&self, tau: f64) -> f64 {
        match &self.kind {
            PsiKind::PowerLaw { .. } => {
                if tau + 1e-15 < self.tau_f64 {
                    0.0
                } else {
                    self.value_f64(1)
                }
            }
            PsiKind::Tabulated { entries } => {
                let mut best = self.value_f64(1);
                for (q, _) in entries {
                    best = best.min((*q as f64).powf(tau) * self.value_f64(*q));
                }
                best
            }
        }
    }
}

/// Lower and upper orders at infinity of `1/ψ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Orders {
    /// `τ* = liminf −log ψ(q) / log q`.
    pub lower: f64,
    /// `τ̂ = limsup −log ψ(q) / log q` (may be infinite).
    pub upper: f64,
    /// True when the values are finite-table estimates rather than exact.
    pub estimated: bool,
}

pub fn upper_lower_orders(psi: &ApproxFunction) -> Orders {
    match psi.kind() {
        PsiKind::PowerLaw { tau, .. } => {
            let t = tau.to_f64().unwrap_or(f64::NAN);
            Orders {
                lower: t,
                upper: t,
                estimated: false,
            }
        }
        PsiKind::Tabulated { entries } => {
            let pts: Vec<(u64, f64)> = entries
                .iter()
                .map(|(q, v)| (*q, v.to_f64().unwrap_or(f64::NAN)))
                .collect();
            table_orders(&pts)
        }
    }
}

/// Order estimates from the last half of a table of `(q, ψ(q))`. Does not
/// require monotonicity.
pub fn table_orders(table: &[(u64, f64)]) -> Orders {
    let tail = &table[table.len() / 2..];
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for &(q, v) in tail.iter().filter(|(q, _)| *q >= 2) {
        let o = if v <= 0.0 { f64::INFINITY } else { -v.ln() / (q as f64).ln() };
        lower = lower.min(o);
        upper = upper.max(o);
    }
    if lower > upper {
        lower = f64::NAN;
        upper = f64::NAN;
    }
    Orders {
        lower,
        upper,
        estimated: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn power_law_values() {
        let psi = ApproxFunction::power_law(r(3, 1), r(7, 10)).unwrap();
        assert!((psi.value_f64(10) - 3.0 * 10f64.powf(-0.7)).abs() < 1e-15);
        assert!((psi.value(10).to_f64() - psi.value_f64(10)).abs() < 1e-15);
        let n = psi.clone().normalized();
        assert!(n.value(1).is_structurally_one());
        assert_eq!(n.value_f64(1), 1.0);
        // 3·100^{-0.7} ≈ 0.119
        assert!(!n.value(100).is_structurally_one());
    }

    #[test]
    fn normalization_at_exact_one() {
        // 4·16^{-1/2} = 1 exactly: stays as is, value 1.
        let psi = ApproxFunction::power_law(r(4, 1), r(1, 2)).unwrap().normalized();
        assert_eq!(psi.value(16).cmp_exact(&QuadSurd::one()), Some(Ordering::Equal));
        assert!(psi.value(4).is_structurally_one());
    }

    #[test]
    fn table_rejects_ascent() {
        let err = ApproxFunction::tabulated(vec![(1, r(1, 2)), (2, r(1, 3)), (3, r(1, 2))]).unwrap_err();
        assert!(matches!(err, Error::NonMonotone { q_lo: 2, q_hi: 3, .. }));
        assert!(ApproxFunction::tabulated(vec![(2, r(1, 2)), (2, r(1, 3))]).is_err());
        assert!(ApproxFunction::tabulated(vec![(1, r(0, 1))]).is_err());
    }

    #[test]
    fn table_is_step_extended() {
        let psi = ApproxFunction::from_table_csv("q,psi\n2,1/2\n5,0.25\n").unwrap();
        assert_eq!(psi.value_f64(1), 0.5);
        assert_eq!(psi.value_f64(4), 0.5);
        assert_eq!(psi.value_f64(5), 0.25);
        assert_eq!(psi.value_f64(1000), 0.25);
        // inf Qψ(Q): Q=1 gives 1/2, Q=2 gives 1, Q=5 gives 5/4.
        assert_eq!(psi.inf_q_psi().unwrap().to_f64(), 0.5);
    }

    #[test]
    fn parse_specs() {
        let psi = ApproxFunction::parse("pow:1:0.5").unwrap();
        assert_eq!(psi.tau(), Some(&r(1, 2)));
        assert!(ApproxFunction::parse("pow:0:1").is_err());
        assert!(ApproxFunction::parse("pow:1").is_err());
        assert!(ApproxFunction::parse("exp:1").is_err());
        assert!(ApproxFunction::parse("table:/nonexistent/psi.csv").is_err());
    }

    #[test]
    fn inf_q_psi_power_law() {
        let psi = ApproxFunction::power_law(r(1, 2), r(1, 2)).unwrap();
        assert_eq!(psi.inf_q_psi().unwrap().to_f64(), 0.5);
        let big = ApproxFunction::power_law(r(3, 1), r(1, 1)).unwrap().normalized();
        assert_eq!(big.inf_q_psi().unwrap().to_f64(), 1.0);
        let bad = ApproxFunction::power_law(r(1, 1), r(3, 2)).unwrap();
        assert!(bad.inf_q_psi().unwrap_err().is_hypothesis());
    }

    #[test]
    fn orders() {
        let o = upper_lower_orders(&ApproxFunction::power_law(r(3, 1), r(7, 10)).unwrap());
        assert_eq!((o.lower, o.upper, o.estimated), (0.7, 0.7, false));
        let o = upper_lower_orders(&ApproxFunction::power_law(r(1, 1), r(0, 1)).unwrap());
        assert_eq!((o.lower, o.upper), (0.0, 0.0));
        let table: Vec<(u64, f64)> = (1..=1000u64)
            .map(|q| (q, if q % 2 == 0 { 1.0 / q as f64 } else { 1.0 / (q * q) as f64 }))
            .collect();
        let o = table_orders(&table);
        assert!(o.estimated);
        assert!((o.lower - 1.0).abs() < 1e-12 && (o.upper - 2.0).abs() < 1e-12);
    }
}
