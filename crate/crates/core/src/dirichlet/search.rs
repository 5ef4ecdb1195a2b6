use num_traits::{Signed, ToPrimitive};

use super::{build_system, solve_system};
use crate::error::{Error, Result};
use crate::exact::{filter_lt, Decision, Monomial, QuadSurd, Rational, Real};
use crate::manifold::ManifoldChart;
use crate::point::RationalPoint;
use crate::psi::ApproxFunction;

/// Relative safety margin on the admissibility test.
const MARGIN: f64 = 1e-12;

/// The `Q`-independent part of the admissibility condition
/// `(2^{-m} Q ψ(Q)^m)^{-1/d} < min{1, r, √(B/(C d²))}`.
#[derive(Clone, Debug)]
pub struct AdmissibleContext {
    d: usize,
    m: usize,
    psi: ApproxFunction,
    /// A lower bound on `min{1, r, √(B/(C d²))}`.
    threshold: f64,
    pub r: Real,
    pub b: Monomial,
}

impl AdmissibleContext {
    pub fn new(chart: &ManifoldChart, alpha: &[Real], psi: &ApproxFunction) -> Result<Self> {
        let psi = psi.clone().normalized();
        let r = chart.inradius_at(alpha)?;
        let b = psi.inf_q_psi()?;
        let bf = b.to_f64() * (1.0 - b.rel_error());
        if bf <= 0.0 {
            return Err(Error::HypothesisViolated("inf Q psi(Q) = 0".into()));
        }
        let r_lo = r.approx() - r.error();
        let mut threshold = 1.0f64.min(r_lo);
        let c = chart.cbound();
        let c_hi = c.approx() + c.error();
        if c_hi > 0.0 {
            let dd = (chart.d() * chart.d()) as f64;
            threshold = threshold.min((bf / (c_hi * dd)).sqrt());
        }
        Ok(AdmissibleContext {
            d: chart.d(),
            m: chart.m(),
            psi,
            threshold: threshold * (1.0 - MARGIN),
            r,
            b,
        })
    }

    /// `min{1, r, √(B/(C d²))}`, rounded down.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// `(2^{-m} Q ψ(Q)^m)^{-1/d}` as a double.
    pub fn lhs(&self, q_budget: u64) -> f64 {
        let psi_q = self.psi.value_f64(q_budget);
        (2f64.powi(-(self.m as i32)) * q_budget as f64 * psi_q.powi(self.m as i32)).powf(-1.0 / self.d as f64)
    }

    pub fn admits(&self, q_budget: u64) -> bool {
        q_budget >= 1 && self.lhs(q_budget) * (1.0 + MARGIN) < self.threshold
    }
}

pub fn is_admissible(chart: &ManifoldChart, alpha: &[Real], psi: &ApproxFunction, q_budget: u64) -> Result<bool> {
    Ok(AdmissibleContext::new(chart, alpha, psi)?.admits(q_budget))
}

/// The first `count` admissible `Q ≤ search_cap`.
pub fn admissible_q_set(
    chart: &ManifoldChart,
    alpha: &[Real],
    psi: &ApproxFunction,
    count: usize,
    search_cap: u64,
) -> Result<Vec<u64>> {
    let ctx = AdmissibleContext::new(chart, alpha, psi)?;
    let mut out = Vec::with_capacity(count);
    let mut q = 1;
    while out.len() < count && q <= search_cap {
        if ctx.admits(q) {
            out.push(q);
        }
        q += 1;
    }
    if out.len() < count {
        return Err(Error::Exhausted(format!(
            "only {} of {count} admissible Q found up to {search_cap}; \
             (2^-m Q psi(Q)^m)^(-1/d) never drops below min{{1, r, sqrt(B/(C d^2))}} = {}",
            out.len(),
            ctx.threshold
        )));
    }
    Ok(out)
}

/// A certified solution `(p, q)` for budget `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletSolution {
    pub point: RationalPoint,
    pub q_budget: u64,
    /// `|α_i − p_i/q|` for `i ≤ d`.
    pub v44: Vec<Real>,
    /// `|f_j(p/q) − p_{d+j}/q|` for `j ≤ m`.
    pub v45: Vec<Real>,
    /// Every re-check came back decided and true.
    pub certified: bool,
}

impl DirichletSolution {
    pub fn v44_max(&self) -> Real {
        self.v44.iter().fold(Real::integer(0), |a, b| a.max(b))
    }

    pub fn v45_max(&self) -> Real {
        self.v45.iter().fold(Real::integer(0), |a, b| a.max(b))
    }
}

fn fail(what: &str, q: &RationalPoint, q_budget: u64) -> Error {
    Error::CertificationFailed(format!("{what} fails at q = {}, p = {:?}, Q = {q_budget}", q.q, q.p))
}

fn check(decision: Decision, what: &str, pt: &RationalPoint, q_budget: u64, certified: &mut bool) -> Result<()> {
    match decision {
        Decision::Yes => Ok(()),
        Decision::Undecided => {
            *certified = false;
            Ok(())
        }
        Decision::No => Err(fail(what, pt, q_budget)),
    }
}

/// Re-verifies the two approximation inequalities and the `C`-bound
/// directly from the chart, independently of the linear-forms solution.
fn certify(
    chart: &ManifoldChart,
    alpha: &[Real],
    psi: &ApproxFunction,
    q_budget: u64,
    pt: RationalPoint,
) -> Result<DirichletSolution> {
    let (d, m) = (chart.d(), chart.m());
    let q = pt.q;
    if q == 0 {
        return Err(fail("q >= 1", &pt, q_budget));
    }
    if !chart.domain().contains_rational(&pt.p, q) {
        return Err(fail("p/q in U", &pt, q_budget));
    }
    let mut certified = true;
    let psi_big = psi.value(q_budget);
    let inv_q = Monomial::int_pow(q, -Rational::from_integer(1.into()));

    let md = Rational::new(m.into(), d.into());
    let bound44 = Monomial::int_pow(2, md.clone())
        .mul(&inv_q)
        .mul(&Monomial::integer(q_budget).mul(&psi_big.pow(&Rational::from_integer(m.into()))).pow(&-Rational::new(1.into(), d.into())));
    let x = pt.coords();
    let mut v44 = Vec::with_capacity(d);
    for i in 0..d {
        let e = alpha[i].sub(&x[i]).abs();
        check(e.abs_lt(&bound44), "|alpha_i - p_i/q| bound", &pt, q_budget, &mut certified)?;
        v44.push(e);
    }

    let bound45 = psi.value(q).mul(&inv_q);
    let f = chart.eval_real(&x[..d]);
    let mut v45 = Vec::with_capacity(m);
    for j in 0..m {
        let e = f[j].sub(&x[d + j]).abs();
        check(e.abs_lt(&bound45), "|f_j(p/q) - p_{d+j}/q| bound", &pt, q_budget, &mut certified)?;
        v45.push(e);
    }

    // 2^{2m/d} C d² < q ψ(q) (Q ψ(Q)^m)^{2/d}
    let c = chart.cbound();
    if c.approx() + c.error() > 0.0 {
        let two_d = 2.0 / d as f64;
        let lhs = 2f64.powf(2.0 * m as f64 / d as f64) * (c.approx() + c.error()) * (d * d) as f64;
        let rhs = q as f64 * psi.value_f64(q) * (q_budget as f64 * psi.value_f64(q_budget).powi(m as i32)).powf(two_d);
        let dec = match filter_lt(lhs, lhs * 1e-12, rhs, 1e-12) {
            Some(b) => Decision::from_bool(b),
            None => Decision::Undecided,
        };
        check(dec, "C-bound", &pt, q_budget, &mut certified)?;
    }

    Ok(DirichletSolution {
        point: pt,
        q_budget,
        v44,
        v45,
        certified,
    })
}

/// Solves the system for an admissible `Q` and certifies the result.
pub fn dirichlet_search(chart: &ManifoldChart, alpha: &[Real], psi: &ApproxFunction, q_budget: u64) -> Result<DirichletSolution> {
    let ctx = AdmissibleContext::new(chart, alpha, psi)?;
    search_with(chart, alpha, &ctx, q_budget)
}

fn search_with(chart: &ManifoldChart, alpha: &[Real], ctx: &AdmissibleContext, q_budget: u64) -> Result<DirichletSolution> {
    if !ctx.admits(q_budget) {
        return Err(Error::HypothesisViolated(format!(
            "Q = {q_budget} is not admissible: (2^-m Q psi(Q)^m)^(-1/d) = {} is not < min{{1, r, sqrt(B/(C d^2))}} = {}",
            ctx.lhs(q_budget),
            ctx.threshold
        )));
    }
    let sys = build_system(chart, alpha, &ctx.psi, q_budget)?;
    let sol = solve_system(&sys)?;
    let pt = RationalPoint { q: sol.q, p: sol.p };
    certify(chart, alpha, &ctx.psi, q_budget, pt)
}

/// Solutions with strictly increasing `q` along the ladder `Q_0, 2Q_0, 4Q_0, …`
/// (starting at the first admissible `Q`, keeping rungs with `κ ≤ Q^τ ψ(Q)`),
/// each satisfying `|α_i − p_i/q| < (2/κ)^{m/d} q^{−1−(1−τm)/d}`.
pub fn cor2_stream(
    chart: &ManifoldChart,
    alpha: &[Real],
    psi: &ApproxFunction,
    tau: &Rational,
    kappa: &Rational,
    count: usize,
    qcap: u64,
) -> Result<Vec<DirichletSolution>> {
    let (d, m) = (chart.d(), chart.m());
    if m == 0 {
        return Err(Error::InvalidParameter("codimension m must be >= 1".into()));
    }
    let mm = Rational::from_integer(m.into());
    if !tau.is_positive() || tau * &mm > Rational::from_integer(1.into()) {
        return Err(Error::HypothesisViolated(format!("tau = {tau} must lie in (0, 1/m] with m = {m}")));
    }
    if !kappa.is_positive() {
        return Err(Error::HypothesisViolated(format!("kappa = {kappa} must be positive")));
    }
    if alpha.iter().all(|a| a.as_rational().is_some()) {
        return Err(Error::HypothesisViolated(
            "alpha has only rational coordinates; an irrational coordinate is required".into(),
        ));
    }
    let ctx = AdmissibleContext::new(chart, alpha, psi)?;
    let first = (1..=qcap).find(|&q| ctx.admits(q)).ok_or_else(|| {
        Error::Exhausted(format!("no admissible Q up to qcap = {qcap}"))
    })?;
    let kappa_q = QuadSurd::rational(kappa.clone());
    let kappa_f = kappa.to_f64().unwrap_or(f64::NAN);
    let tau_f = tau.to_f64().unwrap_or(f64::NAN);
    let lead = Monomial::rational(Rational::from_integer(2.into()) / kappa).pow(&Rational::new(m.into(), d.into()));
    let exponent = -Rational::from_integer(1.into()) - (Rational::from_integer(1.into()) - tau * &mm) / Rational::from_integer(d.into());

    let mut out: Vec<DirichletSolution> = Vec::with_capacity(count);
    let mut q_budget = first;
    let mut rungs = 0u32;
    while out.len() < count {
        if q_budget > qcap {
            return Err(Error::Exhausted(format!(
                "Q ladder reached {q_budget} > qcap = {qcap} after {rungs} rungs with {} of {count} solutions",
                out.len()
            )));
        }
        rungs += 1;
        let growth = Monomial::int_pow(q_budget, tau.clone()).mul(&ctx.psi.value(q_budget));
        let g_f = (q_budget as f64).powf(tau_f) * ctx.psi.value_f64(q_budget);
        let kappa_ok = match filter_lt(kappa_f, kappa_f * 1e-15, g_f, growth.rel_error()) {
            Some(true) => true,
            Some(false) => false,
            None => matches!(growth.cmp_exact(&kappa_q), Some(o) if o.is_le()),
        };
        if kappa_ok && ctx.admits(q_budget) {
            let mut sol = search_with(chart, alpha, &ctx, q_budget)?;
            if out.last().is_none_or(|s| s.point.q < sol.point.q) {
                let bound = lead.mul(&Monomial::int_pow(sol.point.q, exponent.clone()));
                for i in 0..d {
                    match sol.v44[i].abs_lt(&bound) {
                        Decision::Yes => {}
                        Decision::Undecided => sol.certified = false,
                        Decision::No => {
                            return Err(fail("(2/kappa)^(m/d) q^(-1-(1-tau m)/d) bound", &sol.point, q_budget))
                        }
                    }
                }
                out.push(sol);
            }
        }
        q_budget = q_budget.saturating_mul(2);
    }
    Ok(out)
}
