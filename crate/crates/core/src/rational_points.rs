//! Rational points near a manifold, denominator sets `{q : max ‖qβ_i‖ < ψ(q)}`
//! and the badly-approximable counterexample.

use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{abs_lt, rational_from_f64, Decision, Monomial, QuadSurd, Rational, Real};
use crate::manifold::ManifoldChart;
use crate::near::{near_integers, Bound, Target};
use crate::point::{cartesian, simultaneous_candidates, RationalPoint};
use crate::psi::ApproxFunction;

/// `(p, q)` with `p/q ∈ U` and `max_j |q f_j(p/q) − p_{d+j}| < ψ(q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NearPointRecord {
    pub point: RationalPoint,
    /// `max_j |q·f_j(p₁/q, …, p_d/q) − p_{d+j}|`; exact on exact charts.
    pub residual: Real,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NearPoints {
    /// Sorted by `q`, then `p`.
    pub records: Vec<NearPointRecord>,
    /// `counts[q − 1] = N(q)`, the number of records with denominator `≤ q`.
    pub counts: Vec<u64>,
    /// Denominators with at least one candidate that could not be decided.
    pub undecided: Vec<u64>,
}

impl NearPoints {
    pub fn count_upto(&self, q: u64) -> u64 {
        if q == 0 {
            return 0;
        }
        let i = (q as usize).min(self.counts.len());
        if i == 0 {
            0
        } else {
            self.counts[i - 1]
        }
    }
}

/// The integers `p_{d+j}` with `|q f_j(p/q) − p_{d+j}| < ψ(q)` for one head.
fn tails_for_head(chart: &ManifoldChart, psi: &ApproxFunction, head: &[i64], q: u64, undecided: &mut u32) -> Vec<Vec<i64>> {
    let d = chart.d();
    let qf = q as f64;
    let x: Vec<f64> = head.iter().map(|&p| p as f64 / qf).collect();
    let in_err = x.iter().fold(0.0f64, |a, v| a.max(v.abs())) * f64::EPSILON;
    let f = chart.eval_f64(&x);
    let base_err = chart.abs_error() + chart.dbound().approx() * d as f64 * in_err;
    let mut exact: Option<Option<Vec<QuadSurd>>> = None;
    let bf = psi.value_f64(q);
    let mut tails = Vec::with_capacity(chart.m());
    for (j, &fj) in f.iter().enumerate() {
        let mut t = Target {
            approx: fj * qf,
            err: (base_err + fj.abs() * f64::EPSILON) * qf + (fj * qf).abs() * f64::EPSILON,
            exact: || {
                exact
                    .get_or_insert_with(|| chart.eval_exact_rational(head, q))
                    .as_ref()
                    .map(|v| v[j].scale(&Rational::from_integer(q.into())))
            },
        };
        let mut b = Bound::new(bf, ApproxFunction::F64_REL_ERROR, || psi.value(q));
        let mut out = Vec::new();
        *undecided = undecided.saturating_add(near_integers(&mut t, &mut b, &mut out));
        if out.is_empty() {
            return Vec::new();
        }
        tails.push(out);
    }
    tails
}

fn residual(chart: &ManifoldChart, head: &[i64], tail: &[i64], q: u64) -> Real {
    let qq = Rational::from_integer(q.into());
    if let Some(f) = chart.eval_exact_rational(head, q) {
        let mut best = QuadSurd::zero();
        for (fj, &p) in f.iter().zip(tail) {
            let r = fj.scale(&qq).add_rational(&-Rational::from_integer(p.into())).abs();
            if best.checked_cmp(&r).is_some_and(|o| o.is_lt()) {
                best = r;
            }
        }
        return Real::exact(best);
    }
    let x: Vec<Real> = head.iter().map(|&p| Real::rational(Rational::new(p.into(), q.into()))).collect();
    let f = chart.eval_real(&x);
    f.iter()
        .zip(tail)
        .map(|(fj, &p)| fj.scale_int(q as i64).sub(&Real::integer(p)).abs())
        .fold(Real::integer(0), |a, b| a.max(&b))
}

fn near_at(chart: &ManifoldChart, psi: &ApproxFunction, q: u64, reduced: bool) -> (Vec<NearPointRecord>, u32) {
    let d = chart.d();
    let mut undecided = 0u32;
    let mut ranges = Vec::with_capacity(d);
    for i in 0..d {
        let (lo, hi) = chart.domain().interior_range(i, q);
        if lo > hi {
            return (Vec::new(), 0);
        }
        ranges.push((lo..=hi).collect::<Vec<i64>>());
    }
    // A constant chart has the same tails for every head.
    let shared = if chart.is_constant() {
        let probe: Vec<i64> = ranges.iter().map(|r| r[0]).collect();
        let t = tails_for_head(chart, psi, &probe, q, &mut undecided);
        if t.is_empty() {
            return (Vec::new(), undecided);
        }
        Some(t)
    } else {
        None
    };
    let mut out = Vec::new();
    for head in cartesian(&ranges) {
        let tails = match &shared {
            Some(t) => t.clone(),
            None => tails_for_head(chart, psi, &head, q, &mut undecided),
        };
        if tails.len() < chart.m() {
            continue;
        }
        for tail in cartesian(&tails) {
            let mut p = head.clone();
            p.extend_from_slice(&tail);
            let point = RationalPoint { q, p };
            if reduced && point.content() != 1 {
                continue;
            }
            let residual = residual(chart, &head, &tail, q);
            out.push(NearPointRecord { point, residual });
        }
    }
    (out, undecided)
}

/// Scans `q = 1, …, qmax` and every `p₁..p_d` with `p/q` strictly inside `U`.
/// `reduced` keeps only pairs with `gcd(p, q) = 1`.
pub fn enumerate_near(chart: &ManifoldChart, psi: &ApproxFunction, qmax: u64, reduced: bool) -> Result<NearPoints> {
    if qmax == 0 {
        return Err(Error::InvalidParameter("qmax must be >= 1".into()));
    }
    let per_q: Vec<(Vec<NearPointRecord>, u32)> = (1..qmax as usize + 1)
        .into_par_iter()
        .map(|q| near_at(chart, psi, q as u64, reduced))
        .collect();
    let mut res = NearPoints::default();
    res.counts.reserve(qmax as usize);
    let mut n = 0u64;
    for (q, (recs, undecided)) in per_q.into_iter().enumerate() {
        if undecided > 0 {
            res.undecided.push(q as u64 + 1);
        }
        n += recs.len() as u64;
        res.counts.push(n);
        res.records.extend(recs);
    }
    Ok(res)
}

/// `{q ≤ qmax : max_i ‖q β_i‖ < ψ(q)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenominatorSet {
    pub beta: Vec<Real>,
    pub qmin: u64,
    pub qmax: u64,
    pub members: Vec<u64>,
    /// `q` whose membership could not be decided.
    pub undecided: Vec<u64>,
}

/// Scans `qmin ≤ q ≤ qmax`.
pub fn bset_range(beta: &[Real], psi: &ApproxFunction, qmin: u64, qmax: u64) -> Result<DenominatorSet> {
    if beta.is_empty() {
        return Err(Error::InvalidParameter("beta must be non-empty".into()));
    }
    if qmin == 0 || qmin > qmax {
        return Err(Error::InvalidParameter(format!("bad range {qmin}..={qmax}")));
    }
    let flags: Vec<(bool, bool)> = (qmin as usize..qmax as usize + 1)
        .into_par_iter()
        .map(|q| {
            let (axes, u) = simultaneous_candidates(beta, psi, q as u64);
            let member = axes.len() == beta.len();
            (member, !member && u > 0)
        })
        .collect();
    let mut set = DenominatorSet {
        beta: beta.to_vec(),
        qmin,
        qmax,
        members: Vec::new(),
        undecided: Vec::new(),
    };
    for (k, (member, undecided)) in flags.into_iter().enumerate() {
        let q = qmin + k as u64;
        if member {
            set.members.push(q);
        } else if undecided {
            set.undecided.push(q);
        }
    }
    Ok(set)
}

pub fn bset(beta: &[Real], psi: &ApproxFunction, qmax: u64) -> Result<DenominatorSet> {
    bset_range(beta, psi, 1, qmax)
}

/// `B(β; τ)`: the bound is `q^{-τ}`.
pub fn bset_tau(beta: &[Real], tau: &Rational, qmax: u64) -> Result<DenominatorSet> {
    bset(beta, &ApproxFunction::inverse_power(tau.clone())?, qmax)
}

/// `max_i ‖q β_i‖` in double precision, with an absolute error bound.
fn max_dist_f64(beta: &[Real], q: u64) -> (f64, f64) {
    let qf = q as f64;
    let mut best = 0.0f64;
    let mut err = 0.0f64;
    for b in beta {
        let x = b.approx() * qf;
        best = best.max((x - x.round()).abs());
        err = err.max(b.error() * qf + x.abs() * f64::EPSILON);
    }
    (best, err)
}

/// `max_i ‖q β_i‖` exactly, when every `β_i` is exact.
fn max_dist_exact(beta: &[Real], q: u64) -> Option<QuadSurd> {
    let qq = Rational::from_integer(q.into());
    let mut best = QuadSurd::zero();
    for b in beta {
        let x = b.exact_value()?.scale(&qq).dist_to_integer();
        if best.checked_cmp(&x)?.is_lt() {
            best = x;
        }
    }
    Some(best)
}

/// The scan estimate `c₀` of `inf_q q^{1/m} max_i ‖q β_i‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct BadlyApproxConstant {
    /// `c₀` as an exact monomial `(q·max‖qβ_i‖^m)^{1/m}` at the argmin.
    pub c0: Monomial,
    pub argmin_q: u64,
    /// The range the minimum is taken over: `(qmax/2, qmax]`.
    pub tail: (u64, u64),
    /// The minimum over all `q ≤ qmax`, with its argmin.
    pub full_min: f64,
    pub full_argmin_q: u64,
    /// `c₀` was compared exactly against its near ties.
    pub exact: bool,
}

impl BadlyApproxConstant {
    pub fn c0_f64(&self) -> f64 {
        self.c0.to_f64()
    }
}

/// Smallest `q ≤ qmax` with `qβ ∈ Z^m`, if any.
fn rationality_witness(beta: &[Real], qmax: u64) -> Option<u64> {
    if let Some(rs) = beta.iter().map(|b| b.as_rational().cloned()).collect::<Option<Vec<_>>>() {
        let l = rs.iter().fold(num_bigint::BigInt::one(), |l, r| num_integer::Integer::lcm(&l, r.denom()));
        return l.to_u64().filter(|&q| q <= qmax);
    }
    if beta.iter().any(Real::is_irrational) {
        return None;
    }
    // float coordinates: exact zero in double arithmetic
    (1..qmax as usize + 1)
        .into_par_iter()
        .find_first(|&q| max_dist_f64(beta, q as u64).0 == 0.0)
        .map(|q| q as u64)
}

/// Minimum of `q^{1/m} max_i ‖q β_i‖` over the tail `(qmax/2, qmax]`, so that
/// small `q` do not mask the asymptotic constant.
pub fn badly_approx_constant(beta: &[Real], qmax: u64) -> Result<BadlyApproxConstant> {
    if beta.is_empty() {
        return Err(Error::InvalidParameter("beta must be non-empty".into()));
    }
    if qmax == 0 {
        return Err(Error::InvalidParameter("qmax must be >= 1".into()));
    }
    if let Some(q) = rationality_witness(beta, qmax) {
        return Err(Error::NotBadlyApproximable { witness_q: q });
    }
    let m = beta.len() as i32;
    let inv_m = 1.0 / m as f64;
    // w(q) = q·max‖qβ_i‖^m and an absolute error bound for it
    let w = |q: u64| {
        let (dist, err) = max_dist_f64(beta, q);
        let v = q as f64 * dist.powi(m);
        let e = q as f64 * m as f64 * (dist + err).powi(m - 1) * err + v * 8.0 * f64::EPSILON;
        (v, e)
    };
    let scan = |lo: u64, hi: u64| -> (f64, f64, u64) {
        (lo as usize..hi as usize + 1)
            .into_par_iter()
            .map(|q| {
                let (v, e) = w(q as u64);
                (v, v + e, q as u64)
            })
            .reduce(
                || (f64::INFINITY, f64::INFINITY, u64::MAX),
                |a, b| {
                    let pick = if b.0 < a.0 || (b.0 == a.0 && b.2 < a.2) { b } else { a };
                    (pick.0, a.1.min(b.1), pick.2)
                },
            )
    };
    let tail_lo = qmax / 2 + 1;
    let (full_w, _, full_q) = scan(1, qmax);
    let (tail_w, tail_hi, tail_q) = scan(tail_lo, qmax);

    // Every q whose error interval reaches below the smallest upper bound
    // could be the true minimizer; settle those exactly.
    let ties: Vec<u64> = (tail_lo as usize..qmax as usize + 1)
        .into_par_iter()
        .filter(|&q| {
            let (v, e) = w(q as u64);
            v - e <= tail_hi
        })
        .map(|q| q as u64)
        .collect();
    let mut best: Option<(QuadSurd, u64)> = None;
    let mut exact = true;
    for q in ties {
        let Some(dist) = max_dist_exact(beta, q) else {
            exact = false;
            break;
        };
        let wq = dist.pow(m as u32).scale(&Rational::from_integer(q.into()));
        best = match best {
            None => Some((wq, q)),
            Some((b, bq)) => match wq.checked_cmp(&b) {
                Some(o) if o.is_lt() => Some((wq, q)),
                Some(_) => Some((b, bq)),
                None => {
                    exact = false;
                    Some((b, bq))
                }
            },
        };
    }
    let one_over_m = Rational::new(1.into(), m.into());
    let (c0, argmin_q) = match best {
        Some((wq, q)) if exact => {
            if wq.is_zero() {
                return Err(Error::NotBadlyApproximable { witness_q: q });
            }
            (Monomial::power(wq, one_over_m), q)
        }
        _ => {
            if tail_w <= 0.0 {
                return Err(Error::NotBadlyApproximable { witness_q: tail_q });
            }
            // No exact comparison available: take the minimum of rigorous
            // lower bounds so that c₀ never exceeds the true tail minimum.
            let (w_lo, q_lo) = (tail_lo as usize..qmax as usize + 1)
                .into_par_iter()
                .map(|q| {
                    let (dist, err) = max_dist_f64(beta, q as u64);
                    let lo = (dist - err).max(0.0) * (1.0 - 4.0 * f64::EPSILON);
                    (q as f64 * lo.powi(m) * (1.0 - 8.0 * f64::EPSILON), q as u64)
                })
                .reduce(|| (f64::INFINITY, u64::MAX), |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
            if w_lo <= 0.0 {
                return Err(Error::NotBadlyApproximable { witness_q: q_lo });
            }
            (Monomial::rational(rational_from_f64(w_lo)?).pow(&one_over_m), q_lo)
        }
    };
    Ok(BadlyApproxConstant {
        c0,
        argmin_q,
        tail: (tail_lo, qmax),
        full_min: full_w.powf(inv_m),
        full_argmin_q: full_q,
        exact,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleReport {
    pub constant: BadlyApproxConstant,
    /// `ψ(q) = c₀ q^{-1/m}`.
    pub psi: ApproxFunction,
    /// Members of the denominator set over the tail; empty on success.
    pub members: Vec<u64>,
    pub undecided: Vec<u64>,
    pub caveat: String,
}

/// Checks that no `q` in the tail `(qmax/2, qmax]` has
/// `max_i ‖q β_i‖ < c₀ q^{-1/m}`.
pub fn counterexample_check(beta: &[Real], qmax: u64) -> Result<CounterexampleReport> {
    let constant = badly_approx_constant(beta, qmax)?;
    let m = beta.len() as i64;
    let psi = ApproxFunction::power_law_monomial(constant.c0.clone(), Rational::new(1.into(), m.into()))?;
    let set = bset_range(beta, &psi, constant.tail.0, constant.tail.1)?;
    if !set.members.is_empty() {
        return Err(Error::CertificationFailed(format!(
            "q^(1/m) max ||q beta_i|| < c0 = {} at q = {:?}; c0 is not the scan minimum",
            constant.c0_f64(),
            &set.members[..set.members.len().min(10)]
        )));
    }
    let caveat = format!(
        "emptiness is certified only for {} <= q <= {}; the infimum over all q may be smaller",
        constant.tail.0, constant.tail.1
    );
    Ok(CounterexampleReport {
        constant,
        psi,
        members: set.members,
        undecided: set.undecided,
        caveat,
    })
}

/// Exact membership test `max_i ‖q β_i‖ < bound`, used by tests and callers
/// that need a single decision.
pub fn bset_member(beta: &[Real], bound: &Monomial, q: u64) -> Decision {
    let (f, err) = max_dist_f64(beta, q);
    match crate::exact::filter_lt(f, err, bound.to_f64(), bound.rel_error()) {
        Some(b) => Decision::from_bool(b),
        None => match max_dist_exact(beta, q) {
            Some(x) => abs_lt(&x, bound),
            None => Decision::Undecided,
        },
    }
}
