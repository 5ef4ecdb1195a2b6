//! The Dirichlet-type theorem for manifolds: a system of `n + 1` linear
//! forms whose integer solutions give rational points `p/q` close to `α`
//! whose lifts lie close to the manifold.

mod search;

pub use search::{admissible_q_set, cor2_stream, dirichlet_search, is_admissible, AdmissibleContext, DirichletSolution};

use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{Decision, Monomial, QuadSurd, Rational, Real};
use crate::manifold::{eval_g, ManifoldChart};
use crate::near::{near_integers, Bound, Target};
use crate::point::cartesian;
use crate::psi::ApproxFunction;

/// One real coefficient prepared for the scan kernel.
#[derive(Clone, Debug)]
struct Coef {
    f: f64,
    err: f64,
    exact: Option<QuadSurd>,
}

impl From<&Real> for Coef {
    fn from(r: &Real) -> Self {
        Coef {
            f: r.approx(),
            err: r.error(),
            exact: r.exact_value().cloned(),
        }
    }
}

#[derive(Clone, Debug)]
struct BoundVal {
    f: f64,
    rel: f64,
    exact: Monomial,
}

impl From<Monomial> for BoundVal {
    fn from(m: Monomial) -> Self {
        BoundVal {
            f: m.to_f64(),
            rel: m.rel_error(),
            exact: m,
        }
    }
}

/// The forms, over integer vectors `(q, p_1, …, p_n)`:
///
/// * `m` rows `q·g_j(α) + Σ_i p_i ∂f_j/∂α_i(α) − p_{d+j}`, bound `½ψ(Q)`;
/// * `d` rows `q·α_i − p_i`, bound `(2^{-m} Q ψ(Q)^m)^{-1/d}`;
/// * one row `q`, bound `Q` (non-strict).
#[derive(Clone, Debug)]
pub struct LinearFormsSystem {
    d: usize,
    m: usize,
    q_budget: u64,
    alpha: Vec<Real>,
    matrix: Vec<Vec<Real>>,
    bounds: Vec<Monomial>,
    alpha_c: Vec<Coef>,
    g_c: Vec<Coef>,
    jac_c: Vec<Coef>,
    b1: BoundVal,
    b2: BoundVal,
}

/// `(2^{-m} Q ψ(Q)^m)^{-1/d}`.
pub(crate) fn mink2_bound(d: usize, m: usize, q_budget: u64, psi_q: &Monomial) -> Monomial {
    let mm = Rational::from_integer(m.into());
    Monomial::int_pow(2, -mm.clone())
        .mul(&Monomial::integer(q_budget))
        .mul(&psi_q.pow(&mm))
        .pow(&-Rational::new(1.into(), d.into()))
}

pub fn build_system(chart: &ManifoldChart, alpha: &[Real], psi: &ApproxFunction, q_budget: u64) -> Result<LinearFormsSystem> {
    if q_budget < 1 {
        return Err(Error::InvalidParameter("Q must be >= 1".into()));
    }
    let (d, m) = (chart.d(), chart.m());
    let g = eval_g(chart, alpha)?;
    let jac = chart.jacobian_real(alpha);
    let n = d + m;
    let psi_q = psi.value(q_budget);
    let b1 = Monomial::int_pow(2, -Rational::from_integer(1.into())).mul(&psi_q);
    let b2 = mink2_bound(d, m, q_budget, &psi_q);
    let zero = Real::integer(0);
    let mut matrix = Vec::with_capacity(n + 1);
    for j in 0..m {
        let mut row = vec![zero.clone(); n + 1];
        row[0] = g[j].clone();
        for i in 0..d {
            row[1 + i] = jac[j * d + i].clone();
        }
        row[1 + d + j] = Real::integer(-1);
        matrix.push(row);
    }
    for i in 0..d {
        let mut row = vec![zero.clone(); n + 1];
        row[0] = alpha[i].clone();
        row[1 + i] = Real::integer(-1);
        matrix.push(row);
    }
    let mut last = vec![zero; n + 1];
    last[0] = Real::integer(1);
    matrix.push(last);
    let mut bounds = vec![b1.clone(); m];
    bounds.extend(std::iter::repeat_n(b2.clone(), d));
    bounds.push(Monomial::integer(q_budget));
    Ok(LinearFormsSystem {
        d,
        m,
        q_budget,
        alpha: alpha.to_vec(),
        matrix,
        bounds,
        alpha_c: alpha.iter().map(Coef::from).collect(),
        g_c: g.iter().map(Coef::from).collect(),
        jac_c: jac.iter().map(Coef::from).collect(),
        b1: b1.into(),
        b2: b2.into(),
    })
}

impl LinearFormsSystem {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q_budget(&self) -> u64 {
        self.q_budget
    }

    pub fn alpha(&self) -> &[Real] {
        &self.alpha
    }

    /// Rows in the order (forms near the manifold, forms near `α`, `q`);
    /// columns in the order `(q, p_1, …, p_n)`.
    pub fn matrix(&self) -> &[Vec<Real>] {
        &self.matrix
    }

    pub fn bounds(&self) -> &[Monomial] {
        &self.bounds
    }

    /// Evaluates every form at an integer vector `(q, p_1, …, p_n)`.
    pub fn row_values(&self, v: &[i64]) -> Vec<Real> {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(Real::integer(0), |acc, (c, &x)| acc.add(&c.scale_int(x)))
            })
            .collect()
    }

    /// Decides whether `(q, p)` satisfies every inequality (the last one
    /// non-strictly).
    pub fn satisfies(&self, v: &[i64]) -> Decision {
        let vals = self.row_values(v);
        let k = vals.len() - 1;
        let strict = (0..k).fold(Decision::Yes, |acc, i| acc.and(vals[i].abs_lt(&self.bounds[i])));
        strict.and(Decision::from_bool(v[0].unsigned_abs() <= self.q_budget))
    }

    /// Checks that the matrix is a shear of a signed permutation (so
    /// `det = ±1`) and that the bounds multiply to 1.
    pub fn verify_structure(&self) -> Result<()> {
        let (d, m) = (self.d, self.m);
        let n = d + m;
        let bad = |what: String| Err(Error::InvalidParameter(format!("malformed linear-forms system: {what}")));
        if self.matrix.len() != n + 1 || self.matrix.iter().any(|r| r.len() != n + 1) {
            return bad("shape".into());
        }
        let is_int = |x: &Real, k: i64| x.as_rational() == Some(&Rational::from_integer(k.into()));
        for j in 0..m {
            let row = &self.matrix[j];
            for l in 0..m {
                if !is_int(&row[1 + d + l], if l == j { -1 } else { 0 }) {
                    return bad(format!("row {j} column p_{}", d + l + 1));
                }
            }
        }
        for i in 0..d {
            let row = &self.matrix[m + i];
            for l in 0..n {
                if !is_int(&row[1 + l], if l == i { -1 } else { 0 }) {
                    return bad(format!("row {} column p_{}", m + i, l + 1));
                }
            }
        }
        let last = &self.matrix[n];
        if !is_int(&last[0], 1) || (1..=n).any(|l| !is_int(&last[l], 0)) {
            return bad("last row is not e_0".into());
        }
        let prod = self.bounds.iter().fold(Monomial::one(), |acc, b| acc.mul(b));
        if !prod.is_structurally_one() && (prod.to_f64() - 1.0).abs() > 1e-12 {
            return bad(format!("bound product is {} instead of 1", prod.to_f64()));
        }
        Ok(())
    }

    /// Integers `p` with `|x − p| < bound`, where `x = Σ c_k·t_k`.
    fn candidates(terms: &[(&Coef, i64)], bound: &BoundVal, out: &mut Vec<i64>) -> u32 {
        let mut approx = 0.0;
        let mut err = 0.0;
        let mut mag = 0.0;
        for (c, t) in terms {
            let tf = *t as f64;
            approx += c.f * tf;
            err += c.err * tf.abs();
            mag += (c.f * tf).abs();
        }
        err += mag * (terms.len() + 1) as f64 * f64::EPSILON;
        let mut target = Target {
            approx,
            err,
            exact: || {
                let mut acc = QuadSurd::zero();
                for (c, t) in terms {
                    let term = c.exact.as_ref()?.scale(&Rational::from_integer((*t).into()));
                    acc = acc.checked_add(&term)?;
                }
                Some(acc)
            },
        };
        let mut b = Bound::new(bound.f, bound.rel, || bound.exact.clone());
        near_integers(&mut target, &mut b, out)
    }

    /// Lexicographically smallest `p` completing `q`, if any.
    fn solve_at(&self, q: i64, undecided: &AtomicU64) -> Option<Vec<i64>> {
        let (d, m) = (self.d, self.m);
        let mut axes = Vec::with_capacity(d);
        let mut u = 0;
        for i in 0..d {
            let mut out = Vec::new();
            u += Self::candidates(&[(&self.alpha_c[i], q)], &self.b2, &mut out);
            if out.is_empty() {
                undecided.fetch_add(u as u64, AtomicOrdering::Relaxed);
                return None;
            }
            axes.push(out);
        }
        for head in cartesian(&axes) {
            let mut tails = Vec::with_capacity(m);
            for j in 0..m {
                let mut terms: Vec<(&Coef, i64)> = Vec::with_capacity(d + 1);
                terms.push((&self.g_c[j], q));
                terms.extend(self.jac_c[j * d..(j + 1) * d].iter().zip(head.iter().copied()));
                let mut out = Vec::new();
                u += Self::candidates(&terms, &self.b1, &mut out);
                if out.is_empty() {
                    break;
                }
                tails.push(out);
            }
            if tails.len() < m {
                continue;
            }
            for tail in cartesian(&tails) {
                if q == 0 && head.iter().chain(&tail).all(|&x| x == 0) {
                    continue;
                }
                undecided.fetch_add(u as u64, AtomicOrdering::Relaxed);
                let mut p = head.clone();
                p.extend(tail);
                return Some(p);
            }
        }
        undecided.fetch_add(u as u64, AtomicOrdering::Relaxed);
        None
    }
}

/// A nonzero integer solution of a linear-forms system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemSolution {
    pub q: u64,
    pub p: Vec<i64>,
}

/// Scans `q = 1, …, Q` in parallel; for each `q` the first `d` coordinates
/// are forced to the integers near `q·α_i` and the last `m` to the integers
/// near the corresponding form. Returns the smallest `q ≥ 1` with a solution
/// and, for it, the lexicographically smallest `p`; falls back to `q = 0`.
pub fn solve_system(sys: &LinearFormsSystem) -> Result<SystemSolution> {
    sys.verify_structure()?;
    let undecided = AtomicU64::new(0);
    let found = (1..sys.q_budget as usize + 1)
        .into_par_iter()
        .with_min_len(256)
        .find_map_first(|q| {
            sys.solve_at(q as i64, &undecided)
                .map(|p| SystemSolution { q: q as u64, p })
        });
    if let Some(s) = found {
        return Ok(s);
    }
    if let Some(p) = sys.solve_at(0, &undecided) {
        return Ok(SystemSolution { q: 0, p });
    }
    Err(Error::SearchExhausted {
        q_budget: sys.q_budget,
        undecided: undecided.load(AtomicOrdering::Relaxed),
        detail: format!(
            "no integer point in the parallelepiped for alpha = [{}]",
            sys.alpha.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        ),
    })
}
