//! Rational points `p/q` and finite-range ψ-approximability.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{Rational, Real};
use crate::near::{near_integers, Bound, Target};
use crate::psi::ApproxFunction;

/// An integer vector `p` over a positive denominator `q`, not necessarily
/// in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    pub q: u64,
    pub p: Vec<i64>,
}

impl RationalPoint {
    pub fn new(p: Vec<i64>, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("denominator q must be >= 1".into()));
        }
        Ok(RationalPoint { q, p })
    }

    pub fn coord(&self, i: usize) -> Rational {
        Rational::new(self.p[i].into(), self.q.into())
    }

    pub fn coords(&self) -> Vec<Real> {
        (0..self.p.len()).map(|i| Real::rational(self.coord(i))).collect()
    }

    pub fn coords_f64(&self) -> Vec<f64> {
        self.p.iter().map(|&p| p as f64 / self.q as f64).collect()
    }

    /// `gcd(p_1, …, p_n, q)`.
    pub fn content(&self) -> u64 {
        self.p
            .iter()
            .fold(self.q, |g, &x| num_integer::gcd(g, x.unsigned_abs()))
    }
}

/// Witnesses of `max_i |q y_i − p_i| < ψ(q)` for `q ≤ qmax`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Witnesses {
    /// Sorted by `q`, then `p`.
    pub points: Vec<RationalPoint>,
    /// Denominators where some candidate could not be decided.
    pub undecided: Vec<u64>,
}

/// All integer solutions `p` of `|q·y_i − p_i| < ψ(q)` for each `q`.
pub(crate) fn simultaneous_candidates(y: &[Real], psi: &ApproxFunction, q: u64) -> (Vec<Vec<i64>>, u32) {
    let bf = psi.value_f64(q);
    let mut undecided = 0;
    let mut per_axis = Vec::with_capacity(y.len());
    for yi in y {
        let mut t = Target {
            approx: yi.approx() * q as f64,
            err: yi.error() * q as f64 + (yi.approx() * q as f64).abs() * f64::EPSILON,
            exact: || yi.exact_value().map(|v| v.scale(&Rational::from_integer(q.into()))),
        };
        let mut b = Bound::new(bf, ApproxFunction::F64_REL_ERROR, || psi.value(q));
        let mut out = Vec::new();
        undecided += near_integers(&mut t, &mut b, &mut out);
        if out.is_empty() {
            return (Vec::new(), undecided);
        }
        per_axis.push(out);
    }
    (per_axis, undecided)
}

/// Lexicographic cartesian product.
pub(crate) fn cartesian(axes: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut acc: Vec<Vec<i64>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(acc.len() * axis.len());
        for prefix in &acc {
            for &v in axis {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        acc = next;
    }
    acc
}

pub fn is_psi_approximable_upto(y: &[Real], psi: &ApproxFunction, qmax: u64) -> Result<Witnesses> {
    if qmax == 0 {
        return Err(Error::InvalidParameter("qmax must be >= 1".into()));
    }
    if y.is_empty() {
        return Err(Error::InvalidParameter("y must be non-empty".into()));
    }
    let per_q: Vec<(u64, Vec<Vec<i64>>, u32)> = (1..=qmax)
        .into_par_iter()
        .map(|q| {
            let (axes, undecided) = simultaneous_candidates(y, psi, q);
            let pts = if axes.len() == y.len() { cartesian(&axes) } else { Vec::new() };
            (q, pts, undecided)
        })
        .collect();
    let mut w = Witnesses::default();
    for (q, pts, undecided) in per_q {
        if undecided > 0 {
            w.undecided.push(q);
        }
        w.points.extend(pts.into_iter().map(|p| RationalPoint { q, p }));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn rational_point_basics() {
        assert!(RationalPoint::new(vec![1], 0).is_err());
        let p = RationalPoint::new(vec![2, 4], 6).unwrap();
        assert_eq!(p.content(), 2);
        assert_eq!(p.coord(0), r(1, 3));
    }

    #[test]
    fn exact_multiples_of_denominator() {
        let y = [Real::ratio(1, 3), Real::ratio(2, 3)];
        let psi = ApproxFunction::inverse_power(r(1, 1)).unwrap();
        let w = is_psi_approximable_upto(&y, &psi, 10).unwrap();
        for q in [3u64, 6, 9] {
            let pt = w.points.iter().find(|p| p.q == q).expect("multiple of 3");
            assert_eq!(pt.p, vec![q as i64 / 3, 2 * q as i64 / 3]);
        }
        assert!(w.undecided.is_empty());
    }

    #[test]
    fn sqrt2_witnesses() {
        // Brute-force oracle (independent high-precision scan):
        // q with ‖q(√2−1)‖ < 1/q for q ≤ 100.
        let y = [Real::parse("sqrt2").unwrap()];
        let psi = ApproxFunction::inverse_power(r(1, 1)).unwrap();
        let w = is_psi_approximable_upto(&y, &psi, 100).unwrap();
        let mut qs: Vec<u64> = w.points.iter().map(|p| p.q).collect();
        // q = 1 has two witnesses, p = 0 and p = 1.
        assert_eq!(qs.iter().filter(|&&q| q == 1).count(), 2);
        qs.dedup();
        assert_eq!(qs, vec![1, 2, 3, 5, 7, 12, 17, 29, 41, 70, 99]);
    }

    #[test]
    fn full_set_below_one_over_n() {
        // ψ = q^{-1/2} in R²: every prefix has a witness.
        let y = [Real::parse("golden").unwrap(), Real::parse("sqrt2").unwrap()];
        let psi = ApproxFunction::inverse_power(r(1, 2)).unwrap();
        let w = is_psi_approximable_upto(&y, &psi, 2000).unwrap();
        let mut qs: Vec<u64> = w.points.iter().map(|p| p.q).collect();
        qs.dedup();
        assert!(qs.len() > 10);
        assert!(*qs.last().unwrap() > 1000);
    }

    /// Exact double loop over every `p` in a generous window.
    fn oracle(y: &[Rational], c: &Rational, qmax: u64) -> Vec<RationalPoint> {
        let mut out = Vec::new();
        for q in 1..=qmax {
            let qq = Rational::from_integer(q.into());
            let bound = c / &qq;
            let mut axes = Vec::new();
            for yi in y {
                let x = yi * &qq;
                let base = x.floor().to_integer();
                let base: i64 = base.try_into().unwrap();
                let ok: Vec<i64> = (base - 4..=base + 4)
                    .filter(|p| {
                        let diff = &x - Rational::from_integer((*p).into());
                        diff.abs() < bound
                    })
                    .collect();
                axes.push(ok);
            }
            if axes.iter().all(|a| !a.is_empty()) {
                out.extend(cartesian(&axes).into_iter().map(|p| RationalPoint { q, p }));
            }
        }
        out
    }

    use num_traits::Signed;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn agrees_with_double_loop(
            coords in proptest::collection::vec((0i64..1000, 1i64..1000), 1..=3),
            cn in 1i64..30,
            qmax in 1u64..=200,
        ) {
            let y: Vec<Rational> = coords.iter().map(|&(a, b)| r(a, b)).collect();
            let c = r(cn, 10);
            let psi = ApproxFunction::power_law(c.clone(), r(1, 1)).unwrap();
            let reals: Vec<Real> = y.iter().cloned().map(Real::rational).collect();
            let got = is_psi_approximable_upto(&reals, &psi, qmax).unwrap();
            prop_assert!(got.undecided.is_empty());
            prop_assert_eq!(got.points, oracle(&y, &c, qmax));
        }
    }
}
