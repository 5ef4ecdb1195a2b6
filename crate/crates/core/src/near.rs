//! Strict `|x − p| < bound` scans over integers `p`: a float filter with an
//! exact fallback, shared by every enumeration kernel.

use crate::exact::{abs_lt, filter_lt, Decision, Monomial, QuadSurd, Rational};

/// A real target `x` given as a double with an absolute error bound and a
/// lazily computed exact value.
pub(crate) struct Target<F: FnMut() -> Option<QuadSurd>> {
    pub approx: f64,
    pub err: f64,
    pub exact: F,
}

/// A positive bound given as a double with relative error and a lazily
/// built exact monomial.
pub(crate) struct Bound<G: FnMut() -> Monomial> {
    pub approx: f64,
    pub rel: f64,
    pub exact: G,
    cached: Option<Monomial>,
}

impl<G: FnMut() -> Monomial> Bound<G> {
    pub fn new(approx: f64, rel: f64, exact: G) -> Self {
        Bound {
            approx,
            rel,
            exact,
            cached: None,
        }
    }

    fn monomial(&mut self) -> &Monomial {
        if self.cached.is_none() {
            self.cached = Some((self.exact)());
        }
        self.cached.as_ref().unwrap()
    }
}

/// Appends to `out` every integer `p` with `|x − p| < bound`, in increasing
/// order, and returns how many candidates could not be decided.
pub(crate) fn near_integers<F, G>(x: &mut Target<F>, bound: &mut Bound<G>, out: &mut Vec<i64>) -> u32
where
    F: FnMut() -> Option<QuadSurd>,
    G: FnMut() -> Monomial,
{
    let reach = bound.approx * (1.0 + bound.rel) + x.err;
    let lo = (x.approx - reach).floor();
    let hi = (x.approx + reach).ceil();
    if !(lo.is_finite() && hi.is_finite()) || hi - lo > 1e7 {
        return u32::MAX;
    }
    let mut exact_x: Option<Option<QuadSurd>> = None;
    let mut undecided = 0;
    let mut p = lo as i64;
    while p as f64 <= hi {
        let diff = (x.approx - p as f64).abs();
        let err = x.err + diff * f64::EPSILON;
        let decision = match filter_lt(diff, err, bound.approx, bound.rel) {
            Some(b) => Decision::from_bool(b),
            None => {
                let ex = exact_x.get_or_insert_with(|| (x.exact)());
                match ex {
                    Some(v) => {
                        let delta = v.add_rational(&-Rational::from_integer(p.into()));
                        abs_lt(&delta, bound.monomial())
                    }
                    None => Decision::Undecided,
                }
            }
        };
        match decision {
            Decision::Yes => out.push(p),
            Decision::No => {}
            Decision::Undecided => undecided += 1,
        }
        p += 1;
    }
    undecided
}
