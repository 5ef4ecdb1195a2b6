//! Reproducible low-discrepancy α samples.
//!
//! Sample `k` under seed `σ` has coordinates
//! `lo_i + w_i·(1/4 + frac((k + σ + 1)·θ_i)/2)` with `θ_1 = φ − 1` and
//! `θ_i = √p_i` for the following primes. Each coordinate is an exact
//! quadratic irrational in the middle half of the domain side.

use crate::error::{Error, Result};
use crate::exact::{QuadSurd, Rational, Real};
use crate::manifold::BoxDomain;

/// Default seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 20_240_601;

const PRIMES: [u64; 12] = [2, 3, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn direction(i: usize) -> Result<QuadSurd> {
    match i {
        0 => Ok(QuadSurd::golden()),
        _ => PRIMES
            .get(i - 1)
            .map(|&p| QuadSurd::sqrt_int(p))
            .ok_or_else(|| Error::InvalidParameter(format!("sampling supports at most {} axes", PRIMES.len() + 1))),
    }
}

/// `frac(k·θ)`, exact.
fn frac_multiple(theta: &QuadSurd, k: u64) -> QuadSurd {
    let x = theta.scale(&Rational::from_integer(k.into()));
    let fl = Rational::from_integer(x.floor());
    x.add_rational(&-fl)
}

/// The `k`-th point of the sequence for `seed`, inside `domain`.
pub fn kronecker_point(domain: &BoxDomain, seed: u64, k: u64) -> Result<Vec<Real>> {
    let idx = seed
        .checked_add(k)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(|| Error::InvalidParameter("seed + index overflows".into()))?;
    let quarter = Rational::new(1.into(), 4.into());
    let half = Rational::new(1.into(), 2.into());
    (0..domain.dim())
        .map(|i| {
            let theta = direction(i)?;
            let lo = &domain.lower()[i];
            let w = &domain.upper()[i] - lo;
            let u = frac_multiple(&theta, idx).scale(&half).add_rational(&quarter);
            Ok(Real::exact(u.scale(&w).add_rational(lo)))
        })
        .collect()
}

/// The first `count` points of the sequence.
pub fn kronecker_samples(domain: &BoxDomain, seed: u64, count: usize) -> Result<Vec<Vec<Real>>> {
    (0..count as u64).map(|k| kronecker_point(domain, seed, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_golden_points() {
        let unit = BoxDomain::unit(1);
        let pts = kronecker_samples(&unit, 0, 3).unwrap();
        let phi1 = (5f64.sqrt() - 1.0) / 2.0;
        for (k, p) in pts.iter().enumerate() {
            let want = 0.25 + ((k as f64 + 1.0) * phi1).fract() / 2.0;
            assert!((p[0].approx() - want).abs() < 1e-15);
            assert!(p[0].is_irrational());
        }
    }

    #[test]
    fn seed_shifts_the_sequence() {
        let unit = BoxDomain::unit(2);
        let a = kronecker_samples(&unit, 5, 4).unwrap();
        let b = kronecker_samples(&unit, 3, 6).unwrap();
        assert_eq!(a[..], b[2..]);
        assert_eq!(kronecker_samples(&unit, 5, 4).unwrap(), a);
    }

    #[test]
    fn too_many_axes() {
        assert!(kronecker_point(&BoxDomain::unit(14), 0, 0).is_err());
        assert!(kronecker_point(&BoxDomain::unit(1), u64::MAX, 0).is_err());
    }

    proptest! {
        #[test]
        fn points_stay_in_middle_half(seed in 0u64..1_000_000, k in 0u64..1000, d in 1usize..4, lo in -5i64..5, w in 1i64..4) {
            let dom = BoxDomain::cube(d, Rational::from_integer(lo.into()), Rational::from_integer((lo + w).into()));
            let p = kronecker_point(&dom, seed, k).unwrap();
            for x in &p {
                let v = x.exact_value().unwrap();
                let q1 = Rational::from_integer(lo.into()) + Rational::new(w.into(), 4.into());
                let q3 = Rational::from_integer(lo.into()) + Rational::new((3 * w).into(), 4.into());
                prop_assert!(v.cmp_rational(&q1).is_ge());
                prop_assert!(v.cmp_rational(&q3).is_lt());
            }
            prop_assert!(dom.contains(&p));
        }
    }
}
