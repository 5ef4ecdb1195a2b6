use super::*;
use proptest::prelude::*;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn unit() -> BoxDomain {
    BoxDomain::unit(1)
}

#[test]
fn plane_examples() {
    let p = make_plane(vec![Real::ratio(1, 2)], 1, unit()).unwrap();
    assert_eq!((p.d(), p.m(), p.n()), (1, 1, 2));
    assert_eq!(p.eval_real(&[Real::ratio(1, 3)]), vec![Real::ratio(1, 2)]);
    assert_eq!(p.dbound(), &Real::integer(0));
    assert_eq!(p.cbound(), &Real::integer(0));
    assert!(p.is_exact() && p.is_constant());

    let z = make_plane(vec![Real::integer(0)], 2, BoxDomain::unit(2)).unwrap();
    assert_eq!(z.n(), 3);

    let g = parse_chart("plane:golden", None).unwrap();
    assert!((g.eval_f64(&[0.3])[0] - 0.6180339887498949).abs() < 1e-16);
    let f = parse_chart("plane:float:0.25", None).unwrap();
    assert!(!f.is_exact());
}

#[test]
fn parabola_examples() {
    let c = make_parabola(unit()).unwrap();
    assert_eq!(c.dbound(), &Real::integer(2));
    assert_eq!(c.cbound(), &Real::integer(2));
    assert_eq!(c.eval_real(&[Real::ratio(1, 2)]), vec![Real::ratio(1, 4)]);
    assert_eq!(c.jacobian_real(&[Real::ratio(3, 10)]), vec![Real::ratio(3, 5)]);
    assert!((c.jacobian_f64(&[0.3])[0] - 0.6).abs() < 1e-16);
}

#[test]
fn veronese_examples() {
    let v = make_veronese(3, unit()).unwrap();
    assert_eq!((v.d(), v.m()), (1, 2));
    assert_eq!(v.dbound(), &Real::integer(3));
    assert_eq!(v.cbound(), &Real::integer(6));
    assert_eq!(v.eval_real(&[Real::ratio(1, 2)]), vec![Real::ratio(1, 4), Real::ratio(1, 8)]);
    let v2 = make_veronese(2, unit()).unwrap();
    let p = make_parabola(unit()).unwrap();
    assert_eq!(v2.eval_real(&[Real::ratio(2, 7)]), p.eval_real(&[Real::ratio(2, 7)]));
    assert_eq!((v2.dbound(), v2.cbound()), (p.dbound(), p.cbound()));
    assert!(make_veronese(1, unit()).is_err());
    assert!(parse_chart("veronese:3", Some(BoxDomain::parse("0:2").unwrap())).is_err());
}

#[test]
fn sphere_bounds() {
    let s = parse_chart("sphere", None).unwrap();
    assert_eq!((s.d(), s.m()), (2, 1));
    // D = (1/2)/√(1/2) = √2/2, C = (1/2)^{-3/2} = 2√2.
    assert!((s.dbound().approx() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    assert!((s.cbound().approx() - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-15);
    let f = s.eval_real(&[Real::ratio(3, 10), Real::ratio(-2, 5)]);
    assert_eq!(f[0].exact_value(), QuadSurd::sqrt(&r(3, 4)).as_ref());
    assert!(make_sphere(BoxDomain::parse("-1:1,0:1/2").unwrap()).is_err());
}

#[test]
fn chart_spec_errors() {
    for bad in ["plane", "plane:", "plane:1@x", "hyperbola", "veronese:x", "sphere:2"] {
        assert!(parse_chart(bad, None).is_err(), "{bad}");
    }
    let p = parse_chart("plane:1/2,1/3@2", None).unwrap();
    assert_eq!((p.d(), p.m()), (2, 2));
}

#[test]
fn eval_g_examples() {
    let p = make_parabola(unit()).unwrap();
    assert_eq!(eval_g(&p, &[Real::ratio(1, 2)]).unwrap(), vec![Real::ratio(-1, 4)]);
    let v = make_veronese(3, unit()).unwrap();
    assert_eq!(eval_g(&v, &[Real::ratio(1, 2)]).unwrap(), vec![Real::ratio(-1, 4), Real::ratio(-1, 4)]);
    let pl = parse_chart("plane:golden", None).unwrap();
    assert_eq!(eval_g(&pl, &[Real::ratio(1, 3)]).unwrap(), vec![Real::parse("golden").unwrap()]);
    assert!(matches!(eval_g(&p, &[Real::integer(1)]), Err(Error::Domain(_))));
}

#[test]
fn taylor_examples() {
    let pl = make_plane(vec![Real::ratio(1, 2)], 1, unit()).unwrap();
    let pq = RationalPoint::new(vec![1, 1], 3).unwrap();
    assert_eq!(taylor_remainder_bound(&pl, &[Real::ratio(2, 5)], &pq).unwrap(), Real::integer(0));

    let p = make_parabola(unit()).unwrap();
    let a = Real::ratio(501, 1000);
    let pq = RationalPoint::new(vec![1, 0], 2).unwrap();
    let bound = taylor_remainder_bound(&p, std::slice::from_ref(&a), &pq).unwrap();
    assert_eq!(bound, Real::parse("1e-6").unwrap());
    // Exact remainder |f(α) − f(x) − f'(x)(α − x)| = (α − x)² with x = p/q.
    let x = Real::ratio(1, 2);
    let rem = a.mul(&a).sub(&x.mul(&x)).sub(&Real::integer(2).mul(&x).mul(&a.sub(&x))).abs();
    assert_eq!(rem, bound);
    let outside = RationalPoint::new(vec![3, 0], 2).unwrap();
    assert!(taylor_remainder_bound(&p, &[a], &outside).is_err());
}

/// Points of a 2-d Kronecker sequence inside the box, away from the faces.
fn kronecker(domain: &BoxDomain, count: usize) -> Vec<Vec<f64>> {
    let gens = [0.6180339887498949, 0.7548776662466927];
    (1..=count)
        .map(|k| {
            (0..domain.dim())
                .map(|i| {
                    let u = (k as f64 * gens[i]).fract();
                    let (lo, hi) = (domain.lower_f64(i), domain.upper_f64(i));
                    lo + (hi - lo) * (0.0005 + 0.999 * u)
                })
                .collect()
        })
        .collect()
}

type DerivBound = Box<dyn Fn(&[f64]) -> (f64, f64)>;

#[test]
fn stored_bounds_dominate_sampled_derivatives() {
    // Analytic first and second derivatives, written out independently of the charts.
    let cases: Vec<(ManifoldChart, DerivBound)> = vec![
        (
            parse_chart("parabola", None).unwrap(),
            Box::new(|a: &[f64]| ((2.0 * a[0]).abs(), 2.0)),
        ),
        (
            parse_chart("veronese:3", None).unwrap(),
            Box::new(|a: &[f64]| {
                let x = a[0];
                ((2.0 * x).max(3.0 * x * x), 2.0f64.max(6.0 * x))
            }),
        ),
        (
            parse_chart("veronese:5", None).unwrap(),
            Box::new(|a: &[f64]| {
                let x = a[0];
                let d = (1..5).map(|j| (j + 1) as f64 * x.powi(j)).fold(0.0, f64::max);
                let c = (1..5).map(|j| (j * (j + 1)) as f64 * x.powi(j - 1)).fold(0.0, f64::max);
                (d, c)
            }),
        ),
        (
            parse_chart("sphere", None).unwrap(),
            Box::new(|a: &[f64]| {
                let (x, y) = (a[0], a[1]);
                let f = (1.0 - x * x - y * y).sqrt();
                let d = (x / f).abs().max((y / f).abs());
                let f3 = f * f * f;
                let c = ((1.0 - y * y) / f3).max((1.0 - x * x) / f3).max((x * y / f3).abs());
                (d, c)
            }),
        ),
    ];
    for (chart, derivs) in cases {
        for a in kronecker(chart.domain(), 10_000) {
            let (d, c) = derivs(&a);
            assert!(d <= chart.dbound().approx(), "{}: D sample {d} at {a:?}", chart.name());
            assert!(c <= chart.cbound().approx(), "{}: C sample {c} at {a:?}", chart.name());
            // The chart's own Jacobian agrees with the analytic one.
            let jmax = chart.jacobian_f64(&a).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!((jmax - d).abs() < 1e-12, "{}", chart.name());
        }
    }
}

#[test]
fn custom_chart_bounds_are_estimated() {
    let f: CustomFn = std::sync::Arc::new(|a: &[f64], out: &mut [f64]| out[0] = a[0].sin());
    let j: CustomFn = std::sync::Arc::new(|a: &[f64], out: &mut [f64]| out[0] = a[0].cos());
    let c = make_custom("sin", 1, unit(), f.clone(), j.clone(), None).unwrap();
    assert!(!c.is_verified() && !c.is_exact());
    // sup cos = 1 and sup |sin| = sin 1 on (0,1), inflated by 10%.
    assert!((c.dbound().approx() - 1.1).abs() < 1e-3);
    assert!((c.cbound().approx() - 1.1 * 1f64.sin()).abs() < 1e-3);
    let c = make_custom("sin", 1, unit(), f, j, Some((1.0, 1.0))).unwrap();
    assert!(c.is_verified());
    assert!(c.with_domain(BoxDomain::unit(1)).is_err());
}

#[test]
fn with_domain_recomputes_bounds() {
    let p = parse_chart("parabola", None).unwrap();
    let q = p.with_domain(BoxDomain::parse("-3:1").unwrap()).unwrap();
    assert_eq!(q.dbound(), &Real::integer(6));
}

fn exact_chart() -> impl Strategy<Value = ManifoldChart> {
    prop_oneof![
        Just(parse_chart("parabola", None).unwrap()),
        Just(parse_chart("veronese:3", None).unwrap()),
        Just(parse_chart("veronese:4", None).unwrap()),
        Just(parse_chart("plane:1/3,2/7", None).unwrap()),
        Just(parse_chart("plane:golden", None).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn taylor_bound_dominates_remainder(chart in exact_chart(), an in 1i64..1000, q in 1u64..300, pseed in 0u64..10_000) {
        let a = Real::ratio(an, 1000);
        let p1 = 1 + (pseed % (q.max(2) - 1)) as i64;
        prop_assume!((p1 as u64) < q);
        let pq = RationalPoint::new(vec![p1], q).unwrap();
        let bound = taylor_remainder_bound(&chart, std::slice::from_ref(&a), &pq).unwrap();
        let x = Real::ratio(p1, q as i64);
        let fx = chart.eval_real(std::slice::from_ref(&x));
        let fa = chart.eval_real(std::slice::from_ref(&a));
        let ja = chart.jacobian_real(std::slice::from_ref(&a));
        for j in 0..chart.m() {
            let rem = fx[j].sub(&fa[j]).sub(&ja[j].mul(&x.sub(&a))).abs();
            prop_assert!(rem.is_exact());
            prop_assert_ne!(bound.lt(&rem), Some(true));
        }
    }

    #[test]
    fn sphere_taylor_bound(ax in -499i64..500, ay in -499i64..500, q in 2u64..200, px in 0u64..1000, py in 0u64..1000) {
        let chart = parse_chart("sphere", None).unwrap();
        let a = [Real::ratio(ax, 1000), Real::ratio(ay, 1000)];
        let lo = -(q as i64 - 1) / 2;
        let span = (q as i64 - 1) / 2 - lo + 1;
        let p = vec![lo + (px as i64 % span), lo + (py as i64 % span)];
        let pq = RationalPoint::new(p.clone(), q).unwrap();
        prop_assume!(chart.domain().contains_rational(&p, q));
        let bound = taylor_remainder_bound(&chart, &a, &pq).unwrap();
        let x: Vec<f64> = pq.coords_f64();
        let af: Vec<f64> = a.iter().map(Real::approx).collect();
        let fx = chart.eval_f64(&x)[0];
        let fa = chart.eval_f64(&af)[0];
        let ja = chart.jacobian_f64(&af);
        let rem = (fx - fa - ja[0] * (x[0] - af[0]) - ja[1] * (x[1] - af[1])).abs();
        prop_assert!(rem <= bound.approx() + 1e-13);
    }

    #[test]
    fn g_identity(chart in exact_chart(), an in 1i64..1000) {
        let a = [Real::ratio(an, 1000)];
        let g = eval_g(&chart, &a).unwrap();
        let f = chart.eval_real(&a);
        let jac = chart.jacobian_real(&a);
        for j in 0..chart.m() {
            prop_assert_eq!(g[j].add(&a[0].mul(&jac[j])), f[j].clone());
        }
    }
}
