use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, ToPrimitive};

use super::{BoxDomain, ChartMap, ManifoldChart};
use crate::error::{Error, Result};
use crate::exact::{QuadSurd, Rational, Real};

const EPS: f64 = f64::EPSILON;

/// Which family a chart belongs to.
#[derive(Clone, Debug, PartialEq)]
pub enum ChartKind {
    Plane { beta: Vec<Real> },
    Parabola,
    Veronese { n: usize },
    Sphere,
    Custom,
}

#[derive(Debug)]
struct Plane {
    beta: Vec<Real>,
    beta_f: Vec<f64>,
    exact: Option<Vec<QuadSurd>>,
    d: usize,
}

impl ChartMap for Plane {
    fn eval(&self, _a: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.beta_f);
    }

    fn jacobian(&self, _a: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    fn eval_exact(&self, _a: &[QuadSurd]) -> Option<Vec<QuadSurd>> {
        self.exact.clone()
    }

    fn jacobian_exact(&self, _a: &[QuadSurd]) -> Option<Vec<QuadSurd>> {
        Some(vec![QuadSurd::zero(); self.beta.len() * self.d])
    }

    fn is_constant(&self) -> bool {
        true
    }

    fn abs_error(&self) -> f64 {
        self.beta.iter().map(Real::error).fold(f64::MIN_POSITIVE, f64::max)
    }
}

/// The affine plane `{(α, β)}`: `f ≡ β`, `D = C = 0`.
pub fn make_plane(beta: Vec<Real>, d: usize, domain: BoxDomain) -> Result<ManifoldChart> {
    if beta.is_empty() {
        return Err(Error::InvalidParameter("plane needs at least one beta coordinate".into()));
    }
    if d == 0 || domain.dim() != d {
        return Err(Error::InvalidParameter(format!("plane needs a domain of dimension d = {d} >= 1")));
    }
    let exact: Option<Vec<QuadSurd>> = beta.iter().map(|b| b.exact_value().cloned()).collect();
    let is_exact = exact.is_some();
    let m = beta.len();
    let shown: Vec<String> = beta.iter().map(ToString::to_string).collect();
    let map = Plane {
        beta_f: beta.iter().map(Real::approx).collect(),
        beta: beta.clone(),
        exact,
        d,
    };
    Ok(ManifoldChart::from_parts(
        format!("plane:{}@{d}", shown.join(",")),
        ChartKind::Plane { beta },
        d,
        m,
        domain,
        Arc::new(map),
        Real::integer(0),
        Real::integer(0),
        is_exact,
        true,
    ))
}

fn sup_abs(domain: &BoxDomain, i: usize) -> Rational {
    let lo = domain.lower()[i].abs();
    let hi = domain.upper()[i].abs();
    if lo > hi {
        lo
    } else {
        hi
    }
}

#[derive(Debug)]
struct Monomials {
    /// `f_j(α) = α^{powers[j]}`.
    powers: Vec<u32>,
    err: f64,
}

impl ChartMap for Monomials {
    fn eval(&self, a: &[f64], out: &mut [f64]) {
        for (o, &k) in out.iter_mut().zip(&self.powers) {
            *o = a[0].powi(k as i32);
        }
    }

    fn jacobian(&self, a: &[f64], out: &mut [f64]) {
        for (o, &k) in out.iter_mut().zip(&self.powers) {
            *o = k as f64 * a[0].powi(k as i32 - 1);
        }
    }

    fn eval_exact(&self, a: &[QuadSurd]) -> Option<Vec<QuadSurd>> {
        Some(self.powers.iter().map(|&k| a[0].pow(k)).collect())
    }

    fn jacobian_exact(&self, a: &[QuadSurd]) -> Option<Vec<QuadSurd>> {
        Some(
            self.powers
                .iter()
                .map(|&k| a[0].pow(k - 1).scale(&Rational::from_integer(k.into())))
                .collect(),
        )
    }

    fn abs_error(&self) -> f64 {
        self.err
    }
}

fn monomial_chart(name: String, kind: ChartKind, n: usize, domain: BoxDomain) -> Result<ManifoldChart> {
    if domain.dim() != 1 {
        return Err(Error::InvalidParameter(format!("{name} needs a one-dimensional domain")));
    }
    let l = sup_abs(&domain, 0);
    let lf = l.to_f64().unwrap_or(f64::INFINITY).max(1.0);
    let powers: Vec<u32> = (2..=n as u32).collect();
    let mut dmax = Rational::from_integer(0.into());
    let mut cmax = Rational::from_integer(0.into());
    for &k in &powers {
        let kk = Rational::from_integer(k.into());
        let dj = &kk * num_traits::pow(l.clone(), (k - 1) as usize);
        let cj = &kk * (&kk - Rational::from_integer(1.into())) * num_traits::pow(l.clone(), (k - 2) as usize);
        if dj > dmax {
            dmax = dj;
        }
        if cj > cmax {
            cmax = cj;
        }
    }
    // powi rounding plus the input rounding of α scaled by D.
    let dm = dmax.to_f64().unwrap_or(f64::INFINITY);
    let err = 4.0 * n as f64 * EPS * lf.powi(n as i32) * (1.0 + n as f64) + dm * lf * EPS;
    let m = powers.len();
    Ok(ManifoldChart::from_parts(
        name,
        kind,
        1,
        m,
        domain,
        Arc::new(Monomials { powers, err }),
        Real::rational(dmax),
        Real::rational(cmax),
        true,
        true,
    ))
}

/// `f(α) = α²` on a bounded interval: `D = 2 sup|α|`, `C = 2`.
pub fn make_parabola(domain: BoxDomain) -> Result<ManifoldChart> {
    monomial_chart("parabola".into(), ChartKind::Parabola, 2, domain)
}

/// `f(α) = (α², …, α^n)` on a sub-interval of `(0, 1)`.
pub fn make_veronese(n: usize, domain: BoxDomain) -> Result<ManifoldChart> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("veronese curve needs n >= 2, got {n}")));
    }
    if domain.dim() == 1 && (domain.lower()[0].is_negative() || domain.upper()[0] > Rational::from_integer(1.into())) {
        return Err(Error::InvalidParameter(format!("veronese domain must lie in (0, 1), got {domain}")));
    }
    monomial_chart(format!("veronese:{n}"), ChartKind::Veronese { n }, n, domain)
}

#[derive(Debug)]
struct Sphere {
    err: f64,
}

impl ChartMap for Sphere {
    fn eval(&self, a: &[f64], out: &mut [f64]) {
        out[0] = (1.0 - a[0] * a[0] - a[1] * a[1]).sqrt();
    }

    fn jacobian(&self, a: &[f64], out: &mut [f64]) {
        let f = (1.0 - a[0] * a[0] - a[1] * a[1]).sqrt();
        out[0] = -a[0] / f;
        out[1] = -a[1] / f;
    }

    fn eval_exact(&self, a: &[QuadSurd]) -> Option<Vec<QuadSurd>> {
        let t = Rational::from_integer(1.into()) - a[0].as_rational()?.pow(2) - a[1].as_rational()?.pow(2);
        Some(vec![QuadSurd::sqrt(&t)?])
    }

    fn jacobian_exact(&self, a: &[QuadSurd]) -> Option<Vec<QuadSurd>> {
        let f = self.eval_exact(a)?.pop()?;
        Some(vec![a[0].neg().checked_div(&f)?, a[1].neg().checked_div(&f)?])
    }

    fn abs_error(&self) -> f64 {
        self.err
    }
}

/// The upper unit hemisphere `f(α) = √(1 − α₁² − α₂²)` over a box whose
/// closure stays inside the open unit disc. With `t = 1 − Σ sup α_i²`,
/// `D = max sup|α_i| / √t` and `C = t^{-3/2}`.
pub fn make_sphere(domain: BoxDomain) -> Result<ManifoldChart> {
    if domain.dim() != 2 {
        return Err(Error::InvalidParameter("sphere needs a two-dimensional domain".into()));
    }
    let a0 = sup_abs(&domain, 0);
    let a1 = sup_abs(&domain, 1);
    let t = Rational::from_integer(1.into()) - &a0 * &a0 - &a1 * &a1;
    if !t.is_positive() {
        return Err(Error::InvalidParameter(format!(
            "sphere domain {domain} reaches the unit circle, where the derivative bounds blow up"
        )));
    }
    let inv_root = QuadSurd::sqrt(&t).and_then(|s| s.checked_inv()).expect("t > 0");
    let amax = if a0 > a1 { a0 } else { a1 };
    let dbound = inv_root.scale(&amax);
    let cbound = inv_root.scale(&t.recip());
    let fmin = t.to_f64().unwrap_or(0.0).sqrt();
    let err = 16.0 * EPS / (fmin * fmin * fmin);
    Ok(ManifoldChart::from_parts(
        "sphere".into(),
        ChartKind::Sphere,
        2,
        1,
        domain,
        Arc::new(Sphere { err }),
        Real::exact(dbound),
        Real::exact(cbound),
        true,
        true,
    ))
}

/// A user-supplied map `f` or Jacobian, writing into the output buffer.
pub type CustomFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

struct Custom {
    f: CustomFn,
    jac: CustomFn,
    err: f64,
}

impl fmt::Debug for Custom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Custom").field("err", &self.err).finish_non_exhaustive()
    }
}

impl ChartMap for Custom {
    fn eval(&self, a: &[f64], out: &mut [f64]) {
        (self.f)(a, out)
    }

    fn jacobian(&self, a: &[f64], out: &mut [f64]) {
        (self.jac)(a, out)
    }

    fn abs_error(&self) -> f64 {
        self.err
    }
}

/// Grid points strictly inside the box, about `target` of them.
fn sample_grid(domain: &BoxDomain, target: usize) -> Vec<Vec<f64>> {
    let d = domain.dim();
    let per_axis = ((target as f64).powf(1.0 / d as f64).ceil() as usize).max(2);
    let mut pts = vec![Vec::new()];
    for i in 0..d {
        let (lo, hi) = (domain.lower_f64(i), domain.upper_f64(i));
        let mut next = Vec::new();
        for p in &pts {
            for k in 0..per_axis {
                let mut x = p.clone();
                x.push(lo + (hi - lo) * (k as f64 + 0.5) / per_axis as f64);
                next.push(x);
            }
        }
        pts = next;
    }
    pts
}

/// A chart from user callbacks. Without explicit `(D, C)` the bounds are
/// estimated on a grid of about 10⁴ points (second derivatives by forward
/// differences of the Jacobian), inflated by 10%, and the chart is marked
/// unverified.
pub fn make_custom(
    name: &str,
    m: usize,
    domain: BoxDomain,
    f: CustomFn,
    jac: CustomFn,
    bounds: Option<(f64, f64)>,
) -> Result<ManifoldChart> {
    let d = domain.dim();
    if m == 0 {
        return Err(Error::InvalidParameter("custom chart needs m >= 1".into()));
    }
    let grid = sample_grid(&domain, 10_000);
    let mut fmax: f64 = 0.0;
    let mut out = vec![0.0; m];
    for x in &grid {
        f(x, &mut out);
        fmax = out.iter().fold(fmax, |acc, v| acc.max(v.abs()));
    }
    let (dbound, cbound, verified) = match bounds {
        Some((dd, cc)) => {
            if !(dd >= 0.0 && cc >= 0.0 && dd.is_finite() && cc.is_finite()) {
                return Err(Error::InvalidParameter(format!("bounds D = {dd}, C = {cc} must be finite and >= 0")));
            }
            (dd, cc, true)
        }
        None => {
            let mut j0 = vec![0.0; m * d];
            let mut j1 = vec![0.0; m * d];
            let (mut dmax, mut cmax): (f64, f64) = (0.0, 0.0);
            for x in &grid {
                jac(x, &mut j0);
                dmax = j0.iter().fold(dmax, |acc, v| acc.max(v.abs()));
                for k in 0..d {
                    let h = 1e-6 * (domain.upper_f64(k) - domain.lower_f64(k));
                    let mut xh = x.clone();
                    xh[k] += h;
                    jac(&xh, &mut j1);
                    for (a, b) in j0.iter().zip(&j1) {
                        cmax = cmax.max(((b - a) / h).abs());
                    }
                }
            }
            (dmax * 1.1, cmax * 1.1, false)
        }
    };
    let err = 1e-12 * (1.0 + fmax);
    Ok(ManifoldChart::from_parts(
        name.to_string(),
        ChartKind::Custom,
        d,
        m,
        domain,
        Arc::new(Custom { f, jac, err }),
        Real::float(dbound),
        Real::float(cbound),
        false,
        verified,
    ))
}

pub(super) fn rebuild(chart: &ManifoldChart, domain: BoxDomain) -> Result<ManifoldChart> {
    match chart.kind() {
        ChartKind::Plane { beta } => make_plane(beta.clone(), chart.d(), domain),
        ChartKind::Parabola => make_parabola(domain),
        ChartKind::Veronese { n } => make_veronese(*n, domain),
        ChartKind::Sphere => make_sphere(domain),
        ChartKind::Custom => Err(Error::InvalidParameter(
            "custom charts fix their domain at construction".into(),
        )),
    }
}
