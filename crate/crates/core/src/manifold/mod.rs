//! Manifolds in Monge form `{(α, f(α)) : α ∈ U}` over an open box `U ⊂ R^d`.

mod builtin;
mod domain;
mod spec;

use std::fmt;
use std::sync::Arc;

pub use builtin::{make_custom, make_parabola, make_plane, make_sphere, make_veronese, ChartKind, CustomFn};
pub use domain::BoxDomain;
pub use spec::parse_chart;

use crate::error::{Error, Result};
use crate::exact::{QuadSurd, Rational, Real};
use crate::point::RationalPoint;

/// The map `f: U → R^m` and its Jacobian.
///
/// The float methods write into caller buffers; the Jacobian is row-major
/// `m × d`. Exact evaluation is optional and returns `None` when the result
/// leaves the quadratic field of the input.
pub trait ChartMap: Send + Sync + fmt::Debug {
    fn eval(&self, a: &[f64], out: &mut [f64]);
    fn jacobian(&self, a: &[f64], out: &mut [f64]);

    fn eval_exact(&self, _a: &[QuadSurd]) -> Option<Vec<QuadSurd>> {
        None
    }

    fn jacobian_exact(&self, _a: &[QuadSurd]) -> Option<Vec<QuadSurd>> {
        None
    }

    /// True when `f` does not depend on `α`.
    fn is_constant(&self) -> bool {
        false
    }

    /// Absolute error bound of `eval`/`jacobian` at exactly representable
    /// points of the domain.
    fn abs_error(&self) -> f64;
}

#[derive(Clone)]
pub struct ManifoldChart {
    name: String,
    kind: ChartKind,
    d: usize,
    m: usize,
    domain: BoxDomain,
    map: Arc<dyn ChartMap>,
    dbound: Real,
    cbound: Real,
    exact: bool,
    verified: bool,
}

impl fmt::Debug for ManifoldChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManifoldChart")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("d", &self.d)
            .field("m", &self.m)
            .field("domain", &self.domain)
            .field("D", &self.dbound)
            .field("C", &self.cbound)
            .field("exact", &self.exact)
            .field("verified", &self.verified)
            .finish()
    }
}

impl ManifoldChart {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        name: String,
        kind: ChartKind,
        d: usize,
        m: usize,
        domain: BoxDomain,
        map: Arc<dyn ChartMap>,
        dbound: Real,
        cbound: Real,
        exact: bool,
        verified: bool,
    ) -> Self {
        ManifoldChart {
            name,
            kind,
            d,
            m,
            domain,
            map,
            dbound,
            cbound,
            exact,
            verified,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &ChartKind {
        &self.kind
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.d + self.m
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    /// `D`: sup of `|∂f_j/∂α_i|` over `U`.
    pub fn dbound(&self) -> &Real {
        &self.dbound
    }

    /// `C`: sup of `|∂²f_j/∂α_i∂α_k|` over `U`.
    pub fn cbound(&self) -> &Real {
        &self.cbound
    }

    /// Exact evaluation is available at exact points.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// False for user charts whose bounds were estimated by sampling.
    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn is_constant(&self) -> bool {
        self.map.is_constant()
    }

    pub fn map(&self) -> &dyn ChartMap {
        self.map.as_ref()
    }

    /// Returns a copy of this chart restricted to (or moved onto) a new box.
    pub fn with_domain(&self, domain: BoxDomain) -> Result<Self> {
        if domain.dim() != self.d {
            return Err(Error::InvalidParameter(format!(
                "domain has dimension {} but the chart has d = {}",
                domain.dim(),
                self.d
            )));
        }
        builtin::rebuild(self, domain)
    }

    pub fn eval_f64(&self, a: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        self.map.eval(a, &mut out);
        out
    }

    pub fn jacobian_f64(&self, a: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m * self.d];
        self.map.jacobian(a, &mut out);
        out
    }

    pub fn abs_error(&self) -> f64 {
        self.map.abs_error()
    }

    fn exact_point(a: &[Real]) -> Option<Vec<QuadSurd>> {
        a.iter().map(|x| x.exact_value().cloned()).collect()
    }

    fn input_error(a: &[Real]) -> f64 {
        a.iter().map(Real::error).fold(0.0, f64::max)
    }

    /// `f(α)`, exact when the chart and the point allow it.
    pub fn eval_real(&self, a: &[Real]) -> Vec<Real> {
        if self.exact {
            if let Some(v) = Self::exact_point(a).and_then(|x| self.map.eval_exact(&x)) {
                return v.into_iter().map(Real::exact).collect();
            }
        }
        let af: Vec<f64> = a.iter().map(Real::approx).collect();
        let err = self.abs_error() + self.dbound.approx() * self.d as f64 * Self::input_error(a);
        self.eval_f64(&af)
            .into_iter()
            .map(|v| Real::float_with_error(v, err + v.abs() * f64::EPSILON))
            .collect()
    }

    /// `∇f(α)` row-major `m × d`, exact when possible.
    pub fn jacobian_real(&self, a: &[Real]) -> Vec<Real> {
        if self.exact {
            if let Some(v) = Self::exact_point(a).and_then(|x| self.map.jacobian_exact(&x)) {
                return v.into_iter().map(Real::exact).collect();
            }
        }
        let af: Vec<f64> = a.iter().map(Real::approx).collect();
        let err = self.abs_error() + self.cbound.approx() * self.d as f64 * Self::input_error(a);
        self.jacobian_f64(&af)
            .into_iter()
            .map(|v| Real::float_with_error(v, err + v.abs() * f64::EPSILON))
            .collect()
    }

    /// `f(p/q)` exactly, for exact charts.
    pub fn eval_exact_rational(&self, p: &[i64], q: u64) -> Option<Vec<QuadSurd>> {
        if !self.exact {
            return None;
        }
        let x: Vec<QuadSurd> = p
            .iter()
            .map(|&pi| QuadSurd::rational(Rational::new(pi.into(), q.into())))
            .collect();
        self.map.eval_exact(&x)
    }

    fn check_in_domain(&self, a: &[Real], what: &str) -> Result<()> {
        if a.len() != self.d {
            return Err(Error::InvalidParameter(format!(
                "{what} has {} coordinates, expected d = {}",
                a.len(),
                self.d
            )));
        }
        if !self.domain.contains(a) {
            let shown: Vec<String> = a.iter().map(ToString::to_string).collect();
            return Err(Error::Domain(format!("{what} ({}) is not inside U = {}", shown.join(", "), self.domain)));
        }
        Ok(())
    }

    /// `r`: the largest sup-norm radius of a ball around `α` inside `U`.
    pub fn inradius_at(&self, a: &[Real]) -> Result<Real> {
        self.check_in_domain(a, "alpha")?;
        Ok(self.domain.inradius_at(a))
    }
}

/// `g_j(α) = f_j(α) − Σ_i α_i ∂f_j/∂α_i(α)`.
pub fn eval_g(chart: &ManifoldChart, a: &[Real]) -> Result<Vec<Real>> {
    chart.check_in_domain(a, "alpha")?;
    let f = chart.eval_real(a);
    let jac = chart.jacobian_real(a);
    Ok((0..chart.m)
        .map(|j| {
            (0..chart.d).fold(f[j].clone(), |acc, i| acc.sub(&a[i].mul(&jac[j * chart.d + i])))
        })
        .collect())
}

/// `(C d²/2)·(max_i |α_i − p_i/q|)²`, a bound on every Taylor remainder
/// `|f_j(p/q) − f_j(α) − ∇f_j(α)·(p/q − α)|`.
pub fn taylor_remainder_bound(chart: &ManifoldChart, a: &[Real], pq: &RationalPoint) -> Result<Real> {
    chart.check_in_domain(a, "alpha")?;
    if pq.p.len() < chart.d {
        return Err(Error::InvalidParameter("rational point has fewer than d coordinates".into()));
    }
    let x: Vec<Real> = (0..chart.d).map(|i| Real::rational(pq.coord(i))).collect();
    chart.check_in_domain(&x, "p/q")?;
    let mut delta = Real::integer(0);
    for i in 0..chart.d {
        delta = delta.max(&a[i].sub(&x[i]).abs());
    }
    let dd = (chart.d * chart.d) as i64;
    Ok(chart
        .cbound
        .mul(&Real::ratio(dd, 2))
        .mul(&delta.mul(&delta)))
}

#[cfg(test)]
mod tests;
