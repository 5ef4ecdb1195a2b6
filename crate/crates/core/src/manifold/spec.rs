use super::{make_parabola, make_plane, make_sphere, make_veronese, BoxDomain, ManifoldChart};
use crate::error::{Error, Result};
use crate::exact::{Rational, Real};

/// Parses `plane:<β₁,…,β_m>[@d]`, `parabola`, `veronese:<n>` or `sphere`.
///
/// Default domains: `(0,1)^d` for planes, `(0,1)` for the curves and
/// `(−1/2, 1/2)²` for the sphere. `domain` overrides the default.
pub fn parse_chart(spec: &str, domain: Option<BoxDomain>) -> Result<ManifoldChart> {
    let s = spec.trim();
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (s, None),
    };
    match (head, arg) {
        ("plane", Some(arg)) => {
            let (list, d) = match arg.rsplit_once('@') {
                Some((l, d)) => (
                    l,
                    d.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::parse("chart", spec, "bad dimension after @"))?,
                ),
                None => (arg, 1),
            };
            let beta = list.split(',').map(Real::parse).collect::<Result<Vec<_>>>()?;
            make_plane(beta, d, domain.unwrap_or_else(|| BoxDomain::unit(d)))
        }
        ("parabola", None) => make_parabola(domain.unwrap_or_else(|| BoxDomain::unit(1))),
        ("veronese", Some(n)) => {
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| Error::parse("chart", spec, "veronese needs an integer n"))?;
            make_veronese(n, domain.unwrap_or_else(|| BoxDomain::unit(1)))
        }
        ("sphere", None) => {
            let half = Rational::new(1.into(), 2.into());
            make_sphere(domain.unwrap_or_else(|| BoxDomain::cube(2, -half.clone(), half)))
        }
        _ => Err(Error::parse(
            "chart",
            spec,
            "expected plane:<b1,...>[@d], parabola, veronese:<n> or sphere",
        )),
    }
}
