//! Ball covers of limsup sets, box counts at dyadic scales and a grid check
//! of the full-measure hypothesis for scaled covers.
//!
//! Box counting here is a finite-resolution proxy for Hausdorff dimension;
//! the fitted slope is an estimate, never a bound.

use std::collections::HashMap;

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::ball::{scale_ball, Ball};
use crate::error::{Error, Result};
use crate::exact::{Rational, Real};
use crate::exponents::critical_exponent;
use crate::manifold::{BoxDomain, ManifoldChart};
use crate::psi::{ApproxFunction, PsiKind};
use crate::rational_points::{enumerate_near, NearPointRecord};

/// Balls `B(p/q, δ^{d/s} q^{-τ-1})` for the records with `q ∈ (q_lo, q_hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandCover {
    pub band: u32,
    pub q_lo: u64,
    pub q_hi: u64,
    pub tau: Rational,
    /// The factor `δ^{d/s}` (1 for unshrunk balls).
    pub shrink: Real,
    pub balls: Vec<Ball>,
}

/// `δ^{d/s} q^{-τ-1}`.
pub fn band_radius(q: u64, tau: &Rational, shrink: &Real) -> Real {
    let e = -(tau + Rational::from_integer(1.into()));
    Real::integer(q as i64).pow_rational(&e).mul(shrink)
}

pub fn build_band_cover(
    records: &[NearPointRecord],
    d: usize,
    tau: &Rational,
    shrink: &Real,
    band: u32,
    q_lo: u64,
    q_hi: u64,
) -> Result<BandCover> {
    if !(shrink.approx() > 0.0 && shrink.approx() - shrink.error() <= 1.0) {
        return Err(Error::InvalidParameter(format!("shrink factor must lie in (0, 1], got {shrink}")));
    }
    let mut balls = Vec::new();
    let mut radius_q = 0;
    let mut radius = Real::integer(0);
    for rec in records.iter().filter(|r| r.point.q > q_lo && r.point.q <= q_hi) {
        if rec.point.p.len() < d {
            return Err(Error::InvalidParameter("record has fewer than d coordinates".into()));
        }
        if rec.point.q != radius_q {
            radius_q = rec.point.q;
            radius = band_radius(radius_q, tau, shrink);
        }
        let center = (0..d).map(|i| Real::rational(rec.point.coord(i))).collect();
        balls.push(Ball::new(center, radius.clone())?);
    }
    Ok(BandCover {
        band,
        q_lo,
        q_hi,
        tau: tau.clone(),
        shrink: shrink.clone(),
        balls,
    })
}

/// `min{1, κ/(dD), κ}^{s/d}` with `κ = inf_q q^τ ψ(q)`: the largest `δ` with
/// `δ^{d/s} d D κ^{-1} ≤ 1` and `δ^{d/s} q^{-τ-1} ≤ ψ(q)/q` for every `q`.
pub fn delta_threshold(chart: &ManifoldChart, psi: &ApproxFunction, tau: &Rational, s: &Rational) -> Result<Real> {
    if !s.is_positive() {
        return Err(Error::InvalidParameter(format!("s must be positive, got {s}")));
    }
    let psi = psi.clone().normalized();
    let kappa = match psi.kind() {
        PsiKind::PowerLaw { tau: t, .. } => {
            if t > tau {
                Real::integer(0)
            } else {
                // q^τ ψ(q) is non-decreasing, so the infimum sits at q = 1
                let v = psi.value(1);
                match v.factors() {
                    [] => Real::integer(1),
                    [(b, e)] if e == &Rational::from_integer(1.into()) => Real::exact(b.clone()),
                    _ => Real::float_with_error(v.to_f64(), v.to_f64() * v.rel_error()),
                }
            }
        }
        PsiKind::Tabulated { .. } => {
            let k = psi.kappa_f64(tau.to_f64().unwrap_or(f64::NAN));
            Real::float_with_error(k, k * 1e-12)
        }
    };
    if kappa.approx() <= 0.0 {
        return Err(Error::HypothesisViolated(format!(
            "kappa = inf q^tau psi(q) = 0 for tau = {tau}; psi decays faster than q^-tau"
        )));
    }
    let mut m = Real::integer(1).min(&kappa);
    let dd = chart.dbound().scale_int(chart.d() as i64);
    if dd.approx() > 0.0 {
        // κ/(dD) as κ · (dD)^{-1}
        let inv = dd.pow_rational(&Rational::from_integer((-1).into()));
        m = m.min(&kappa.mul(&inv));
    }
    Ok(m.pow_rational(&(s / Rational::from_integer(chart.d().into()))))
}

fn as_rat(x: &Real) -> Option<&Rational> {
    x.as_rational()
}

/// Cell index range `[i_min, i_max]` of half-open cells `[lo + i h, lo + (i+1) h)`
/// meeting the open interval `(c − r, c + r)`.
fn cell_range(c: &Real, r: &Real, lo: &Rational, h: &Real) -> (i64, i64) {
    if let (Some(c), Some(r), Some(h)) = (as_rat(c), as_rat(r), as_rat(h)) {
        let a: Rational = (c - r - lo) / h;
        let b: Rational = (c + r - lo) / h;
        let i_min: crate::exact::BigInt = a.floor().to_integer();
        let i_max: crate::exact::BigInt = b.ceil().to_integer() - 1;
        return (
            i_min.to_i64().unwrap_or(i64::MIN),
            i_max.to_i64().unwrap_or(i64::MAX),
        );
    }
    let (cf, rf, hf, lf) = (c.approx(), r.approx(), h.approx(), lo.to_f64().unwrap_or(f64::NAN));
    let a = (cf - rf - lf) / hf;
    let b = (cf + rf - lf) / hf;
    (a.floor() as i64, b.ceil() as i64 - 1)
}

fn cells_per_axis(domain: &BoxDomain, i: usize, h: &Real) -> i64 {
    let width = &domain.upper()[i] - &domain.lower()[i];
    match as_rat(h) {
        Some(hr) => (width / hr).ceil().to_integer().to_i64().unwrap_or(i64::MAX),
        None => (width.to_f64().unwrap_or(f64::NAN) / h.approx()).ceil() as i64,
    }
}

fn merged_len(mut iv: Vec<(i64, i64)>) -> u64 {
    iv.sort_unstable();
    let mut total = 0u64;
    let mut cur: Option<(i64, i64)> = None;
    for (a, b) in iv {
        match cur {
            Some((ca, cb)) if a <= cb + 1 => cur = Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                total += (cb - ca + 1) as u64;
                cur = Some((a, b));
            }
            None => cur = Some((a, b)),
        }
    }
    if let Some((a, b)) = cur {
        total += (b - a + 1) as u64;
    }
    total
}

/// Number of half-open grid cells of side `cell`, anchored at the lower
/// corner of `reference`, that meet the union of the (open, sup-norm) balls.
/// Cells outside `reference` are not counted.
pub fn box_count(balls: &[Ball], cell: &Real, reference: &BoxDomain) -> Result<u64> {
    if cell.approx() <= 0.0 {
        return Err(Error::InvalidParameter(format!("cell side must be positive, got {cell}")));
    }
    let d = reference.dim();
    if let Some(b) = balls.iter().find(|b| b.dim() != d) {
        return Err(Error::InvalidParameter(format!(
            "ball of dimension {} in a {d}-dimensional box",
            b.dim()
        )));
    }
    let limits: Vec<i64> = (0..d).map(|i| cells_per_axis(reference, i, cell)).collect();
    let ranges: Vec<Vec<(i64, i64)>> = balls
        .par_iter()
        .map(|b| {
            (0..d)
                .map(|i| {
                    let (lo, hi) = cell_range(&b.center[i], &b.radius, &reference.lower()[i], cell);
                    (lo.max(0), hi.min(limits[i] - 1))
                })
                .collect()
        })
        .collect();
    let live = ranges.into_iter().filter(|r| r.iter().all(|(a, b)| a <= b));
    if d == 1 {
        return Ok(merged_len(live.map(|r| r[0]).collect()));
    }
    // rows keyed by the first d − 1 cell indices, intervals along the last axis
    let mut rows: HashMap<Vec<i64>, Vec<(i64, i64)>> = HashMap::new();
    for r in live {
        let heads: Vec<Vec<i64>> = r[..d - 1].iter().map(|&(a, b)| (a..=b).collect()).collect();
        for key in crate::point::cartesian(&heads) {
            rows.entry(key).or_default().push(r[d - 1]);
        }
    }
    Ok(rows.into_par_iter().map(|(_, iv)| merged_len(iv)).sum())
}

/// Least-squares line through `(x_k, y_k)`: slope and its standard error.
pub fn fit_ladder(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = points.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("{n} points; at least 3 are needed for a slope with error")));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData("all scales coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = (rss / (nf - 2.0) / sxx).sqrt();
    Ok((slope, stderr))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderRow {
    pub band: u32,
    /// `Q_k = 2^k`.
    pub q_hi: u64,
    /// `δ_k = Q_k^{-τ-1}`.
    pub delta: f64,
    pub count: u64,
    pub balls: usize,
}

impl LadderRow {
    pub fn log_count(&self) -> f64 {
        (self.count as f64).ln()
    }

    pub fn log_inv_delta(&self) -> f64 {
        -self.delta.ln()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionEstimate {
    pub ladder: Vec<LadderRow>,
    /// Bands that entered the fit.
    pub fitted: Vec<u32>,
    pub slope: f64,
    pub stderr: f64,
    /// `(n+1)/(τ+1) − m`.
    pub target: Rational,
}

/// Rejects `τ` outside `[1/n, 1/m)`.
pub fn check_tau_range(chart: &ManifoldChart, tau: &Rational) -> Result<()> {
    let n = Rational::from_integer(chart.n().into());
    let m = Rational::from_integer(chart.m().into());
    let one = Rational::from_integer(1.into());
    if tau < &(&one / &n) || tau >= &(&one / &m) {
        return Err(Error::InvalidParameter(format!(
            "tau = {tau} must satisfy 1/n <= tau < 1/m, i.e. {} <= tau < {} for n = {}, m = {}",
            &one / &n,
            &one / &m,
            chart.n(),
            chart.m()
        )));
    }
    Ok(())
}

/// Number of leading bands left out of every fit.
pub const TRANSIENT_BANDS: u32 = 2;

/// Enumerates near-points with `ψ(q) = q^{-τ}` up to `2^max_band`, counts
/// `δ_k`-cells met by the balls `B(p/q, q^{-τ-1})` of each dyadic band
/// `(2^{k-1}, 2^k]` and fits `log N_k` against `log(1/δ_k)` over the last
/// `fit_bands` usable bands (the first two bands are always skipped).
pub fn estimate_dimension(chart: &ManifoldChart, tau: &Rational, max_band: u32, fit_bands: u32) -> Result<DimensionEstimate> {
    check_tau_range(chart, tau)?;
    if !(1..=40).contains(&max_band) {
        return Err(Error::InvalidParameter(format!("max band must lie in 1..=40, got {max_band}")));
    }
    let target = critical_exponent(chart.n() as u32, chart.m() as u32, tau)?;
    let psi = ApproxFunction::inverse_power(tau.clone())?;
    let qmax = 1u64 << max_band;
    let near = enumerate_near(chart, &psi, qmax, false)?;
    let one = Real::integer(1);
    let d = chart.d();
    let ladder: Vec<LadderRow> = (1..=max_band)
        .into_par_iter()
        .map(|k| {
            let (q_lo, q_hi) = (1u64 << (k - 1), 1u64 << k);
            let start = near.records.partition_point(|r| r.point.q <= q_lo);
            let end = near.records.partition_point(|r| r.point.q <= q_hi);
            let cover = build_band_cover(&near.records[start..end], d, tau, &one, k, q_lo, q_hi)?;
            let delta = band_radius(q_hi, tau, &one);
            let count = box_count(&cover.balls, &delta, chart.domain())?;
            Ok(LadderRow {
                band: k,
                q_hi,
                delta: delta.approx(),
                count,
                balls: cover.balls.len(),
            })
        })
        .collect::<Result<_>>()?;
    let usable: Vec<&LadderRow> = ladder.iter().filter(|r| r.band > TRANSIENT_BANDS && r.count >= 1).collect();
    let take = usable.len().min(fit_bands as usize);
    let chosen = &usable[usable.len() - take..];
    if chosen.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} usable bands after dropping the first {TRANSIENT_BANDS}; need at least 3 (raise --bands)",
            chosen.len()
        )));
    }
    let pts: Vec<(f64, f64)> = chosen.iter().map(|r| (r.log_inv_delta(), r.log_count())).collect();
    let (slope, stderr) = fit_ladder(&pts)?;
    Ok(DimensionEstimate {
        fitted: chosen.iter().map(|r| r.band).collect(),
        ladder,
        slope,
        stderr,
        target,
    })
}

/// The level-`j` middle-thirds intervals as open balls, counted with cells
/// of side `3^{-j}`. A calibration ladder with exact slope `log 2 / log 3`.
pub fn middle_thirds_ladder(levels: u32) -> Result<Vec<(f64, f64)>> {
    let unit = BoxDomain::unit(1);
    let mut out = Vec::with_capacity(levels as usize);
    let mut lefts = vec![Rational::zero()];
    for j in 1..=levels {
        let len = Rational::new(1.into(), 3u64.pow(j).into());
        lefts = lefts
            .iter()
            .flat_map(|a| [a.clone(), a + &len * Rational::from_integer(2.into())])
            .collect();
        let half = &len / Rational::from_integer(2.into());
        let balls: Vec<Ball> = lefts
            .iter()
            .map(|a| Ball::new(vec![Real::rational(a + &half)], Real::rational(half.clone())))
            .collect::<Result<_>>()?;
        let n = box_count(&balls, &Real::rational(len.clone()), &unit)?;
        out.push(((3f64).powi(j as i32).ln(), (n as f64).ln()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MtpRow {
    pub band: u32,
    pub q_hi: u64,
    /// Fraction of grid points inside some scaled ball of this band.
    pub fraction: f64,
    /// Same, for the union of all bands so far.
    pub cumulative: f64,
}

/// Marks grid points `lo + (i + ½)h` lying strictly inside a ball.
fn mark_ball(ball: &Ball, domain: &BoxDomain, grid_n: usize, bits: &mut [u64]) {
    let d = domain.dim();
    let mut ranges = Vec::with_capacity(d);
    for i in 0..d {
        let lo = domain.lower_f64(i);
        let h = (domain.upper_f64(i) - lo) / grid_n as f64;
        let c = ball.center[i].approx();
        let r = ball.radius.approx();
        // lo + (k + ½)h ∈ (c − r, c + r)
        let a = ((c - r - lo) / h - 0.5).floor() as i64 + 1;
        let b = ((c + r - lo) / h - 0.5).ceil() as i64 - 1;
        let a = a.max(0);
        let b = b.min(grid_n as i64 - 1);
        if a > b {
            return;
        }
        ranges.push((a as usize, b as usize));
    }
    let mut idx = vec![0usize; d];
    for i in 0..d {
        idx[i] = ranges[i].0;
    }
    loop {
        let mut flat = 0usize;
        for &k in &idx {
            flat = flat * grid_n + k;
        }
        bits[flat / 64] |= 1 << (flat % 64);
        let mut axis = d;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if idx[axis] < ranges[axis].1 {
                idx[axis] += 1;
                for l in axis + 1..d {
                    idx[l] = ranges[l].0;
                }
                break;
            }
        }
    }
}

fn popcount(bits: &[u64]) -> u64 {
    bits.iter().map(|w| w.count_ones() as u64).sum()
}

/// Grid check of the full-measure hypothesis: for each dyadic band up to
/// `2^max_band`, the fraction of the `grid_n^d` cell centres of the chart
/// domain lying in some ball `B(p/q, q^{-τ-1})^s` (radius raised to `s/d`).
pub fn mtp_hypothesis_check(
    chart: &ManifoldChart,
    tau: &Rational,
    s: &Rational,
    grid_n: usize,
    max_band: u32,
) -> Result<Vec<MtpRow>> {
    let d = chart.d();
    if !s.is_positive() || s > &Rational::from_integer(d.into()) {
        return Err(Error::InvalidParameter(format!("s = {s} must lie in (0, d] with d = {d}")));
    }
    if grid_n == 0 || (grid_n as f64).powi(d as i32) > 1e9 {
        return Err(Error::InvalidParameter(format!("grid of {grid_n}^{d} points is empty or too large")));
    }
    if !(1..=40).contains(&max_band) {
        return Err(Error::InvalidParameter(format!("max band must lie in 1..=40, got {max_band}")));
    }
    let psi = ApproxFunction::inverse_power(tau.clone())?;
    let near = enumerate_near(chart, &psi, 1u64 << max_band, false)?;
    let total = grid_n.pow(d as u32);
    let words = total.div_ceil(64);
    let one = Real::integer(1);
    let per_band: Vec<Vec<u64>> = (1..=max_band)
        .into_par_iter()
        .map(|k| {
            let (q_lo, q_hi) = (1u64 << (k - 1), 1u64 << k);
            let start = near.records.partition_point(|r| r.point.q <= q_lo);
            let end = near.records.partition_point(|r| r.point.q <= q_hi);
            let cover = build_band_cover(&near.records[start..end], d, tau, &one, k, q_lo, q_hi)?;
            let mut bits = vec![0u64; words];
            for b in &cover.balls {
                mark_ball(&scale_ball(b, s, d)?, chart.domain(), grid_n, &mut bits);
            }
            Ok(bits)
        })
        .collect::<Result<_>>()?;
    let mut acc = vec![0u64; words];
    let mut rows = Vec::with_capacity(per_band.len());
    for (k, bits) in per_band.into_iter().enumerate() {
        for (a, b) in acc.iter_mut().zip(&bits) {
            *a |= b;
        }
        let band = k as u32 + 1;
        rows.push(MtpRow {
            band,
            q_hi: 1u64 << band,
            fraction: popcount(&bits) as f64 / total as f64,
            cumulative: popcount(&acc) as f64 / total as f64,
        });
    }
    Ok(rows)
}
