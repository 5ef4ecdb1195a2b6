//! Deterministic CSV tables for every pipeline result.
//!
//! Exact rationals are written as `a/b` (zero is `0/1`), other numbers as
//! the shortest decimal that round-trips to the same `f64`.

use std::io::Write;
use std::path::Path;

use crate::dirichlet::DirichletSolution;
use crate::error::{Error, Result};
use crate::exact::{format_rational, Rational, Real};
use crate::exponents::ExponentBundle;
use crate::limsup::{DimensionEstimate, MtpRow};
use crate::rational_points::{CounterexampleReport, DenominatorSet, NearPoints};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        CsvTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::InvalidParameter(format!(
                "row has {} fields, header has {}",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            out.write_record(row).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("fields are UTF-8")
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Shortest round-trip decimal, never in exponent form.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

pub fn fmt_rational(r: &Rational) -> String {
    format_rational(r)
}

pub fn fmt_real(x: &Real) -> String {
    match x.as_rational() {
        Some(r) => format_rational(r),
        None => fmt_f64(x.approx()),
    }
}

fn p_columns(n: usize) -> impl Iterator<Item = String> {
    (1..=n).map(|i| format!("p_{i}"))
}

/// `Q,q,p_1..p_n,res_v44_max,res_v45_max,certified`
pub fn dirichlet_table(n: usize, sols: &[DirichletSolution]) -> Result<CsvTable> {
    let mut t = CsvTable::new(
        ["Q".to_string(), "q".to_string()]
            .into_iter()
            .chain(p_columns(n))
            .chain(["res_v44_max".to_string(), "res_v45_max".to_string(), "certified".to_string()]),
    );
    for s in sols {
        let mut row = vec![s.q_budget.to_string(), s.point.q.to_string()];
        row.extend(s.point.p.iter().map(|p| p.to_string()));
        row.push(fmt_real(&s.v44_max()));
        row.push(fmt_real(&s.v45_max()));
        row.push(s.certified.to_string());
        t.push(row)?;
    }
    Ok(t)
}

/// `q,p_1..p_n,residual`, in q-then-p order.
pub fn near_points_table(n: usize, near: &NearPoints) -> Result<CsvTable> {
    let mut t = CsvTable::new(
        std::iter::once("q".to_string())
            .chain(p_columns(n))
            .chain(std::iter::once("residual".to_string())),
    );
    let mut recs: Vec<_> = near.records.iter().collect();
    recs.sort_by(|a, b| (a.point.q, &a.point.p).cmp(&(b.point.q, &b.point.p)));
    for r in recs {
        let mut row = vec![r.point.q.to_string()];
        row.extend(r.point.p.iter().map(|p| p.to_string()));
        row.push(fmt_real(&r.residual));
        t.push(row)?;
    }
    Ok(t)
}

/// `q,N_cumulative`
pub fn counts_table(near: &NearPoints) -> Result<CsvTable> {
    let mut t = CsvTable::new(["q", "N_cumulative"]);
    for (i, n) in near.counts.iter().enumerate() {
        t.push(vec![(i + 1).to_string(), n.to_string()])?;
    }
    Ok(t)
}

/// `q,status` with status `member` or `undecided`.
pub fn bset_table(set: &DenominatorSet) -> Result<CsvTable> {
    let mut rows: Vec<(u64, &str)> = set.members.iter().map(|&q| (q, "member")).collect();
    rows.extend(set.undecided.iter().map(|&q| (q, "undecided")));
    rows.sort();
    let mut t = CsvTable::new(["q", "status"]);
    for (q, s) in rows {
        t.push(vec![q.to_string(), s.to_string()])?;
    }
    Ok(t)
}

/// A single summary row.
pub fn counterexample_table(rep: &CounterexampleReport) -> Result<CsvTable> {
    let c = &rep.constant;
    let mut t = CsvTable::new([
        "c0",
        "argmin_q",
        "tail_lo",
        "tail_hi",
        "full_min",
        "full_argmin_q",
        "exact",
        "members",
        "undecided",
    ]);
    t.push(vec![
        fmt_f64(c.c0_f64()),
        c.argmin_q.to_string(),
        c.tail.0.to_string(),
        c.tail.1.to_string(),
        fmt_f64(c.full_min),
        c.full_argmin_q.to_string(),
        c.exact.to_string(),
        rep.members.len().to_string(),
        rep.undecided.len().to_string(),
    ])?;
    Ok(t)
}

/// `band,Q,delta,N,logN,log_inv_delta` plus a closing
/// `slope,<v>,stderr,<v>,target_s,<v>` row.
pub fn dimension_table(est: &DimensionEstimate) -> Result<CsvTable> {
    let mut t = CsvTable::new(["band", "Q", "delta", "N", "logN", "log_inv_delta"]);
    for row in &est.ladder {
        t.push(vec![
            row.band.to_string(),
            row.q_hi.to_string(),
            fmt_f64(row.delta),
            row.count.to_string(),
            fmt_f64(row.log_count()),
            fmt_f64(row.log_inv_delta()),
        ])?;
    }
    t.push(vec![
        "slope".into(),
        fmt_f64(est.slope),
        "stderr".into(),
        fmt_f64(est.stderr),
        "target_s".into(),
        fmt_rational(&est.target),
    ])?;
    Ok(t)
}

/// `band,Q,fraction,cumulative`
pub fn mtp_table(rows: &[MtpRow]) -> Result<CsvTable> {
    let mut t = CsvTable::new(["band", "Q", "fraction", "cumulative"]);
    for r in rows {
        t.push(vec![r.band.to_string(), r.q_hi.to_string(), fmt_f64(r.fraction), fmt_f64(r.cumulative)])?;
    }
    Ok(t)
}

/// `n,m,d,tau,s,eta,jarnik_boundary,in_open_range`
pub fn exponents_table(b: &ExponentBundle) -> Result<CsvTable> {
    let mut t = CsvTable::new(["n", "m", "d", "tau", "s", "eta", "jarnik_boundary", "in_open_range"]);
    t.push(vec![
        b.n.to_string(),
        b.m.to_string(),
        b.d.to_string(),
        fmt_rational(&b.tau),
        fmt_rational(&b.s),
        fmt_rational(&b.eta.eta),
        fmt_rational(&jarnik_boundary(b.n, &b.tau)),
        b.in_open_range().to_string(),
    ])?;
    Ok(t)
}

/// `(n+1)/(τ+1)`: the `s` at which the Jarník series for `q^{−τ}` flips.
pub fn jarnik_boundary(n: u32, tau: &Rational) -> Rational {
    Rational::from_integer((n + 1).into()) / (tau + Rational::from_integer(1.into()))
}
