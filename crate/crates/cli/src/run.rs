use std::path::{Path, PathBuf};
use std::time::Instant;

use dapprox::exact::{format_rational, parse_rational, set_precision_bits, Rational, Real};
use dapprox::output::{self, fmt_f64, CsvTable};
use dapprox::{
    admissible_q_set, bset_range, bset_tau, cor2_stream, counterexample_check, dirichlet_search, enumerate_near,
    estimate_dimension, eta_exponent, kronecker_point, mtp_hypothesis_check, parse_chart, ApproxFunction, BoxDomain,
    Error, ExponentBundle, ManifoldChart, Result,
};

use crate::args::*;

/// Everything a run produced, before it is written out.
struct Outcome {
    tables: Vec<(Option<&'static str>, CsvTable)>,
    notes: Vec<String>,
}

impl Outcome {
    fn one(t: CsvTable) -> Self {
        Outcome {
            tables: vec![(None, t)],
            notes: Vec::new(),
        }
    }
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    set_precision_bits(cli.precision_bits);
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidParameter("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("cannot size worker pool: {e}")))?;
    }
    let start = Instant::now();
    let outcome = match &cli.cmd {
        Cmd::Dirichlet(a) => dirichlet(a, cli.seed)?,
        Cmd::Cor2(a) => cor2(a, cli.seed)?,
        Cmd::Enumerate(a) => enumerate(a)?,
        Cmd::Bset(a) => bset(a)?,
        Cmd::Counterexample(a) => counterexample(a)?,
        Cmd::Dimension(a) => dimension(a)?,
        Cmd::MtpCheck(a) => mtp(a)?,
        Cmd::Exponents(a) => exponents(a, cli.out.is_some())?,
    };
    let wall = start.elapsed().as_secs_f64();
    for n in &outcome.notes {
        eprintln!("{n}");
    }
    match &cli.out {
        Some(path) => {
            for (suffix, t) in &outcome.tables {
                t.write_file(&artifact_path(path, *suffix))?;
            }
            write_manifest(cli, path, &outcome, wall)?;
        }
        None => {
            if let Some((_, t)) = outcome.tables.first() {
                print!("{}", t.to_csv_string());
            }
        }
    }
    Ok(())
}

fn artifact_path(out: &Path, suffix: Option<&str>) -> PathBuf {
    match suffix {
        None => out.to_path_buf(),
        Some(s) => out.with_extension(format!("{s}.csv")),
    }
}

fn write_manifest(cli: &Cli, out: &Path, outcome: &Outcome, wall: f64) -> Result<()> {
    let mut text = String::new();
    text.push_str(&format!("command = {}\n", cli.cmd.name()));
    if let Some(t) = cli.threads {
        text.push_str(&format!("threads = {t}\n"));
    }
    text.push_str(&format!("precision-bits = {}\n", cli.precision_bits));
    text.push_str(&format!("seed = {}\n", cli.seed));
    for (k, v) in entries(&cli.cmd) {
        text.push_str(&format!("{k} = {v}\n"));
    }
    text.push_str(&format!("# version = {}\n", dapprox::VERSION));
    text.push_str(&format!("# wall_time_s = {wall:.3}\n"));
    for (suffix, _) in &outcome.tables {
        text.push_str(&format!("# artifact = {}\n", artifact_path(out, *suffix).display()));
    }
    for n in &outcome.notes {
        text.push_str(&format!("# note = {n}\n"));
    }
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest");
    std::fs::write(PathBuf::from(name), text)?;
    Ok(())
}

/// Effective parameters as config entries, so a manifest can be fed back
/// through `--config`.
fn entries(cmd: &Cmd) -> Vec<(&'static str, String)> {
    fn chart(c: &ChartArgs, v: &mut Vec<(&'static str, String)>) {
        v.push(("chart", c.chart.clone()));
        if let Some(d) = &c.domain {
            v.push(("domain", d.clone()));
        }
    }
    let mut v = Vec::new();
    match cmd {
        Cmd::Dirichlet(a) => {
            chart(&a.chart, &mut v);
            if let Some(x) = &a.alpha {
                v.push(("alpha", x.clone()));
            }
            v.push(("psi", a.psi.clone()));
            if let Some(q) = a.q_budget {
                v.push(("Q", q.to_string()));
            }
            v.push(("samples", a.samples.to_string()));
            v.push(("q-count", a.q_count.to_string()));
            v.push(("qcap", a.qcap.to_string()));
        }
        Cmd::Cor2(a) => {
            chart(&a.chart, &mut v);
            if let Some(x) = &a.alpha {
                v.push(("alpha", x.clone()));
            }
            if let Some(x) = &a.psi {
                v.push(("psi", x.clone()));
            }
            v.push(("tau", a.tau.clone()));
            v.push(("kappa", a.kappa.clone()));
            v.push(("count", a.count.to_string()));
            v.push(("qcap", a.qcap.to_string()));
        }
        Cmd::Enumerate(a) => {
            chart(&a.chart, &mut v);
            v.push(("psi", a.psi.clone()));
            v.push(("qmax", a.qmax.to_string()));
            v.push(("reduced", a.reduced.to_string()));
        }
        Cmd::Bset(a) => {
            v.push(("beta", a.beta.clone()));
            if let Some(x) = &a.tau {
                v.push(("tau", x.clone()));
            }
            if let Some(x) = &a.psi {
                v.push(("psi", x.clone()));
            }
            v.push(("qmax", a.qmax.to_string()));
        }
        Cmd::Counterexample(a) => {
            v.push(("beta", a.beta.clone()));
            v.push(("qmax", a.qmax.to_string()));
        }
        Cmd::Dimension(a) => {
            chart(&a.chart, &mut v);
            v.push(("tau", a.tau.clone()));
            v.push(("bands", a.bands.to_string()));
            v.push(("fit-bands", a.fit_bands.to_string()));
        }
        Cmd::MtpCheck(a) => {
            chart(&a.chart, &mut v);
            v.push(("tau", a.tau.clone()));
            if let Some(s) = &a.s {
                v.push(("s", s.clone()));
            }
            v.push(("grid", a.grid.to_string()));
            v.push(("bands", a.bands.to_string()));
        }
        Cmd::Exponents(a) => {
            v.push(("n", a.n.to_string()));
            v.push(("m", a.m.to_string()));
            v.push(("tau", a.tau.clone()));
        }
    }
    v
}

fn load_chart(c: &ChartArgs) -> Result<ManifoldChart> {
    let domain = c.domain.as_deref().map(BoxDomain::parse).transpose()?;
    parse_chart(&c.chart, domain)
}

fn parse_reals(s: &str) -> Result<Vec<Real>> {
    s.split(',').map(Real::parse).collect()
}

fn parse_alpha(chart: &ManifoldChart, s: &str) -> Result<Vec<Real>> {
    let a = parse_reals(s)?;
    if a.len() != chart.d() {
        return Err(Error::InvalidParameter(format!(
            "alpha has {} coordinates, chart {} needs {}",
            a.len(),
            chart.name(),
            chart.d()
        )));
    }
    Ok(a)
}

fn alpha_string(a: &[Real]) -> String {
    a.iter().map(|x| fmt_f64(x.approx())).collect::<Vec<_>>().join(",")
}

fn dirichlet(a: &DirichletArgs, seed: u64) -> Result<Outcome> {
    let chart = load_chart(&a.chart)?;
    let psi = ApproxFunction::parse(&a.psi)?;
    if a.samples == 0 || a.q_count == 0 {
        return Err(Error::InvalidParameter("--samples and --q-count must be positive".into()));
    }
    let alphas = match &a.alpha {
        Some(s) if a.samples > 1 => {
            return Err(Error::InvalidParameter(format!(
                "--samples {} needs seeded α; drop --alpha {s}",
                a.samples
            )))
        }
        Some(s) => vec![parse_alpha(&chart, s)?],
        None => (0..a.samples as u64)
            .map(|k| kronecker_point(chart.domain(), seed, k))
            .collect::<Result<_>>()?,
    };
    let mut sols = Vec::new();
    let mut sample_ids = Vec::new();
    let mut notes = Vec::new();
    for (k, alpha) in alphas.iter().enumerate() {
        let budgets = match a.q_budget {
            Some(q) => vec![q],
            None => admissible_q_set(&chart, alpha, &psi, a.q_count, a.qcap)?,
        };
        for q in budgets {
            let s = dirichlet_search(&chart, alpha, &psi, q)?;
            if !s.certified {
                notes.push(format!("sample {k} Q={q}: bounds undecided at this precision"));
            }
            sols.push(s);
            sample_ids.push(k);
        }
    }
    let t = output::dirichlet_table(chart.n(), &sols)?;
    let t = if a.alpha.is_none() {
        let mut with = CsvTable::new(std::iter::once("sample".to_string()).chain(t.header().iter().cloned()));
        for (k, row) in sample_ids.iter().zip(t.rows()) {
            with.push(std::iter::once(k.to_string()).chain(row.iter().cloned()).collect())?;
        }
        with
    } else {
        t
    };
    notes.push(format!("{} solutions over {} alpha values", sols.len(), alphas.len()));
    Ok(Outcome {
        tables: vec![(None, t)],
        notes,
    })
}

fn cor2(a: &Cor2Args, seed: u64) -> Result<Outcome> {
    let chart = load_chart(&a.chart)?;
    let tau = parse_rational(&a.tau)?;
    let kappa = parse_rational(&a.kappa)?;
    let psi = match &a.psi {
        Some(p) => ApproxFunction::parse(p)?,
        None => ApproxFunction::power_law(kappa.clone(), tau.clone())?,
    };
    let mut notes = Vec::new();
    let given = a.alpha.as_deref().map(|s| parse_alpha(&chart, s)).transpose()?;
    let alpha = match given {
        Some(x) if x.iter().any(Real::is_irrational) => x,
        other => {
            let sub = kronecker_point(chart.domain(), seed, 0)?;
            if other.is_some() {
                notes.push(format!("alpha is rational; substituted seeded sample {}", alpha_string(&sub)));
            } else {
                notes.push(format!("using seeded alpha {}", alpha_string(&sub)));
            }
            sub
        }
    };
    let sols = cor2_stream(&chart, &alpha, &psi, &tau, &kappa, a.count, a.qcap)?;
    Ok(Outcome {
        tables: vec![(None, output::dirichlet_table(chart.n(), &sols)?)],
        notes,
    })
}

fn enumerate(a: &EnumerateArgs) -> Result<Outcome> {
    let chart = load_chart(&a.chart)?;
    let psi = ApproxFunction::parse(&a.psi)?;
    let near = enumerate_near(&chart, &psi, a.qmax, a.reduced)?;
    let mut notes = vec![format!("{} records up to q = {}", near.records.len(), a.qmax)];
    if !near.undecided.is_empty() {
        notes.push(format!("undecided denominators: {:?}", near.undecided));
    }
    Ok(Outcome {
        tables: vec![
            (None, output::near_points_table(chart.n(), &near)?),
            (Some("counts"), output::counts_table(&near)?),
        ],
        notes,
    })
}

fn bset(a: &BsetArgs) -> Result<Outcome> {
    let beta = parse_reals(&a.beta)?;
    let set = match (&a.tau, &a.psi) {
        (Some(t), _) => bset_tau(&beta, &parse_rational(t)?, a.qmax)?,
        (None, Some(p)) => bset_range(&beta, &ApproxFunction::parse(p)?, 1, a.qmax)?,
        (None, None) => unreachable!("clap requires --tau or --psi"),
    };
    let mut out = Outcome::one(output::bset_table(&set)?);
    out.notes.push(format!("{} members, {} undecided", set.members.len(), set.undecided.len()));
    Ok(out)
}

fn counterexample(a: &CounterexampleArgs) -> Result<Outcome> {
    let beta = parse_reals(&a.beta)?;
    let rep = counterexample_check(&beta, a.qmax)?;
    let mut out = Outcome::one(output::counterexample_table(&rep)?);
    out.notes.push(format!(
        "c0 = {} at q = {}; set empty up to {}",
        fmt_f64(rep.constant.c0_f64()),
        rep.constant.argmin_q,
        a.qmax
    ));
    out.notes.push(rep.caveat.clone());
    Ok(out)
}

fn dimension(a: &DimensionArgs) -> Result<Outcome> {
    let chart = load_chart(&a.chart)?;
    let tau = parse_rational(&a.tau)?;
    let est = estimate_dimension(&chart, &tau, a.bands, a.fit_bands)?;
    let mut out = Outcome::one(output::dimension_table(&est)?);
    out.notes.push(format!(
        "slope = {} ± {} over bands {:?}; target s = {}",
        fmt_f64(est.slope),
        fmt_f64(est.stderr),
        est.fitted,
        format_rational(&est.target)
    ));
    Ok(out)
}

fn mtp(a: &MtpArgs) -> Result<Outcome> {
    let chart = load_chart(&a.chart)?;
    let tau = parse_rational(&a.tau)?;
    dapprox::check_tau_range(&chart, &tau)?;
    let s = match &a.s {
        Some(s) => parse_rational(s)?,
        None => {
            let d = Rational::from_integer(chart.d().into());
            let one = Rational::from_integer(1.into());
            let eta = eta_exponent(chart.d() as u32, chart.m() as u32, &tau).eta;
            (eta + &one) * d / (&tau + &one)
        }
    };
    let rows = mtp_hypothesis_check(&chart, &tau, &s, a.grid, a.bands)?;
    let mut out = Outcome::one(output::mtp_table(&rows)?);
    if let Some(last) = rows.last() {
        out.notes.push(format!(
            "s = {}; cumulative covered fraction {}",
            format_rational(&s),
            fmt_f64(last.cumulative)
        ));
    }
    Ok(out)
}

fn exponents(a: &ExponentsArgs, to_file: bool) -> Result<Outcome> {
    let tau = parse_rational(&a.tau)?;
    let b = ExponentBundle::new(a.n, a.m, tau)?;
    let boundary = output::jarnik_boundary(b.n, &b.tau);
    let f = |r: &Rational| fmt_f64(num_to_f64(r));
    println!(
        "s={} eta={} jarnik_boundary={}{}",
        f(&b.s),
        f(&b.eta.eta),
        f(&boundary),
        if b.in_open_range() { "" } else { " (tau outside (1/n, 1/m))" }
    );
    let tables = if to_file {
        vec![(None, output::exponents_table(&b)?)]
    } else {
        Vec::new()
    };
    Ok(Outcome {
        tables,
        notes: Vec::new(),
    })
}

fn num_to_f64(r: &Rational) -> f64 {
    Real::rational(r.clone()).approx()
}

pub fn exit_code(e: &Error) -> u8 {
    if e.is_internal() {
        3
    } else if e.is_hypothesis() {
        2
    } else {
        1
    }
}
