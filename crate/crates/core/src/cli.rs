//! Command-line front end. [`run`] takes the argument list and output
//! streams and returns the process exit status, so the binary stays a
//! one-liner and everything here is testable in-process.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analytic::ConditionalState;
use crate::error::{Error, Result};
use crate::gridscan::{
    self, Cell, Format, GridObservable, GridSpec, QMapSpec, SweepObservable, SweepSpec, SweepVariable, Table,
    ValidationConfig,
};
use crate::oracle::TruncationPolicy;
use crate::params::ModelParams;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ZERO_PROBABILITY: i32 = 2;
pub const EXIT_VALIDATION_FAILED: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "HESVS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hesvs", version, about = "Heralded Hermite-excited squeezed vacuum: probabilities, statistics and phase-space maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Heralding probability p(m) for each requested m
    Prob(PointArgs),
    /// Photon-number distribution P(n|m)
    Pnd {
        #[command(flatten)]
        point: PointArgs,
        /// Single photon number to report
        #[arg(long)]
        n: Option<usize>,
        /// Largest photon number when --n is not given
        #[arg(long, default_value_t = 20)]
        n_top: usize,
    },
    /// Mean photon number, Mandel Q and optionally <a^k a†^l>
    Moments {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, requires = "l")]
        k: Option<usize>,
        #[arg(long, requires = "k")]
        l: Option<usize>,
    },
    /// Homodyne density P(x, phi|m) over an (x, phi) grid
    Quad(GridArgs),
    /// Wigner function W(x, p|m), normalized so that W(0,0) = ±2/pi
    Wigner(GridArgs),
    /// Husimi function Q(x, p|m)
    Husimi(GridArgs),
    /// One-parameter sweep of p(m), <n> or Mandel Q
    Sweep {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value_t = VariableArg::R)]
        variable: VariableArg,
        #[arg(long, value_enum, default_value_t = ObservableArg::PEvent)]
        observable: ObservableArg,
        /// Sweep range as lo,hi (default: r in [0, 3] or theta in [0, pi/2])
        #[arg(long, value_parser = parse_span, allow_hyphen_values = true)]
        range: Option<Span>,
        #[arg(long, default_value_t = 301)]
        points: usize,
    },
    /// Mandel Q over the (theta, r) plane for contouring
    Qmap {
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3, 4])]
        m: Vec<usize>,
        /// lo,hi [default: 0,pi/2]
        #[arg(long, value_parser = parse_span, allow_hyphen_values = true)]
        theta_range: Option<Span>,
        /// lo,hi [default: 0,2]
        #[arg(long, value_parser = parse_span, allow_hyphen_values = true)]
        r_range: Option<Span>,
        #[arg(long, default_value_t = 91)]
        theta_points: usize,
        #[arg(long, default_value_t = 81)]
        r_points: usize,
    },
    /// Cross-check every closed form against the Fock-basis oracle
    Validate {
        #[command(flatten)]
        out: OutputArgs,
        /// Tolerance override NAME=VALUE, repeatable
        #[arg(long = "tol", value_parser = parse_tolerance)]
        tolerances: Vec<(String, f64)>,
        /// Oracle Schmidt cutoff (raised automatically if too small)
        #[arg(long)]
        n_max: Option<usize>,
        /// Multiply B1 by this factor before evaluating closed forms
        #[arg(long)]
        fault_b1: Option<f64>,
        /// Run the integral checks on every parameter set
        #[arg(long)]
        exhaustive: bool,
    },
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write to this file (atomically) instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct PointArgs {
    /// Beam-splitter angle in radians
    #[arg(long, conflicts_with = "theta_frac", allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Beam-splitter angle as a fraction of pi, e.g. 2/7
    #[arg(long, value_parser = parse_fraction)]
    theta_frac: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    /// Heralded photon counts, comma separated
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
struct GridArgs {
    #[command(flatten)]
    point: PointArgs,
    /// lo,hi
    #[arg(long, value_parser = parse_span, allow_hyphen_values = true)]
    x_range: Option<Span>,
    /// p range, or phi range for `quad`, as lo,hi
    #[arg(long, value_parser = parse_span, allow_hyphen_values = true)]
    y_range: Option<Span>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariableArg {
    R,
    Theta,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObservableArg {
    PEvent,
    MeanN,
    MandelQ,
}

/// A closed interval given on the command line as `lo,hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Span([f64; 2]);

fn parse_span(s: &str) -> std::result::Result<Span, String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected lo,hi, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok(Span([parse(lo)?, parse(hi)?]))
}

fn parse_fraction(s: &str) -> std::result::Result<f64, String> {
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: f64 = p.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
    let q: f64 = q.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
    if q == 0.0 {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(PI * p / q)
}

fn parse_tolerance(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value: f64 = value.parse().map_err(|_| format!("bad tolerance value in `{s}`"))?;
    if !(value >= 0.0) {
        return Err(format!("tolerance must be non-negative in `{s}`"));
    }
    Ok((name.to_string(), value))
}

/// Figure defaults for one subcommand.
struct Defaults {
    theta: f64,
    r: f64,
    m: &'static [usize],
}

impl PointArgs {
    fn theta(&self, d: &Defaults) -> f64 {
        self.theta.or(self.theta_frac).unwrap_or(d.theta)
    }

    fn r(&self, d: &Defaults) -> f64 {
        self.r.unwrap_or(d.r)
    }

    fn ms(&self, d: &Defaults) -> Vec<usize> {
        self.m.clone().unwrap_or_else(|| d.m.to_vec())
    }

    fn params(&self, d: &Defaults) -> Result<Vec<ModelParams>> {
        let (theta, r) = (self.theta(d), self.r(d));
        self.ms(d).into_iter().map(|m| ModelParams::new(theta, r, m)).collect()
    }
}

enum Outcome {
    Table(Table, OutputArgs, Format),
    Report(gridscan::ValidationReport, OutputArgs),
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    configure_threads();
    let result = execute(cli.command).and_then(|outcome| emit(outcome, out));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_zero_probability() {
                EXIT_ZERO_PROBABILITY
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn execute(command: Command) -> Result<Outcome> {
    let table = |t: Table, o: &OutputArgs| {
        let fmt = match o.format {
            Some(FormatArg::Json) => Format::Json,
            _ => Format::Csv,
        };
        Ok(Outcome::Table(t, o.clone(), fmt))
    };
    match command {
        Command::Prob(a) => table(prob(&a)?, &a.out),
        Command::Pnd { point, n, n_top } => table(pnd(&point, n, n_top)?, &point.out),
        Command::Moments { point, k, l } => table(moments(&point, k.zip(l))?, &point.out),
        Command::Quad(g) => table(grid(&g, GridObservable::Qcd)?, &g.point.out),
        Command::Wigner(g) => table(grid(&g, GridObservable::Wigner)?, &g.point.out),
        Command::Husimi(g) => table(grid(&g, GridObservable::Husimi)?, &g.point.out),
        Command::Sweep { point, variable, observable, range, points } => {
            table(sweep(&point, variable, observable, range, points)?, &point.out)
        }
        Command::Qmap { out, m, theta_range, r_range, theta_points, r_points } => {
            let mut merged: Option<Table> = None;
            for m in m {
                let spec = QMapSpec {
                    theta_range: theta_range.map_or([0.0, PI / 2.0], |s| s.0),
                    r_range: r_range.map_or([0.0, 2.0], |s| s.0),
                    theta_points,
                    r_points,
                    m,
                };
                merged = Some(append_with_m(merged, gridscan::q_region_map(&spec)?, m));
            }
            table(merged.expect("clap supplies at least one m"), &out)
        }
        Command::Validate { out, tolerances, n_max, fault_b1, exhaustive } => {
            let mut config = ValidationConfig { exhaustive, ..Default::default() };
            config.tolerances = tolerances.into_iter().collect();
            if let Some(n) = n_max {
                config.policy = TruncationPolicy::with_n_max(n);
            }
            config.fault = fault_b1.map(gridscan::Fault::ScaleB1);
            Ok(Outcome::Report(gridscan::validate(&config)?, out))
        }
    }
}

fn prob(a: &PointArgs) -> Result<Table> {
    let d = Defaults { theta: PI / 7.0, r: 0.5, m: &[0, 1, 2, 3, 4] };
    let mut t = Table::new(&["m", "p_event"]).with_meta("command", "prob");
    let params = a.params(&d)?;
    t = t.with_meta("theta", params[0].theta).with_meta("r", params[0].r);
    for p in params {
        // an impossible heralding event has probability exactly zero
        let value = match ConditionalState::new(&p) {
            Ok(s) => s.event_probability(),
            Err(e) if e.is_zero_probability() => 0.0,
            Err(e) => return Err(e),
        };
        t.push(vec![Cell::from(p.m), Cell::from(value)]);
    }
    Ok(t)
}

fn pnd(a: &PointArgs, n: Option<usize>, n_top: usize) -> Result<Table> {
    let d = Defaults { theta: 2.0 * PI / 7.0, r: 0.5, m: &[1] };
    let params = a.params(&d)?;
    let mut t = Table::new(&["m", "n", "pnd"])
        .with_meta("command", "pnd")
        .with_meta("theta", params[0].theta)
        .with_meta("r", params[0].r);
    let ns: Vec<usize> = match n {
        Some(n) => vec![n],
        None => (0..=n_top).collect(),
    };
    for p in params {
        let s = ConditionalState::new(&p)?;
        for &n in &ns {
            t.push(vec![Cell::from(p.m), Cell::from(n), Cell::from(s.pnd(n))]);
        }
    }
    Ok(t)
}

fn moments(a: &PointArgs, kl: Option<(usize, usize)>) -> Result<Table> {
    let d = Defaults { theta: PI / 5.0, r: 0.5, m: &[1, 2, 3, 4] };
    let params = a.params(&d)?;
    let mut cols = vec!["m", "p_event", "mean_n", "mandel_q"];
    if kl.is_some() {
        cols.extend(["moment_re", "moment_im"]);
    }
    let mut t = Table::new(&cols)
        .with_meta("command", "moments")
        .with_meta("theta", params[0].theta)
        .with_meta("r", params[0].r);
    if let Some((k, l)) = kl {
        t = t.with_meta("k", k).with_meta("l", l);
    }
    for p in params {
        let s = ConditionalState::new(&p)?;
        let report = s.report()?;
        let mut row = vec![Cell::from(p.m), Cell::from(report.p_event), Cell::from(report.mean_n), Cell::from(report.mandel_q)];
        if let Some((k, l)) = kl {
            let v = s.moments(k, l)?;
            row.extend([Cell::from(v.re), Cell::from(v.im)]);
        }
        t.push(row);
    }
    Ok(t)
}

fn grid(g: &GridArgs, observable: GridObservable) -> Result<Table> {
    let d = Defaults { theta: PI / 7.0, r: 0.5, m: &[1, 2, 3, 4] };
    let mut spec = GridSpec::phase_space(observable);
    if observable == GridObservable::Qcd {
        spec.y_range = [0.0, PI];
        spec.ny = 61;
    }
    if let Some(s) = g.x_range {
        spec.x_range = s.0;
    }
    if let Some(s) = g.y_range {
        spec.y_range = s.0;
    }
    spec.nx = g.nx.unwrap_or(spec.nx);
    spec.ny = g.ny.unwrap_or(spec.ny);
    let mut merged = None;
    for p in g.point.params(&d)? {
        merged = Some(append_with_m(merged, gridscan::grid(&spec, &p)?, p.m));
    }
    Ok(merged.expect("at least one m"))
}

fn sweep(
    a: &PointArgs,
    variable: VariableArg,
    observable: ObservableArg,
    range: Option<Span>,
    points: usize,
) -> Result<Table> {
    let d = Defaults { theta: PI / 7.0, r: 0.5, m: &[1, 2, 3, 4] };
    let (variable, default_range) = match variable {
        VariableArg::R => (SweepVariable::R, [0.0, 3.0]),
        VariableArg::Theta => (SweepVariable::Theta, [0.0, PI / 2.0]),
    };
    let spec = SweepSpec {
        variable,
        range: range.map_or(default_range, |s| s.0),
        points,
        theta: a.theta(&d),
        r: a.r(&d),
        m_list: a.ms(&d),
    };
    let obs = match observable {
        ObservableArg::PEvent => SweepObservable::PEvent,
        ObservableArg::MeanN => SweepObservable::MeanN,
        ObservableArg::MandelQ => SweepObservable::MandelQ,
    };
    gridscan::sweep(&spec, obs)
}

/// Prepends an `m` column and concatenates onto `acc`.
fn append_with_m(acc: Option<Table>, t: Table, m: usize) -> Table {
    let mut acc = acc.unwrap_or_else(|| {
        let cols: Vec<&str> = std::iter::once("m").chain(t.columns.iter().map(|c| c.as_str())).collect();
        let mut fresh = Table::new(&cols);
        fresh.metadata = t.metadata.clone();
        fresh.metadata.remove("params");
        fresh
    });
    if let Some(p) = t.metadata.get("params") {
        if let Some(a) = acc.metadata.entry("params").or_insert_with(|| json!([])).as_array_mut() {
            a.push(p.clone());
        }
    }
    for row in t.rows {
        acc.push(std::iter::once(Cell::from(m)).chain(row).collect());
    }
    acc
}

fn emit(outcome: Outcome, out: &mut dyn Write) -> Result<i32> {
    match outcome {
        Outcome::Table(mut t, o, fmt) => {
            t.metadata.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            write_to(&o, out, |w| t.write(fmt, w))?;
            Ok(EXIT_OK)
        }
        Outcome::Report(report, o) => {
            match o.format {
                Some(FormatArg::Csv) => {
                    write_to(&o, out, |w| write_check_csv(&report, w))?;
                }
                _ => write_to(&o, out, |w| {
                    serde_json::to_writer_pretty(&mut *w, &report).map_err(|e| Error::Io(e.to_string()))?;
                    writeln!(w)?;
                    Ok(())
                })?,
            }
            Ok(if report.pass { EXIT_OK } else { EXIT_VALIDATION_FAILED })
        }
    }
}

fn write_check_csv(report: &gridscan::ValidationReport, w: &mut dyn Write) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    csv.write_record(["check", "samples", "max_abs_error", "max_rel_error", "tolerance", "pass"]).map_err(io)?;
    for c in &report.checks {
        csv.write_record([
            c.name.clone(),
            c.samples.to_string(),
            format!("{:?}", c.max_abs_error),
            format!("{:?}", c.max_rel_error),
            format!("{:?}", c.tolerance),
            c.pass.to_string(),
        ])
        .map_err(io)?;
    }
    csv.flush()?;
    Ok(())
}

/// Streams to `out`, or to `--output` via a temporary file renamed into place.
fn write_to(o: &OutputArgs, out: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &o.output {
        None => f(out),
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            f(tmp.as_file_mut())?;
            tmp.as_file_mut().sync_all()?;
            tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
            Ok(())
        }
    }
}
