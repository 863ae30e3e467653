//! `spares`: batch front end over spares-core. Every command reads a JSON
//! scenario (or a built-in preset) and writes CSV or JSON to `--out` or
//! stdout.
//!
//! Exit status: 0 on success, 1 for invalid input, 2 for numerical failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spares_core::allocate::{recommend, AllocationBase, AllocationReport};
use spares_core::conditions::{check_theorem, ratio_q, CheckGrids, RatioKind, TheoremId, TheoremSpec};
use spares_core::montecarlo::simulate;
use spares_core::orders::check_order;
use spares_core::presets::{self, claim_holds, claim_margin, Plotted};
use spares_core::scenario::{GridSpec, Scenario};
use spares_core::systems::{Provenance, Quantity, SurvivalCurve};
use spares_core::{linspace, Distortion, Error, EvalGrid, OrderKind, OrderVerdict};

#[derive(Debug, Parser)]
#[command(name = "spares", version, about = "Reliability of coherent systems with heterogeneous active spares")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distortion q, its derivatives and the ratios R1-R4 on a u-grid.
    Distortion(Common),
    /// sf, cdf, pdf, hazard and reversed hazard of every system.
    Eval(Common),
    /// Stochastic-order verdicts of system B against system A, with ratio curves.
    Compare(Common),
    /// Checks the sufficient conditions of a theorem on a two-system scenario.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Theorem to check (e.g. T3_1); defaults to the scenario's own.
        #[arg(long)]
        theorem: Option<String>,
        /// Check the dual (reversed inequality) form.
        #[arg(long)]
        dual: bool,
    },
    /// Monte Carlo estimate of the survival function of one system.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Index of the system in the scenario.
        #[arg(long, default_value_t = 0)]
        system: usize,
    },
    /// Ranks every allocation of the scenario's spare pool.
    Allocate(Common),
    /// Reproduces a built-in example curve (ex3.1 ... ex4.4).
    Example {
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write the preset's scenario JSON instead of its curve.
        #[arg(long)]
        emit_scenario: bool,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of grid points (overrides the scenario's grid).
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let numerical = e.chain().any(|c| c.downcast_ref::<Error>().is_some_and(Error::is_numerical));
            ExitCode::from(if numerical { 2 } else { 1 })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Distortion(c) => distortion(&c),
        Command::Eval(c) => eval(&c),
        Command::Compare(c) => compare(&c),
        Command::Verify { common, theorem, dual } => verify(&common, theorem.as_deref(), dual),
        Command::Simulate { common, seed, samples, system } => simulate_cmd(&common, seed, samples, system),
        Command::Allocate(c) => allocate(&c),
        Command::Example { id, out, emit_scenario: true, .. } => {
            let mut w = sink(out.as_deref())?;
            writeln!(w, "{}", presets::preset(&id)?.scenario.to_json())?;
            w.flush()?;
            Ok(())
        }
        Command::Example { id, out, grid, format, .. } => example(&id, out.as_deref(), grid, format),
    }
}

fn load(c: &Common) -> Result<Scenario> {
    let text = fs::read_to_string(&c.scenario).with_context(|| format!("reading {}", c.scenario.display()))?;
    let mut s = Scenario::from_json(&text).with_context(|| format!("loading {}", c.scenario.display()))?;
    if let Some(points) = c.grid {
        let mut g = s.grid.clone().unwrap_or_default();
        g.points = points;
        s.grid = Some(g);
        s.validate()?;
    }
    Ok(s)
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes a CSV table; cells are already formatted.
fn write_table(out: Option<&Path>, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = sink(out)?;
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip form with exponents for extreme magnitudes; `NaN`
/// becomes an empty cell and `-0` prints as `0`.
fn cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{:?}", v + 0.0)
    }
}

#[derive(Serialize)]
struct DistortionRow {
    theta: f64,
    u: f64,
    q: f64,
    q_prime: f64,
    q_second: f64,
    ratios: [f64; 4],
}

fn distortion(c: &Common) -> Result<()> {
    let s = load(c)?;
    let structure = s.coherent_structure()?;
    let copula = s.copula_family()?;
    let mut thetas: Vec<f64> = s.systems.iter().flat_map(|sys| sys.thetas()).collect();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    let n = c.grid.unwrap_or(999);
    if n < 2 {
        bail!("the u-grid needs at least 2 points");
    }
    let h = 1.0 / (n as f64 + 1.0);
    let us = linspace(h, 1.0 - h, n);
    let mut rows = Vec::with_capacity(thetas.len() * n);
    for &theta in &thetas {
        let d = Distortion::new(&structure, copula, theta)?;
        for &u in &us {
            let mut ratios = [0.0; 4];
            for (r, kind) in ratios.iter_mut().zip(RatioKind::ALL) {
                *r = ratio_q(kind, &d, u)?;
            }
            rows.push(DistortionRow { theta, u, q: d.q(u)?, q_prime: d.q_prime(u)?, q_second: d.q_second(u)?, ratios });
        }
    }
    match c.format.unwrap_or(Format::Csv) {
        Format::Json => write_json(c.out.as_deref(), &rows),
        Format::Csv => write_table(
            c.out.as_deref(),
            &["theta", "u", "q", "q_prime", "q_second", "r1", "r2", "r3", "r4"],
            rows.iter().map(|r| {
                [r.theta, r.u, r.q, r.q_prime, r.q_second].into_iter().chain(r.ratios).map(cell).collect()
            }),
        ),
    }
}

#[derive(Serialize)]
struct SystemCurves {
    system: usize,
    curves: Vec<(Quantity, SurvivalCurve)>,
}

fn eval(c: &Common) -> Result<()> {
    let s = load(c)?;
    let grid = s.grid()?;
    let mut all = Vec::new();
    for i in 0..s.systems.len() {
        let sys = s.build_system(i)?;
        let mut curves = Vec::new();
        for q in Quantity::ALL {
            // Points where the quantity underflows or hits a pole are left
            // empty rather than failing the whole curve.
            let mut skipped = 0;
            let mut value = Vec::with_capacity(grid.len());
            for &t in grid.times() {
                match q.eval(&sys, t) {
                    Ok(v) => value.push(v),
                    Err(e) if e.is_numerical() => {
                        skipped += 1;
                        value.push(f64::NAN);
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            if skipped > 0 {
                eprintln!("system {i}: {} left empty at {skipped} of {} points (outside the support or underflow)", q.name(), grid.len());
            }
            let curve = SurvivalCurve {
                y: grid.ys().to_vec(),
                x: grid.times().to_vec(),
                value,
                stderr: None,
                provenance: Provenance::ClosedForm,
            };
            curves.push((q, curve));
        }
        all.push(SystemCurves { system: i, curves });
    }
    match c.format.unwrap_or(Format::Csv) {
        Format::Json => write_json(c.out.as_deref(), &all),
        Format::Csv => {
            let mut header = vec!["system", "y", "x"];
            header.extend(Quantity::ALL.iter().map(Quantity::name));
            let grid = &grid;
            let rows = all.iter().flat_map(|sc| {
                (0..grid.len()).map(move |k| {
                    let mut row = vec![sc.system.to_string(), cell(grid.ys()[k]), cell(grid.times()[k])];
                    row.extend(sc.curves.iter().map(|(_, curve)| cell(curve.value[k])));
                    row
                })
            });
            write_table(c.out.as_deref(), &header, rows)
        }
    }
}

#[derive(Serialize)]
struct Comparison {
    verdicts: Vec<OrderVerdict>,
    curves: Vec<(Plotted, SurvivalCurve)>,
}

fn compare(c: &Common) -> Result<()> {
    let s = load(c)?;
    if s.systems.len() != 2 {
        bail!("compare needs exactly two systems, found {}", s.systems.len());
    }
    let grid = s.grid()?;
    let (a, b) = (s.build_system(0)?, s.build_system(1)?);
    let verdicts = OrderKind::ALL.iter().map(|&k| check_order(k, &a, &b, &grid)).collect::<spares_core::Result<Vec<_>>>()?;
    let curves = [Plotted::SfDifference, Plotted::SfRatio, Plotted::CdfRatio, Plotted::PdfRatio]
        .iter()
        .map(|&p| Ok((p, presets::plotted_curve(&s, p, &grid)?)))
        .collect::<Result<Vec<_>>>()?;
    let report = Comparison { verdicts, curves };
    match c.format.unwrap_or(Format::Json) {
        Format::Json => write_json(c.out.as_deref(), &report),
        Format::Csv => {
            for v in &report.verdicts {
                eprintln!("{}: {}", v.kind.name(), v.relation.name());
            }
            let rows = report.curves.iter().flat_map(|(p, curve)| {
                let name = serde_json::to_value(p).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
                (0..curve.x.len()).map(move |k| vec![name.clone(), cell(curve.y[k]), cell(curve.x[k]), cell(curve.value[k])])
            });
            write_table(c.out.as_deref(), &["curve", "y", "x", "value"], rows)
        }
    }
}

fn verify(c: &Common, theorem: Option<&str>, dual: bool) -> Result<()> {
    let s = load(c)?;
    let spec = match (theorem, s.theorem) {
        (Some(name), _) => {
            let id = TheoremId::from_name(name)?;
            if dual {
                TheoremSpec::dual(id)
            } else {
                TheoremSpec::primary(id)
            }
        }
        (None, Some(spec)) => spec,
        (None, None) => bail!("no theorem given: pass --theorem or set `theorem` in the scenario"),
    };
    let cert = check_theorem(spec, &s, &CheckGrids::default())?;
    if c.format == Some(Format::Csv) {
        write_table(
            c.out.as_deref(),
            &["id", "pass", "margin", "description"],
            cert.conditions
                .iter()
                .map(|r| vec![r.id.clone(), r.pass.to_string(), cell(r.margin), format!("\"{}\"", r.description.replace('"', "'"))]),
        )
    } else {
        write_json(c.out.as_deref(), &cert)
    }
}

fn simulate_cmd(c: &Common, seed: u64, samples: usize, system: usize) -> Result<()> {
    let s = load(c)?;
    let sys = s.build_system(system)?;
    let est = simulate(&sys, &s.grid()?, samples, seed)?;
    match c.format.unwrap_or(Format::Csv) {
        Format::Json => write_json(c.out.as_deref(), &est),
        Format::Csv => {
            let mut w = sink(c.out.as_deref())?;
            est.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn allocate(c: &Common) -> Result<()> {
    let s = load(c)?;
    let (base, pool) = AllocationBase::from_scenario(&s)?;
    let report: AllocationReport = recommend(&pool, &base)?;
    eprint!("{}", report.table());
    match c.format.unwrap_or(Format::Json) {
        Format::Json => write_json(c.out.as_deref(), &report),
        Format::Csv => write_table(
            c.out.as_deref(),
            &["rank", "spares", "mean_lifetime", "mean_truncated"],
            report.ranking.iter().enumerate().map(|(rank, &i)| {
                let a = &report.allocations[i];
                let spares = a.spares.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
                vec![(rank + 1).to_string(), spares, cell(a.mean_lifetime), a.mean_truncated.to_string()]
            }),
        ),
    }
}

#[derive(Serialize)]
struct ExampleOutput<'a> {
    id: &'a str,
    title: &'a str,
    plotted: Plotted,
    claim: presets::Claim,
    claim_holds: bool,
    margin: f64,
    curve: SurvivalCurve,
}

fn example(id: &str, out: Option<&Path>, grid: Option<usize>, format: Format) -> Result<()> {
    let p = presets::preset(id)?;
    let spec = GridSpec { points: grid.unwrap_or(GridSpec::default().points), ..GridSpec::default() };
    let grid = EvalGrid::uniform_y(spec.points, spec.y_min, spec.y_max)?;
    let curve = p.curve(&grid)?;
    let holds = claim_holds(p.claim, &curve.value);
    let margin = claim_margin(p.claim, &curve.value);
    eprintln!("{}: {} ({}) claim {:?}: {}", p.id, p.title, p.plotted.description(), p.claim, if holds { "holds" } else { "violated" });
    match format {
        Format::Json => write_json(
            out,
            &ExampleOutput { id: p.id, title: p.title, plotted: p.plotted, claim: p.claim, claim_holds: holds, margin, curve },
        ),
        Format::Csv => {
            let mut w = sink(out)?;
            curve.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}
