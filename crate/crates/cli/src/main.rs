//! `polyelliptic` — nets, metric profiles, separated spectra and the
//! verification report for one polygon config.
//!
//! Exit codes: 0 ok / all checks pass, 1 failed checks or a numerical
//! failure, 2 usage or config error (JSON error object on stderr).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polyelliptic::atlas::{sector_partition, SectorId, SectorTable};
use polyelliptic::config::{Format, RunConfig};
use polyelliptic::metric::{metric_profile, profile_csv};
use polyelliptic::numfmt::json_num;
use polyelliptic::render::{figure_csv, figure_svg, net_figure, rect_figure, Figure};
use polyelliptic::solver::angular::{eigen_csv, eigenfunction_csv};
use polyelliptic::solver::radial::radial_csv;
use polyelliptic::solver::{angular_spectrum, radial_solution, RadialBc, ResidualSamples};
use polyelliptic::verify::{run_verify, VERSION};
use polyelliptic::PolyError;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "polyelliptic", version, about = "Polyelliptic coordinates outside a convex polygon")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Coordinate net in the plane (mu_c / theta_c isolines, dashed rays).
    Net(Common),
    /// The net in the (ln ae_c, theta_c) rectangle.
    Rectplot(Common),
    /// H_theta^2 and H_mu^2 around the polygon at fixed mu_c.
    MetricProfile(Common),
    /// Angular eigenvalues (and the selected eigenfunction in JSON).
    Eigen(Common),
    /// Radial solution for the selected angular eigenvalue.
    Radial(Common),
    /// Full verification report.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// JSON or TOML config (a bare polygon is accepted).
    config: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Explicit mu_c isolines, comma separated.
    #[arg(long, value_delimiter = ',')]
    mu: Option<Vec<f64>>,
    #[arg(long)]
    mu_count: Option<usize>,
    #[arg(long)]
    theta_count: Option<usize>,
    /// Wavenumber.
    #[arg(short)]
    k: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    index: Option<usize>,
    #[arg(long)]
    mu_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    bc: Option<BcArg>,
    /// Radial: separation constant (default: eigenvalue `index`).
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Radial: sector as `wedge:K`, `edge:K`, `front:K`, `back:K` or its label.
    #[arg(long)]
    sector: Option<String>,
    /// metric-profile: mu_c of the profile.
    #[arg(long)]
    profile_mu: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Tolerance override, `check=value`; repeatable.
    #[arg(long = "tol", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Svg,
    Csv,
    Json,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum BcArg {
    Dirichlet,
    UnitStart,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, v) = s.split_once('=').ok_or("expected check=value")?;
    Ok((name.to_string(), v.parse::<f64>().map_err(|e| e.to_string())?))
}

enum Failure {
    Config(String),
    Numeric(PolyError),
    Checks,
}

impl From<PolyError> for Failure {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::Config(m) => Failure::Config(m),
            e => Failure::Numeric(e),
        }
    }
}

fn load(c: &Common, command: &str) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(&c.config)?;
    let g = &mut cfg.grid;
    if c.mu.is_some() {
        g.mu = c.mu.clone();
    }
    g.mu_count = c.mu_count.unwrap_or(g.mu_count);
    g.theta_count = c.theta_count.unwrap_or(g.theta_count);
    let s = &mut cfg.solver;
    s.k = c.k.unwrap_or(s.k);
    s.count = c.count.unwrap_or(s.count);
    s.resolution = c.resolution.unwrap_or(s.resolution);
    s.index = c.index.unwrap_or(s.index);
    s.mu_max = c.mu_max.unwrap_or(s.mu_max);
    s.steps = c.steps.unwrap_or(s.steps);
    if let Some(bc) = c.bc {
        s.bc = match bc {
            BcArg::Dirichlet => RadialBc::Dirichlet,
            BcArg::UnitStart => RadialBc::UnitStart,
        };
    }
    cfg.profile.mu = c.profile_mu.unwrap_or(cfg.profile.mu);
    cfg.profile.samples = c.samples.unwrap_or(cfg.profile.samples);
    for (name, v) in &c.tol {
        cfg.tolerances.insert(name.clone(), *v);
    }
    cfg.command = Some(command.to_string());
    cfg.validate()?;
    Ok(cfg)
}

/// Flag first, then the config's own `format` if it applies, then `default`.
fn format(c: &Common, cfg: &RunConfig, allowed: &[Format], default: Format, command: &str) -> Result<Format, Failure> {
    if let Some(f) = c.format {
        let f = match f {
            FormatArg::Svg => Format::Svg,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
        if !allowed.contains(&f) {
            return Err(Failure::Config(format!("--format {f:?} not available for {command}").to_lowercase()));
        }
        return Ok(f);
    }
    Ok(cfg.format.filter(|f| allowed.contains(f)).unwrap_or(default))
}

fn parse_sector(t: &SectorTable, s: &str) -> Result<SectorId, Failure> {
    if let Some(sec) = t.sectors.iter().find(|x| x.label == s) {
        return Ok(sec.id);
    }
    let bad = || Failure::Config(format!("unknown sector `{s}`"));
    let (kind, k) = s.split_once(':').ok_or_else(bad)?;
    let k: usize = k.parse().map_err(|_| bad())?;
    if k >= t.n() {
        return Err(bad());
    }
    Ok(match kind {
        "wedge" => SectorId::Wedge(k),
        "edge" => SectorId::Edge(k),
        "front" => SectorId::Front(k),
        "back" => SectorId::Back(k),
        _ => return Err(bad()),
    })
}

fn figure_json(fig: &Figure) -> Value {
    let curves: Vec<Value> = fig
        .curves
        .iter()
        .map(|c| {
            json!({
                "kind": c.kind.class(),
                "label": c.label,
                "value": json_num(c.value),
                "closed": c.closed,
                "points": c.points.iter().map(|p| json!([json_num(p.x), json_num(p.y)])).collect::<Vec<_>>(),
            })
        })
        .collect();
    let labels: Vec<Value> =
        fig.labels.iter().map(|(p, s)| json!({"x": json_num(p.x), "y": json_num(p.y), "text": s})).collect();
    json!({"version": VERSION, "curves": curves, "labels": labels})
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn run(cmd: &Cmd) -> Result<(String, Option<PathBuf>), Failure> {
    use Format::*;
    let (name, c) = match cmd {
        Cmd::Net(c) => ("net", c),
        Cmd::Rectplot(c) => ("rectplot", c),
        Cmd::MetricProfile(c) => ("metric-profile", c),
        Cmd::Eigen(c) => ("eigen", c),
        Cmd::Radial(c) => ("radial", c),
        Cmd::Verify(c) => ("verify", c),
    };
    let cfg = load(c, name)?;
    let table = sector_partition(&cfg.spec()?)?;
    let out = match cmd {
        Cmd::Net(_) | Cmd::Rectplot(_) => {
            let fig = if name == "net" { net_figure(&table, &cfg)? } else { rect_figure(&table, &cfg)? };
            match format(c, &cfg, &[Svg, Csv, Json], Svg, name)? {
                Svg => figure_svg(&fig),
                Csv => figure_csv(&fig),
                Json => pretty(&figure_json(&fig)),
            }
        }
        Cmd::MetricProfile(_) => {
            let rows = metric_profile(&table, cfg.profile.mu, cfg.profile.samples)?;
            match format(c, &cfg, &[Csv, Json], Csv, name)? {
                Json => pretty(&json!({
                    "version": VERSION,
                    "mu_c": json_num(cfg.profile.mu),
                    "rows": rows.iter().map(|r| json!({
                        "theta_c": json_num(r.theta_c),
                        "H_theta_sq": json_num(r.h_theta_sq),
                        "H_mu_sq": json_num(r.h_mu_sq),
                        "sector_id": r.sector,
                    })).collect::<Vec<_>>(),
                })),
                _ => profile_csv(&rows),
            }
        }
        Cmd::Eigen(_) => {
            let s = &cfg.solver;
            let pairs = angular_spectrum(&table, s.k, s.count, s.resolution)?;
            match format(c, &cfg, &[Csv, Json], Csv, name)? {
                Json => {
                    let p = &pairs[s.index];
                    pretty(&json!({
                        "version": VERSION,
                        "k": json_num(s.k),
                        "eigenvalues": pairs.iter().map(|p| json!({
                            "n": p.index,
                            "lambda": json_num(p.lambda),
                            "convergence_estimate": json_num(p.convergence_estimate),
                        })).collect::<Vec<_>>(),
                        "eigenfunction": {
                            "n": p.index,
                            "theta_c": p.theta.iter().map(|x| json_num(*x)).collect::<Vec<_>>(),
                            "psi1": p.psi.iter().map(|x| json_num(*x)).collect::<Vec<_>>(),
                        },
                    }))
                }
                _ if c.index.is_some() => eigenfunction_csv(&pairs[s.index]),
                _ => eigen_csv(&pairs),
            }
        }
        Cmd::Radial(_) => {
            let s = &cfg.solver;
            let sector = match &c.sector {
                Some(x) => parse_sector(&table, x)?,
                None => ResidualSamples::default_for(&table).sector,
            };
            let lambda = match c.lambda {
                Some(l) => l,
                None => angular_spectrum(&table, s.k, s.index + 1, s.resolution)?[s.index].lambda,
            };
            let sol = radial_solution(&table, sector, s.k, lambda, s.bc, s.mu_max, s.steps)?;
            match format(c, &cfg, &[Csv, Json], Csv, name)? {
                Json => pretty(&json!({
                    "version": VERSION,
                    "k": json_num(sol.k),
                    "lambda": json_num(sol.lambda),
                    "bc": sol.bc,
                    "sector": table.sector(sol.sector).label,
                    "mu_c": sol.mu.iter().map(|x| json_num(*x)).collect::<Vec<_>>(),
                    "psi2": sol.psi.iter().map(|x| json_num(*x)).collect::<Vec<_>>(),
                    "dpsi2": sol.dpsi.iter().map(|x| json_num(*x)).collect::<Vec<_>>(),
                })),
                _ => radial_csv(&sol),
            }
        }
        Cmd::Verify(_) => {
            format(c, &cfg, &[Json], Json, name)?;
            let report = run_verify(&cfg)?;
            write_out(&pretty(&report.to_json()), c.output.as_ref())?;
            if !report.pass() {
                for ch in report.checks.iter().filter(|ch| !ch.pass) {
                    eprintln!("FAIL {}: residual {:e} > tolerance {:e} {}", ch.check, ch.residual, ch.tolerance, ch.detail);
                }
                return Err(Failure::Checks);
            }
            return Ok((String::new(), None));
        }
    };
    Ok((out, c.output.clone()))
}

fn write_out(s: &str, path: Option<&PathBuf>) -> Result<(), Failure> {
    let r = match path {
        Some(p) => std::fs::write(p, s),
        None => std::io::stdout().lock().write_all(s.as_bytes()),
    };
    r.map_err(|e| Failure::Config(format!("cannot write output: {e}")))
}

fn error_object(kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({"error": kind, "message": message}));
    ExitCode::from(if kind == "config" || kind == "usage" { 2 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return error_object("usage", e.to_string().trim()),
    };
    match run(&cli.cmd) {
        Ok((out, path)) => match write_out(&out, path.as_ref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(Failure::Config(m)) => error_object("config", &m),
            Err(_) => ExitCode::from(1),
        },
        Err(Failure::Config(m)) => error_object("config", &m),
        Err(Failure::Numeric(e)) => error_object("numerical", &e.to_string()),
        Err(Failure::Checks) => ExitCode::from(1),
    }
}
