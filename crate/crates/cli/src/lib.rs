//! Command-line front end for `frac-spectra`.
//!
//! Exit codes: `0` success, `2` usage error (bad flags, unparseable input,
//! argument outside the domain), `1` computational failure such as
//! `NonConvergence` or `Inconclusive`. Failed computations still write a
//! report whose metadata names the error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use frac_spectra::fractional::rl_integral_left;
use frac_spectra::special::{MLEvalConfig, MLParams, MittagLeffler, Regime};
use frac_spectra::spectrum::{self, Characteristic, SearchConfig};
use frac_spectra::volterra::{self, Solver};
use frac_spectra::{BoundaryData, Potential, QuadratureConfig};
use rayon::prelude::*;
use serde_json::{Map, Value};

mod potential;
pub mod report;

pub use potential::parse_potential;
use report::{Format, Report};

/// Caps the number of worker threads used by λ-scans.
pub const THREADS_ENV: &str = "FRAC_SPECTRA_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot parse '{token}': {reason}")]
    Parse { token: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Parser, Debug)]
#[command(
    name = "frac-spectra",
    version,
    about = "Real eigenvalues of fractional Sturm-Liouville problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate E_{δ,θ}(z) and its derivative.
    Ml {
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
    },
    /// Solve the Volterra equation and print y at every node.
    Solve {
        #[arg(long)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// zero | const:<c> | poly:<c0>,<c1>,... | csv:<path>
        #[arg(long, default_value = "zero")]
        q: String,
        #[arg(long, default_value_t = 1024)]
        nodes: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c1: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        c2: f64,
    },
    /// Real eigenvalues for one order.
    Spectrum {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value = "zero")]
        q: String,
        #[arg(long, default_value_t = 1e6)]
        lambda_max: f64,
        /// Relative root tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 1024)]
        nodes: usize,
        /// Scan points per bracketing interval.
        #[arg(long, default_value_t = 48)]
        points: usize,
    },
    /// Bracketing intervals I_0..I_{n-max} with the asymptotic estimates.
    Intervals {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Smallest order with a real eigenvalue (q ≡ 0).
    CriticalAlpha {
        /// Tolerance on α.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 1e6)]
        lambda_max: f64,
    },
    /// Plot data: Δ(λ) on a uniform λ grid.
    Trace {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value = "zero")]
        q: String,
        #[arg(long, default_value_t = 500.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 2000)]
        points: usize,
        #[arg(long, default_value_t = 1024)]
        nodes: usize,
    },
    /// Plot data: N*(α) on a uniform α grid (q ≡ 0).
    Count {
        #[arg(long, default_value_t = 0.55)]
        alpha_min: f64,
        #[arg(long, default_value_t = 0.99)]
        alpha_max: f64,
        #[arg(long, default_value_t = 45)]
        steps: usize,
        #[arg(long, default_value_t = 1e6)]
        lambda_max: f64,
    },
}

/// Runs the tool on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(stderr, "error: {e}");
        return 2;
    }
    let (report, code) = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    if let Some(err) = &report.metadata.error {
        let _ = writeln!(stderr, "error: {}: {}", err.kind, err.message);
    }
    let written = match &cli.out {
        Some(path) => std::fs::File::create(path).and_then(|mut f| report.emit(cli.format, &mut f)),
        None => report.emit(cli.format, stdout),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write report: {e}");
        return 1;
    }
    code
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_ENV} must be a positive integer, got '{v}'"
        ))
    })?;
    // the global pool can only be set once per process
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn exit_code(e: &frac_spectra::Error) -> i32 {
    match e {
        frac_spectra::Error::Domain(_) | frac_spectra::Error::InvalidConfig(_) => 2,
        _ => 1,
    }
}

/// Builds the report; input errors that precede any computation are returned
/// as `Err`.
fn execute(cmd: &Command) -> Result<(Report, i32), CliError> {
    let (name, config, q) = describe(cmd)?;
    let mut report = Report::new(name, config);
    let outcome = match cmd {
        Command::Ml { delta, theta, z } => ml(&mut report, *delta, *theta, *z),
        Command::Solve {
            alpha,
            lambda,
            nodes,
            c1,
            c2,
            ..
        } => solve(
            &mut report,
            *alpha,
            *lambda,
            q.as_ref().unwrap(),
            *nodes,
            *c1,
            *c2,
        ),
        Command::Spectrum {
            alpha,
            lambda_max,
            tol,
            nodes,
            points,
            ..
        } => {
            let cfg = SearchConfig {
                lambda_max: *lambda_max,
                scan_points_per_interval: *points,
                root_tol: *tol,
                mesh_nodes: *nodes,
                ..SearchConfig::default()
            };
            eigenvalues(&mut report, *alpha, q.as_ref().unwrap(), &cfg)
        }
        Command::Intervals { alpha, n_max } => intervals(&mut report, *alpha, *n_max),
        Command::CriticalAlpha { tol, lambda_max } => critical(&mut report, *tol, *lambda_max),
        Command::Trace {
            alpha,
            lambda_max,
            points,
            nodes,
            ..
        } => trace(
            &mut report,
            *alpha,
            q.as_ref().unwrap(),
            *lambda_max,
            *points,
            *nodes,
        ),
        Command::Count {
            alpha_min,
            alpha_max,
            steps,
            lambda_max,
        } => count(&mut report, *alpha_min, *alpha_max, *steps, *lambda_max),
    };
    let code = match outcome {
        Ok(()) => 0,
        Err(e) => {
            report.records.clear();
            report.fail(e.kind(), e.to_string());
            exit_code(&e)
        }
    };
    Ok((report, code))
}

/// Command name, config echo and the parsed potential, if the command takes one.
type Described = (&'static str, Map<String, Value>, Option<Potential>);

fn describe(cmd: &Command) -> Result<Described, CliError> {
    let parse = |s: &str| parse_potential(s).map(Some);
    Ok(match cmd {
        Command::Ml { delta, theta, z } => (
            "ml",
            record! {"delta" => delta, "theta" => theta, "z" => z},
            None,
        ),
        Command::Solve {
            alpha,
            lambda,
            q,
            nodes,
            c1,
            c2,
        } => (
            "solve",
            record! {"alpha" => alpha, "lambda" => lambda, "q" => q, "nodes" => nodes, "c1" => c1, "c2" => c2},
            parse(q)?,
        ),
        Command::Spectrum {
            alpha,
            q,
            lambda_max,
            tol,
            nodes,
            points,
        } => (
            "spectrum",
            record! {
                "alpha" => alpha, "q" => q, "lambda_max" => lambda_max, "tol" => tol,
                "nodes" => nodes, "points" => points,
            },
            parse(q)?,
        ),
        Command::Intervals { alpha, n_max } => (
            "intervals",
            record! {"alpha" => alpha, "n_max" => n_max},
            None,
        ),
        Command::CriticalAlpha { tol, lambda_max } => (
            "critical-alpha",
            record! {"tol" => tol, "lambda_max" => lambda_max},
            None,
        ),
        Command::Trace {
            alpha,
            q,
            lambda_max,
            points,
            nodes,
        } => (
            "trace",
            record! {"alpha" => alpha, "q" => q, "lambda_max" => lambda_max, "points" => points, "nodes" => nodes},
            parse(q)?,
        ),
        Command::Count {
            alpha_min,
            alpha_max,
            steps,
            lambda_max,
        } => (
            "count",
            record! {"alpha_min" => alpha_min, "alpha_max" => alpha_max, "steps" => steps, "lambda_max" => lambda_max},
            None,
        ),
    })
}

type Outcome = frac_spectra::Result<()>;

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Series => "series",
        Regime::ExtendedSeries => "extended_series",
        Regime::Asymptotic => "asymptotic",
    }
}

fn ml(report: &mut Report, delta: f64, theta: f64, z: f64) -> Outcome {
    let ev = MittagLeffler::new(MLParams::new(delta, theta)?, MLEvalConfig::default())?;
    let e = ev.evaluate(z)?;
    report.records.push(record! {
        "delta" => delta, "theta" => theta, "z" => z, "value" => e.value,
        "derivative" => e.derivative, "error_estimate" => e.error_estimate,
        "regime" => regime_name(e.regime),
    });
    Ok(())
}

fn solve(
    report: &mut Report,
    alpha: f64,
    lambda: f64,
    q: &Potential,
    nodes: usize,
    c1: f64,
    c2: f64,
) -> Outcome {
    let sol = Solver::new(alpha)?.solve(lambda, q, BoundaryData::new(c1, c2)?, nodes)?;
    let boundary = if alpha == 1.0 {
        sol.end_value()
    } else {
        rl_integral_left(
            &sol.sampled()?,
            1.0 - alpha,
            1.0,
            &QuadratureConfig::default(),
        )?
    };
    let residual = volterra::residual(&sol, q).ok();
    report.metadata.summary = record! {
        "y_end" => sol.end_value(), "boundary_functional" => boundary, "residual" => residual,
    };
    for (t, y) in sol.mesh.iter().zip(&sol.y) {
        report.records.push(record! {"t" => t, "y" => y});
    }
    Ok(())
}

fn eigenvalues(report: &mut Report, alpha: f64, q: &Potential, cfg: &SearchConfig) -> Outcome {
    let r = spectrum::find_real_eigenvalues(alpha, q, cfg)?;
    report.metadata.summary = record! {
        "potential" => r.potential_descriptor, "n_star" => r.n_star,
        "search_bound" => r.search_bound, "tail_certified" => r.tail_certified,
    };
    for (i, e) in r.eigenvalues.iter().enumerate() {
        report.records.push(record! {
            "lambda" => e.value, "index" => i, "residual" => e.residual,
            "interval" => e.bracket.map(|b| b.index),
            "interval_lo" => e.bracket.map(|b| b.lo), "interval_hi" => e.bracket.map(|b| b.hi),
            "refinement_iters" => e.refinement_iters, "low_confidence" => e.low_confidence,
        });
    }
    Ok(())
}

fn intervals(report: &mut Report, alpha: f64, n_max: usize) -> Outcome {
    for iv in spectrum::bracket_intervals(alpha, n_max)? {
        report.records.push(record! {
            "n" => iv.index, "lo" => iv.lo, "hi" => iv.hi,
            "estimate" => spectrum::asymptotic_eigenvalue(alpha, iv.index)?,
        });
    }
    Ok(())
}

fn critical(report: &mut Report, tol: f64, lambda_max: f64) -> Outcome {
    let cfg = SearchConfig {
        lambda_max,
        ..SearchConfig::default()
    };
    let a = spectrum::critical_alpha(&cfg, tol)?;
    report.metadata.summary = record! {"critical_alpha" => a};
    report.records.push(record! {"critical_alpha" => a});
    Ok(())
}

fn trace(
    report: &mut Report,
    alpha: f64,
    q: &Potential,
    lambda_max: f64,
    points: usize,
    nodes: usize,
) -> Outcome {
    if points == 0 || lambda_max.is_nan() || lambda_max <= 0.0 {
        return Err(frac_spectra::Error::InvalidConfig(
            "need points >= 1 and lambda-max > 0".into(),
        ));
    }
    let cfg = SearchConfig {
        mesh_nodes: nodes,
        ..SearchConfig::default()
    };
    let chr = Characteristic::new(alpha, q, &cfg)?;
    let lambdas: Vec<f64> = (1..=points)
        .map(|i| lambda_max * i as f64 / points as f64)
        .collect();
    let values: Vec<frac_spectra::Result<f64>> = lambdas.par_iter().map(|&l| chr.eval(l)).collect();
    for (l, v) in lambdas.iter().zip(values) {
        report
            .records
            .push(record! {"lambda" => l, "characteristic" => v?});
    }
    Ok(())
}

fn count(
    report: &mut Report,
    alpha_min: f64,
    alpha_max: f64,
    steps: usize,
    lambda_max: f64,
) -> Outcome {
    if steps < 1 || alpha_min.is_nan() || alpha_max.is_nan() || alpha_min > alpha_max {
        return Err(frac_spectra::Error::InvalidConfig(
            "need steps >= 1 and alpha-min <= alpha-max".into(),
        ));
    }
    let cfg = SearchConfig {
        lambda_max,
        ..SearchConfig::default()
    };
    let alphas: Vec<f64> = (0..steps)
        .map(|i| {
            if steps == 1 {
                alpha_min
            } else {
                alpha_min + (alpha_max - alpha_min) * i as f64 / (steps - 1) as f64
            }
        })
        .collect();
    for a in alphas {
        let r = spectrum::find_real_eigenvalues(a, &Potential::Zero, &cfg)?;
        report.records.push(record! {
            "alpha" => a, "n_star" => r.n_star, "tail_certified" => r.tail_certified,
            "search_bound" => r.search_bound,
        });
    }
    Ok(())
}
