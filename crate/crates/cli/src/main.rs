//! `dirichlet-verify`: evaluate weighted Dirichlet and de Branges–Rovnyak
//! norms and run the verification suites.

mod args;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dirichlet_core::debranges::{f_plus, hb_norm_sq, pair_from_phi};
use dirichlet_core::dirichlet::{dirichlet_area, local_dirichlet};
use dirichlet_core::quadrature::{make_disk_rule, DEFAULT_ANGULAR_NODES, DEFAULT_RADIAL_NODES};
use dirichlet_core::series::{rational_to_poly, DEFAULT_BOUNDARY_GRID, DEFAULT_TRUNCATION};
use dirichlet_core::verify::scan::{scan_moments, scan_qb, MomentScan, QbScan, ScanTable};
use dirichlet_core::verify::{parse_suites, run, VerificationReport, VerifyConfig};
use dirichlet_core::weights::{berezin, bergman_projection, polar_grid};
use dirichlet_core::Error;
use serde_json::json;

use args::{parse_complex, parse_grid, read_measure, read_rational, read_weight};

#[derive(Parser, Debug)]
#[command(name = "dirichlet-verify", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Radial Gauss-Legendre nodes of the disk rule.
    #[arg(long, global = true, default_value_t = DEFAULT_RADIAL_NODES)]
    nr: usize,
    /// Minimum angular nodes per ring of the disk rule.
    #[arg(long, global = true, default_value_t = DEFAULT_ANGULAR_NODES)]
    ntheta: usize,
    /// Boundary grid size (power of two).
    #[arg(long = "M", global = true)]
    m: Option<usize>,
    /// Taylor truncation degree.
    #[arg(long = "N", global = true)]
    n: Option<usize>,
    /// Tolerance for checks on a user-supplied measure.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Evaluation grid as RADIIxANGLES, e.g. 15x16.
    #[arg(long, global = true, default_value = "15x16", value_parser = parse_grid)]
    grid: (usize, usize),
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for the random polynomial families.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Area integral of |f'|^2 w over the disk.
    Dirichlet {
        /// Rational function as JSON or a path to a JSON file.
        #[arg(long)]
        f: String,
        /// Weight as JSON or a path to a JSON file.
        #[arg(long)]
        weight: String,
    },
    /// Local Dirichlet integral at a point of the closed disk.
    Local {
        #[arg(long)]
        f: String,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        zeta: num_complex::Complex64,
    },
    /// Pair (b, a) for a symbol, exported as JSON.
    Pair {
        #[arg(long)]
        phi: String,
    },
    /// Coefficients of f+ for a polynomial f and a symbol.
    Fplus {
        #[arg(long)]
        f: String,
        #[arg(long)]
        phi: String,
    },
    /// De Branges-Rovnyak norm squared of a polynomial.
    Hbnorm {
        #[arg(long)]
        f: String,
        #[arg(long)]
        phi: String,
    },
    /// Bergman projection of a weight at a point.
    Bergman {
        #[arg(long)]
        weight: String,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: num_complex::Complex64,
    },
    /// Berezin transform of a weight at a point.
    Berezin {
        #[arg(long)]
        weight: String,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: num_complex::Complex64,
    },
    /// Run a verification suite.
    Verify {
        /// norm-equality, douglas, dilation, qb, moments, phieqn or all.
        suite: String,
        /// Extra atomic measure to check, as JSON or a path.
        #[arg(long)]
        measure: Option<String>,
    },
    /// Parameter sweep over two-atom families.
    Scan {
        #[arg(value_enum)]
        kind: ScanKind,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScanKind {
    Qb,
    Moments,
}

enum Outcome {
    Pass,
    ChecksFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{}", text.trim_end()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::InvalidParameter(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn emit_scalar(cli: &Cli, name: &str, value: serde_json::Value, text: String) -> Result<Outcome, Error> {
    let s = match cli.format {
        Format::Json => serde_json::to_string_pretty(&json!({ name: value }))?,
        Format::Csv => format!("{name}\n{text}\n"),
        Format::Text => text,
    };
    emit(cli, &s)?;
    Ok(Outcome::Pass)
}

fn execute(cli: &Cli) -> Result<Outcome, Error> {
    let m = cli.m.unwrap_or(DEFAULT_BOUNDARY_GRID);
    match &cli.command {
        Command::Dirichlet { f, weight } => {
            let f = read_rational(f, false)?;
            let w = read_weight(weight)?;
            let rule = make_disk_rule(cli.nr, cli.ntheta)?;
            let v = dirichlet_area(&f, &w, &rule)?;
            if !v.skipped_nodes.is_empty() {
                eprintln!("warning: {} quadrature node(s) skipped at an infinite weight value", v.skipped_nodes.len());
            }
            emit_scalar(cli, "value", json!(v.value), format!("{:?}", v.value))
        }
        Command::Local { f, zeta } => {
            let f = read_rational(f, true)?;
            let v = local_dirichlet(&f, *zeta, cli.m.unwrap_or(2048))?;
            emit_scalar(cli, "value", json!(v.value), format!("{:?}", v.value))
        }
        Command::Pair { phi } => {
            let phi = read_rational(phi, true)?;
            let pair = pair_from_phi(&phi, m, cli.n.unwrap_or(256))?;
            emit(cli, &serde_json::to_string_pretty(&pair.to_json())?)?;
            Ok(Outcome::Pass)
        }
        Command::Fplus { f, phi } => {
            let n = cli.n.unwrap_or(DEFAULT_TRUNCATION);
            let f = rational_to_poly(&read_rational(f, false)?, n)?;
            let pair = pair_from_phi(&read_rational(phi, true)?, m, n.max(256))?;
            let g = f_plus(&f, &pair, n)?;
            emit(cli, &serde_json::to_string(&g)?)?;
            Ok(Outcome::Pass)
        }
        Command::Hbnorm { f, phi } => {
            let n = cli.n.unwrap_or(DEFAULT_TRUNCATION);
            let f = rational_to_poly(&read_rational(f, false)?, n)?;
            let pair = pair_from_phi(&read_rational(phi, true)?, m, n.max(256))?;
            let v = hb_norm_sq(&f, &pair)?;
            emit_scalar(cli, "value", json!(v), format!("{v:?}"))
        }
        Command::Bergman { weight, z } => {
            let w = read_weight(weight)?;
            let rule = make_disk_rule(cli.nr, cli.ntheta)?;
            let v = bergman_projection(&w, *z, &rule)?;
            emit_scalar(cli, "value", json!([v.re, v.im]), format!("{v}"))
        }
        Command::Berezin { weight, z } => {
            let w = read_weight(weight)?;
            let rule = make_disk_rule(cli.nr, cli.ntheta)?;
            let v = berezin(&w, *z, &rule)?;
            emit_scalar(cli, "value", json!(v), format!("{v:?}"))
        }
        Command::Verify { suite, measure } => {
            let suites = parse_suites(suite)?;
            let cfg = VerifyConfig {
                nr: cli.nr,
                ntheta: cli.ntheta,
                m: cli.m.unwrap_or(VerifyConfig::default().m),
                n: cli.n.unwrap_or(DEFAULT_TRUNCATION),
                tol: cli.tol,
                grid: cli.grid,
                seed: cli.seed,
                measure: measure.as_deref().map(read_measure).transpose()?,
            };
            let report = run(&suites, &cfg)?;
            emit(cli, &render_report(&report, cli.format)?)?;
            if cli.out.is_some() {
                for c in &report.checks {
                    eprintln!("{} {} (residual {:e}, tolerance {:e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.max_residual, c.tolerance);
                }
            }
            Ok(if report.pass { Outcome::Pass } else { Outcome::ChecksFailed })
        }
        Command::Scan { kind } => {
            let table = match kind {
                ScanKind::Qb => {
                    let rule = make_disk_rule(cli.nr, cli.ntheta)?;
                    let grid = polar_grid(0.9, cli.grid.0, cli.grid.1);
                    scan_qb(&QbScan::default(), &grid, &rule)?
                }
                ScanKind::Moments => scan_moments(&MomentScan::default())?,
            };
            emit(cli, &render_table(&table, cli.format)?)?;
            Ok(Outcome::Pass)
        }
    }
}

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("csv: {e}"))
}

fn render_report(report: &VerificationReport, format: Format) -> Result<String, Error> {
    match format {
        Format::Json | Format::Text => Ok(serde_json::to_string_pretty(report)?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["name", "max_residual", "tolerance", "pass", "elapsed_ms"]).map_err(csv_error)?;
            for c in &report.checks {
                w.write_record([
                    c.name.clone(),
                    format!("{:e}", c.max_residual),
                    format!("{:e}", c.tolerance),
                    c.pass.to_string(),
                    format!("{:.3}", c.elapsed_ms),
                ])
                .map_err(csv_error)?;
            }
            String::from_utf8(w.into_inner().map_err(csv_error)?).map_err(csv_error)
        }
    }
}

fn render_table(table: &ScanTable, format: Format) -> Result<String, Error> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(table)?),
        Format::Csv | Format::Text => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.columns).map_err(csv_error)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|x| format!("{x:e}"))).map_err(csv_error)?;
            }
            String::from_utf8(w.into_inner().map_err(csv_error)?).map_err(csv_error)
        }
    }
}
