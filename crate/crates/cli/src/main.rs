use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;
use stehbein::fixtures::{build_fixture, FixtureSpec, FIXTURE_NAMES};
use stehbein::involution::build_jn;
use stehbein::io::{curvature_to_value, fixture_to_value, jn_to_value, load_geometry, load_input, to_pretty_json};
use stehbein::verify::{known_checks, run_curvature, run_verify, ConnectionChoice, VerificationReport, VerifyOptions};
use stehbein::Error;

#[derive(Parser)]
#[command(name = "stehbein", version, about = "Verify frame-based noncommutative differential calculi over M_N(C)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonOpts {
    /// Residual tolerance.
    #[arg(long, env = "STEHBEIN_TOL", default_value_t = 1e-9)]
    tol: f64,
    /// Highest order for J^(n) and D_n checks.
    #[arg(long, default_value_t = 4)]
    max_order: usize,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the consistency and reality checks on a geometry or braiding file.
    Verify {
        file: PathBuf,
        /// Comma-separated check groups (default: all applicable).
        #[arg(long)]
        checks: Option<String>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Compute the curvature of a connection on a geometry.
    Curvature {
        file: PathBuf,
        #[arg(long, value_enum)]
        connection: ConnectionArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "STEHBEIN_TOL", default_value_t = 1e-9)]
        tol: f64,
    },
    /// Check the braid relation, Yang-Baxter, unitarity and J^(n) involutivity.
    BraidCheck {
        file: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Build the involution tensor J^(n).
    Jn {
        file: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "STEHBEIN_TOL", default_value_t = 1e-9)]
        tol: f64,
    },
    /// Write a built-in geometry or braiding file.
    Fixture {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(FIXTURE_NAMES))]
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Frame dimension for `phase-twist` and `random`.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Twist angle for `su2-phase-twist`.
        #[arg(long)]
        phase: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConnectionArg {
    /// ω or χ from the input file.
    File,
    D0,
    TorsionFree,
}

impl From<ConnectionArg> for ConnectionChoice {
    fn from(c: ConnectionArg) -> Self {
        match c {
            ConnectionArg::File => ConnectionChoice::File,
            ConnectionArg::D0 => ConnectionChoice::D0,
            ConnectionArg::TorsionFree => ConnectionChoice::TorsionFree,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let internal = e.chain().any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::Internal(_))));
            ExitCode::from(if internal { 1 } else { 2 })
        }
    }
}

fn write_json(path: Option<&Path>, v: &Value) -> anyhow::Result<()> {
    let text = to_pretty_json(v);
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish_report(report: &VerificationReport, path: Option<&Path>) -> anyhow::Result<bool> {
    print!("{}", report.human_summary());
    if let Some(p) = path {
        let v = serde_json::to_value(report)?;
        write_json(Some(p), &v)?;
    }
    Ok(report.all_passed())
}

fn options(common: &CommonOpts) -> VerifyOptions {
    VerifyOptions {
        tol: common.tol,
        checks: None,
        max_order: common.max_order,
        seed: common.seed,
    }
}

fn run(cmd: Command) -> anyhow::Result<bool> {
    match cmd {
        Command::Verify { file, checks, common } => {
            let mut opts = options(&common);
            if let Some(list) = checks {
                if let Err(e) = opts.select(&list) {
                    let known = known_checks().collect::<Vec<_>>().join(", ");
                    anyhow::bail!("{e} (known checks: {known})");
                }
            }
            let input = load_input(&file, opts.tol)?;
            let report = run_verify(&input, &opts)?;
            finish_report(&report, common.report.as_deref())
        }
        Command::BraidCheck { file, common } => {
            let mut opts = options(&common);
            opts.select("braid,yb,sigma-unitarity,block-unambiguity,block-braid,jn,jn-words")?;
            let input = load_input(&file, opts.tol)?;
            let report = run_verify(&input, &opts)?;
            finish_report(&report, common.report.as_deref())
        }
        Command::Curvature { file, connection, out, tol } => {
            let geom = load_geometry(&file, tol)?;
            let data = run_curvature(&geom, connection.into())?;
            eprintln!("R centrality residual {:.3e}", data.centrality_residual);
            write_json(out.as_deref(), &curvature_to_value(&data))?;
            Ok(true)
        }
        Command::Jn { file, order, out, tol } => {
            let b = load_input(&file, tol)?.braiding()?;
            let j = build_jn(&b, order)?;
            write_json(out.as_deref(), &jn_to_value(order, &j))?;
            Ok(true)
        }
        Command::Fixture { name, out, seed, n, phase } => {
            let mut spec = FixtureSpec::new(&name);
            spec.seed = seed;
            spec.n = n;
            if let Some(p) = phase {
                spec.phase = p;
            }
            let fixture = build_fixture(&spec)?;
            write_json(Some(&out), &fixture_to_value(&fixture))?;
            Ok(true)
        }
    }
}
