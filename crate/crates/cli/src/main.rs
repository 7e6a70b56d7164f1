//! `yamabe`: reproducible JSON reports over the yamabe-core library.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 for invalid input.

mod commands;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::{MassFluxArgs, Normal, Profile, SolveArgs};

#[derive(Parser, Debug)]
#[command(name = "yamabe", version, about = "Exact constants, Pohozaev fluxes and linearized solves for boundary Yamabe blow-up")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Default directory for reports, written as `<subcommand>.json`.
    #[arg(long, global = true, env = "YAMABE_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Seed for randomized cross-checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Significant digits of floating-point output.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=17))]
    precision: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recompute the golden constants and compare them exactly with a table.
    VerifyConstants {
        /// Dimensions to check; repeat or comma-separate.
        #[arg(long = "dim", value_delimiter = ',', default_values_t = [4usize, 5, 6])]
        dims: Vec<usize>,
        /// JSON table of {dim, name, expected, anchor} rows replacing the built-in one.
        #[arg(long)]
        expected: Option<PathBuf>,
    },
    /// Exact maximizer of the lower-bound polynomial.
    Optimize {
        #[arg(long, default_value_t = 5)]
        dim: usize,
    },
    /// Local Pohozaev identity on half-balls.
    Pohozaev {
        #[arg(long, default_value_t = 5)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = Profile::Bubble)]
        profile: Profile,
        /// Radii; repeat or comma-separate.
        #[arg(long = "rho", value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        rhos: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Normal::Inward)]
        normal: Normal,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Mass flux of a metric jet with an exact/Monte Carlo cross-check.
    MassFlux {
        #[arg(long, default_value_t = 5)]
        dim: usize,
        /// Jet JSON file; a seeded random conformal jet when absent.
        #[arg(long)]
        jet: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Constant regular part of the Green's function.
        #[arg(long)]
        phi_constant: Option<f64>,
        /// Monte Carlo samples per replicate; 0 skips the cross-check.
        #[arg(long, default_value_t = 1 << 16)]
        mc_samples: usize,
        #[arg(long, default_value_t = 8)]
        mc_replicates: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Reduced linearized boundary problem with its diagnostics.
    SolveLinearized {
        #[arg(long, default_value_t = 5)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long = "R", default_value_t = 40.0)]
        r_max: f64,
        #[arg(long = "T", default_value_t = 40.0)]
        t_max: f64,
        #[arg(long, default_value_t = 129)]
        nr: usize,
        #[arg(long, default_value_t = 129)]
        nt: usize,
        #[arg(long, allow_hyphen_values = true)]
        a1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a2: Option<f64>,
        #[arg(long, default_value_t = 4.5)]
        stretch: f64,
        /// Integer diagonal of the trace-free tensor, comma-separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        pi: Option<Vec<i64>>,
        /// Dump the grid profile as `r,t,u` rows.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyConstants { .. } => "verify-constants",
            Command::Optimize { .. } => "optimize",
            Command::Pohozaev { .. } => "pohozaev",
            Command::MassFlux { .. } => "mass-flux",
            Command::SolveLinearized { .. } => "solve-linearized",
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let name = cli.command.name();
    let digits = cli.precision as usize;
    let (value, passed) = match &cli.command {
        Command::VerifyConstants { dims, expected } => {
            let table = match expected {
                Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
                None => verify::DEFAULT_TABLE.to_string(),
            };
            let rep = verify::verify(dims, &verify::parse_table(&table)?)?;
            for row in rep.rows.iter().filter(|r| r.kind == verify::MatchKind::Fail) {
                eprintln!(
                    "FAIL N={} {}: expected {:?}, computed {:?} ({})",
                    row.dim,
                    row.name,
                    row.expected,
                    row.computed,
                    row.diagnosis.as_deref().unwrap_or("")
                );
            }
            let ok = rep.failures == 0;
            (output::envelope(name, cli.seed, ok, &rep, digits)?, ok)
        }
        Command::Optimize { dim } => {
            let rep = commands::optimize(*dim)?;
            (output::envelope(name, cli.seed, true, &rep, digits)?, true)
        }
        Command::Pohozaev {
            dim,
            profile,
            rhos,
            normal,
            tol,
        } => {
            anyhow::ensure!(*tol > 0.0, "--tol must be positive");
            let (rep, ok) = commands::pohozaev(*dim, *profile, rhos, *normal, *tol)?;
            (output::envelope(name, cli.seed, ok, &rep, digits)?, ok)
        }
        Command::MassFlux {
            dim,
            jet,
            rho,
            phi_constant,
            mc_samples,
            mc_replicates,
            tol,
        } => {
            anyhow::ensure!(*tol > 0.0, "--tol must be positive");
            let (rep, ok) = commands::mass_flux_cmd(&MassFluxArgs {
                dim: *dim,
                jet: jet.as_deref(),
                seed: cli.seed,
                rho: *rho,
                phi_constant: *phi_constant,
                samples: *mc_samples,
                replicates: *mc_replicates,
                tol: *tol,
            })?;
            (output::envelope(name, cli.seed, ok, &rep, digits)?, ok)
        }
        Command::SolveLinearized {
            dim,
            eps,
            r_max,
            t_max,
            nr,
            nt,
            a1,
            a2,
            stretch,
            pi,
            csv,
        } => {
            let (rep, field, ok) = commands::solve(&SolveArgs {
                dim: *dim,
                eps: *eps,
                r_max: *r_max,
                t_max: *t_max,
                nr: *nr,
                nt: *nt,
                a1: *a1,
                a2: *a2,
                stretch: *stretch,
                pi_diag: pi.clone(),
            })?;
            if let Some(path) = csv {
                commands::write_field_csv(&field, path)?;
            }
            (output::envelope(name, cli.seed, ok, &rep, digits)?, ok)
        }
    };
    let dest = output::destination(cli.out.as_deref(), cli.out_dir.as_deref(), name);
    output::emit(&value, dest.as_deref())?;
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
