//! `klcone`: KL polynomials, W-graphs, Specht matrices, invariant cones,
//! trace optimization and group-ring bases from the command line.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 size cap exceeded,
//! 3 verification failed (cone strategy, basis check), 4 solver did not
//! converge.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use klcone::tableaux::Partition;

use config::{parse_lambda, Format, GroupArgs, RunConfig};

#[derive(thiserror::Error, Debug)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Failed(_) | CliError::Io(_) => 1,
            CliError::Cap(_) => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    VerificationFailed,
    NotConverged,
}

/// What a command produced: the artifact, a human summary for stderr and the
/// exit status.
pub struct Outcome {
    pub body: String,
    pub summary: Vec<String>,
    pub status: Status,
}

#[derive(Parser, Debug)]
#[command(name = "klcone", version, about = "Kazhdan-Lusztig bases, Specht modules and cone-constrained trace optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for parallel stages
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the artifact here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// KL polynomials h_{y,x} of a whole group (CSV columns y,x,h)
    Kl {
        #[command(flatten)]
        group: GroupArgs,
        /// Largest n for type A; dihedral groups are capped at order 2·7!
        #[arg(long, default_value_t = 7)]
        cap: usize,
    },
    /// W-graph of a Specht module as DOT or JSON
    Wgraph {
        #[arg(long, value_parser = parse_lambda)]
        lambda: Partition,
        #[arg(long, value_enum, default_value = "parabolic")]
        method: commands::Method,
        /// Largest n for the full KL method
        #[arg(long, default_value_t = 7)]
        cap: usize,
    },
    /// Polytabloid operators, Gram matrix and both base changes (exact JSON)
    Specht {
        #[arg(long, value_parser = parse_lambda)]
        lambda: Partition,
    },
    /// Invariant cone computations
    Cone {
        #[command(subcommand)]
        action: ConeAction,
    },
    /// Minimize or maximize Tr(AᵗGA) over the feasible base changes
    Optimize(commands::OptimizeArgs),
    /// Exact KKT residual of the KL base change for λ = (n,1)
    Kkt {
        #[arg(long)]
        n: usize,
    },
    /// Hit-and-run sampling of the feasible region
    Probe {
        #[arg(long, value_parser = parse_lambda)]
        lambda: Partition,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Group-ring bases: dihedral recursion, feasibility checks, local search
    Groupring {
        #[command(subcommand)]
        action: GroupringAction,
    },
}

#[derive(Subcommand, Debug)]
enum ConeAction {
    /// Run the minimal-cone strategy; exit 3 if a tableau stays unreached
    Verify(commands::ConeArgs),
}

#[derive(Subcommand, Debug)]
enum GroupringAction {
    /// The recursive basis of I2(m), m even
    Dihedral {
        #[arg(long)]
        m: usize,
        /// Exchange the roles of s and t
        #[arg(long)]
        mirror: bool,
    },
    /// The KL basis at v = 1
    Kl {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Check a basis (default: KL at v = 1); exit 3 if infeasible
    Check {
        #[command(flatten)]
        group: GroupArgs,
        /// Basis JSON file
        #[arg(long)]
        basis: Option<PathBuf>,
        /// Drop the condition A_{w0} = Σ y
        #[arg(long)]
        no_longest: bool,
    },
    /// Local search from KL at v = 1; exit 4 if the budget runs out first
    Search {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_longest: bool,
    },
}

fn dispatch(cli: Cli) -> Result<(Outcome, RunConfig), CliError> {
    let mut cfg = RunConfig {
        command: String::new(),
        format: cli.format,
        out: cli.out.clone(),
        threads: cli.threads,
        seed: 0,
        tol: None,
        budget: None,
        starts: None,
    };
    match &cli.command {
        Command::Optimize(a) => {
            cfg.seed = a.seed;
            cfg.tol = a.tol;
            cfg.budget = a.budget;
            cfg.starts = Some(a.starts);
        }
        Command::Cone { action: ConeAction::Verify(a) } => cfg.budget = a.budget,
        Command::Probe { seed, tol, .. } => {
            cfg.seed = *seed;
            cfg.tol = Some(*tol);
        }
        Command::Groupring { action: GroupringAction::Search { budget, seed, .. } } => {
            cfg.seed = *seed;
            cfg.budget = Some(*budget);
        }
        _ => {}
    }
    cfg.command = format!("{:?}", cli.command).split([' ', '{', '(']).next().unwrap_or_default().to_lowercase();
    cfg.validate()?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let fmt = |default: Format, allowed: &[Format]| cfg.format.unwrap_or(default).require(allowed, &cfg.command);
    let outcome = match cli.command {
        Command::Kl { group, cap } => commands::kl(&group, cap, fmt(Format::Csv, &[Format::Csv, Format::Json])?),
        Command::Wgraph { lambda, method, cap } => {
            commands::wgraph(&lambda, method, cap, fmt(Format::Dot, &[Format::Dot, Format::Json])?)
        }
        Command::Specht { lambda } => {
            fmt(Format::Json, &[Format::Json])?;
            commands::specht(&lambda)
        }
        Command::Cone { action: ConeAction::Verify(a) } => {
            fmt(Format::Json, &[Format::Json])?;
            commands::cone_verify(&a)
        }
        Command::Optimize(a) => {
            fmt(Format::Json, &[Format::Json])?;
            commands::optimize(&a)
        }
        Command::Kkt { n } => {
            fmt(Format::Json, &[Format::Json])?;
            commands::kkt(n)
        }
        Command::Probe { lambda, samples, seed, tol } => {
            fmt(Format::Json, &[Format::Json])?;
            commands::probe(&lambda, samples, seed, tol)
        }
        Command::Groupring { action } => {
            fmt(Format::Json, &[Format::Json])?;
            match action {
                GroupringAction::Dihedral { m, mirror } => commands::gr_dihedral(m, mirror),
                GroupringAction::Kl { group } => commands::gr_kl(&group),
                GroupringAction::Check { group, basis, no_longest } => commands::gr_check(&group, basis.as_deref(), !no_longest),
                GroupringAction::Search { group, budget, seed, no_longest } => {
                    commands::gr_search(&group, budget, seed, !no_longest)
                }
            }
        }
    }?;
    Ok((outcome, cfg))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (outcome, cfg) = match dispatch(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code());
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &outcome.body),
        None => std::io::stdout().lock().write_all(outcome.body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    for line in &outcome.summary {
        eprintln!("{line}");
    }
    ExitCode::from(match outcome.status {
        Status::Ok => 0,
        Status::VerificationFailed => 3,
        Status::NotConverged => 4,
    })
}
