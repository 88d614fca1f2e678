//! `wcrisk`: evaluate nominal and worst-case risk, solve robust portfolio
//! problems, and run the oracle verification suites.
//!
//! Results go to stdout as JSON or TSV; diagnostics go to stderr. Exit
//! codes: 0 success, 2 malformed input, 3 infeasible problem, 4 internal
//! certificate or verification failure.

use clap::{Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use wcrisk_cli::formats::{
    parse_distribution, parse_spectrum_arg, read_json, MomentsFile, ProblemFile, ReturnsTable,
    SpectrumSetFile,
};
use wcrisk_cli::{verify, CliError};
use wcrisk_core::portfolio;
use wcrisk_core::worstcase::{self, MomentPair};
use wcrisk_core::SpectrumSet;

#[derive(Parser)]
#[command(
    name = "wcrisk",
    version,
    about = "Worst-case risk measures under two-moment ambiguity and robust portfolio selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Nominal and worst-case risk of univariate losses.
    Risk {
        #[command(subcommand)]
        command: RiskCommand,
    },
    /// Robust portfolio optimization.
    Portfolio {
        #[command(subcommand)]
        command: PortfolioCommand,
    },
    /// Oracle verification suites (TSV report on stdout).
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: verify::Suite,
    },
}

#[derive(Subcommand)]
enum RiskCommand {
    /// Spectral risk of a discrete distribution under a fixed spectrum.
    Eval {
        /// Distribution file: {"atoms": [...], "probs": [...]}.
        #[arg(long)]
        dist: PathBuf,
        /// Spectrum: cvar:EPS, exp:K, power:GAMMA, uniform, or a JSON file.
        #[arg(long)]
        spectrum: String,
    },
    /// Worst-case risk over all distributions with the given moments.
    WorstCase {
        #[arg(long)]
        mean: f64,
        #[arg(long)]
        std: f64,
        /// Spectrum: shorthand or JSON file.
        #[arg(long, conflicts_with = "set", required_unless_present = "set")]
        spectrum: Option<String>,
        /// Spectrum set file: {"members": [descriptor, ...]}.
        #[arg(long)]
        set: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PortfolioCommand {
    /// Solve a robust portfolio problem file.
    Solve {
        #[arg(long)]
        problem: PathBuf,
        /// Certified optimality gap at termination.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Sweep tail probabilities and print one TSV row per point.
    Frontier {
        #[arg(long)]
        problem: PathBuf,
        /// Comma-separated tail probabilities, e.g. 0.05,0.1,0.5.
        #[arg(long, value_delimiter = ',')]
        eps_grid: Vec<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Estimate mean and covariance from a returns CSV.
    Estimate {
        /// CSV with a header of asset names, one observation per row.
        #[arg(long)]
        returns: PathBuf,
    },
}

#[derive(Serialize)]
struct RiskReport {
    value: f64,
    kappa: f64,
    equivalent_epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    attaining_spectrum_index: Option<usize>,
}

#[derive(Serialize)]
struct EvalReport {
    value: f64,
    mean: f64,
    kappa: f64,
    equivalent_epsilon: f64,
}

#[derive(Serialize)]
struct SolveReport {
    x: Vec<f64>,
    objective: f64,
    kappa: f64,
    equivalent_epsilon: f64,
    gap: f64,
    iterations: usize,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Risk { command } => risk(command),
        Command::Portfolio { command } => portfolio_cmd(command),
        Command::Verify { suite } => verify::run(suite),
    }
}

fn emit<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string(value).map_err(CliError::internal)?;
    println!("{text}");
    Ok(())
}

fn risk(command: RiskCommand) -> Result<(), CliError> {
    match command {
        RiskCommand::Eval { dist, spectrum } => {
            let d = parse_distribution(&dist)?;
            let spec = parse_spectrum_arg(&spectrum)?;
            let value = d
                .spectral_risk(&spec)
                .map_err(|e| CliError::malformed(e.to_string()))?;
            let eps = worstcase::equivalent_epsilon(&spec).map_err(CliError::internal)?;
            emit(&EvalReport {
                value,
                mean: d.mean(),
                kappa: (1.0 / eps - 1.0).max(0.0).sqrt(),
                equivalent_epsilon: eps,
            })
        }
        RiskCommand::WorstCase {
            mean,
            std,
            spectrum,
            set,
        } => {
            let m = MomentPair::new(mean, std)
                .map_err(|e| CliError::malformed(e.to_string()))?;
            let result = match (spectrum, set) {
                (Some(arg), None) => {
                    let spec = parse_spectrum_arg(&arg)?;
                    let mut r = worstcase::wcsrm(&m, &spec).map_err(CliError::internal)?;
                    // A single spectrum has no meaningful member index.
                    r.attaining_spectrum_index = 0;
                    RiskReport {
                        value: r.value,
                        kappa: r.kappa,
                        equivalent_epsilon: r.equivalent_epsilon,
                        attaining_spectrum_index: None,
                    }
                }
                (None, Some(path)) => {
                    let file: SpectrumSetFile = read_json(&path)?;
                    let members = file
                        .members
                        .into_iter()
                        .map(|s| s.into_spectrum())
                        .collect::<Result<Vec<_>, _>>()?;
                    let set = SpectrumSet::new(members)
                        .map_err(|e| CliError::malformed(e.to_string()))?;
                    let r = worstcase::wclicrm(&m, &set).map_err(CliError::internal)?;
                    RiskReport {
                        value: r.value,
                        kappa: r.kappa,
                        equivalent_epsilon: r.equivalent_epsilon,
                        attaining_spectrum_index: Some(r.attaining_spectrum_index),
                    }
                }
                _ => unreachable!("clap enforces exactly one of --spectrum/--set"),
            };
            emit(&result)
        }
    }
}

fn portfolio_cmd(command: PortfolioCommand) -> Result<(), CliError> {
    match command {
        PortfolioCommand::Solve { problem, tol } => {
            let file: ProblemFile = read_json(&problem)?;
            let loaded = file.load()?;
            let eps = worstcase::equivalent_epsilon_set(&loaded.set).map_err(CliError::internal)?;
            let sol = match &loaded.vertices {
                Some(vertices) if vertices.len() > 1 => {
                    portfolio::solve_polytopic(&loaded.polytope, vertices, &loaded.set, tol)
                        .map_err(CliError::from_portfolio)?
                }
                Some(vertices) if vertices.len() == 1 => {
                    portfolio::solve(&loaded.polytope, &vertices[0], &loaded.set, tol)
                        .map_err(CliError::from_portfolio)?
                }
                _ => portfolio::solve(&loaded.polytope, &loaded.moments, &loaded.set, tol)
                    .map_err(CliError::from_portfolio)?,
            };
            emit(&SolveReport {
                x: sol.x,
                objective: sol.objective,
                kappa: sol.kappa,
                equivalent_epsilon: eps,
                gap: sol.gap,
                iterations: sol.iterations,
            })
        }
        PortfolioCommand::Frontier {
            problem,
            eps_grid,
            tol,
        } => {
            if eps_grid.is_empty() {
                return Err(CliError::malformed("--eps-grid needs at least one value".into()));
            }
            let file: ProblemFile = read_json(&problem)?;
            let loaded = file.load()?;
            let points =
                portfolio::frontier(&loaded.polytope, &loaded.moments, &eps_grid, tol)
                    .map_err(CliError::from_portfolio)?;
            let n = loaded.polytope.dim();
            let mut header = String::from("epsilon\tkappa\tobjective\tgap\titerations");
            for i in 0..n {
                header.push_str(&format!("\tx{i}"));
            }
            println!("{header}");
            for p in points {
                let mut row = format!(
                    "{}\t{}\t{}\t{}\t{}",
                    p.epsilon, p.kappa, p.objective, p.gap, p.iterations
                );
                for v in &p.x {
                    row.push_str(&format!("\t{v}"));
                }
                println!("{row}");
            }
            Ok(())
        }
        PortfolioCommand::Estimate { returns } => {
            let table = ReturnsTable::from_csv(&returns)?;
            let mm = table.estimate_moments()?;
            let n = mm.dim();
            let sigma: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| mm.cov()[(i, j)]).collect())
                .collect();
            emit(&MomentsFile {
                mu: mm.mean().as_slice().to_vec(),
                sigma,
            })
        }
    }
}
