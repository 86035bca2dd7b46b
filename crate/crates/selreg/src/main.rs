//! Thin command-line front end over the `selreg` library.
//!
//! Exit codes: 0 on success, 1 for runtime failures (I/O, numerics), 2 for
//! usage, config or dataset validation problems.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use selreg::config::ExperimentConfig;
use selreg::data::{generate_synthetic, load_csv, SyntheticSpec};
use selreg::experiment::{run_experiment, score_features, ScoreRequest};
use selreg::report::{write_atomic, write_csv};
use selreg::Error;

#[derive(Parser)]
#[command(name = "selreg", version, about = "Feature-selection and regression benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured experiment grid and write its artifacts.
    Run {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output directory for results.json, table.md and charts.
        #[arg(long)]
        out: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Fit selectors once on the full training split (leaky protocol).
        #[arg(long)]
        global_selection: bool,
    },
    /// Generate a synthetic regression CSV with known relevant features.
    Generate {
        /// Number of rows.
        #[arg(long)]
        n: usize,
        /// Number of features; must match the coefficient count.
        #[arg(long)]
        d: usize,
        /// Comma-separated true coefficients, zeros for irrelevant features.
        #[arg(long)]
        coef: String,
        /// Standard deviation of the Gaussian target noise.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output CSV path; the true support lands in a .support.json sidecar.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score each feature of a CSV against its target and print a table.
    Score {
        #[arg(long)]
        data: PathBuf,
        /// Target column name.
        #[arg(long)]
        target: String,
        /// One of: f-regression, mutual-info, chi2, rfe, pca.
        #[arg(long)]
        method: String,
        /// Features to keep (rfe).
        #[arg(long)]
        k: Option<usize>,
        /// Discretization bins (mutual-info, chi2).
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Validation and usage problems exit 2; runtime failures exit 1.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_)
        | Error::NoConvergence { .. }
        | Error::RankDeficient { .. }
        | Error::NotSymmetric { .. }
        | Error::InsufficientRows { .. }
        | Error::Shape(_) => 1,
        _ => 2,
    }
}

fn dispatch(command: Command) -> selreg::Result<()> {
    match command {
        Command::Run {
            config,
            out,
            seed,
            global_selection,
        } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if global_selection {
                config.global_selection = true;
            }
            let file = run_experiment(&config, &out)?;
            println!(
                "wrote {} result cells to {} (seed {}, config {})",
                file.results.len(),
                out.display(),
                file.metadata.seed,
                &file.metadata.config_digest[..12]
            );
            Ok(())
        }
        Command::Generate {
            n,
            d,
            coef,
            noise,
            seed,
            out,
        } => {
            let coefficients = parse_coefficients(&coef)?;
            if coefficients.len() != d {
                return Err(Error::Param(format!(
                    "--d is {d} but --coef lists {} values",
                    coefficients.len()
                )));
            }
            let (ds, support) = generate_synthetic(&SyntheticSpec {
                n,
                true_coefficients: coefficients,
                noise_sd: noise,
                seed,
            })?;
            write_csv(&ds, &out)?;
            let sidecar = out.with_extension("support.json");
            let names: Vec<&str> = support
                .iter()
                .map(|&i| ds.feature_names()[i].as_str())
                .collect();
            let body = serde_json::json!({
                "support_indices": support,
                "support_names": names,
                "seed": seed,
            });
            write_atomic(&sidecar, format!("{body:#}\n").as_bytes())?;
            println!(
                "wrote {} rows x {} features to {} (support {:?})",
                ds.n(),
                ds.d(),
                out.display(),
                names
            );
            Ok(())
        }
        Command::Score {
            data,
            target,
            method,
            k,
            bins,
            seed,
        } => {
            let request = ScoreRequest::parse(&method, bins, k)?;
            if !data.exists() {
                return Err(Error::Param(format!("no such file: {}", data.display())));
            }
            let ds = load_csv(&data, &target)?;
            let scores = score_features(&ds, &request, seed)?;
            let width = scores
                .iter()
                .map(|(name, _)| name.len())
                .max()
                .unwrap_or(8)
                .max(8);
            for (name, value) in scores {
                println!("{name:<width$}  {value:.6}");
            }
            Ok(())
        }
    }
}

fn parse_coefficients(text: &str) -> selreg::Result<Vec<f64>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| Error::Param(format!("bad coefficient '{}'", part.trim())))
        })
        .collect()
}
