use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use specbounds::bounds::{relaxed_weighted_bounds, verify_bound, weighted_window_bounds, BoundRecord, Window};
use specbounds::campaign::{run_campaign, CampaignConfig, Suite};
use specbounds::inspect::{inspect, render_text};
use specbounds::io::{read_matrix, read_problem, write_matrix};
use specbounds::random::{generate, stream, RandomModel};
use specbounds::secular::solve_secular;
use specbounds::Result;

#[derive(Parser)]
#[command(
    name = "specbounds",
    version,
    about = "Eigenvalue bounds and majorization checks for Hermitian matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print spectra, bounds and majorization reports for a matrix file.
    Inspect {
        file: PathBuf,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run randomized property suites.
    Campaign {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 2)]
        nmin: usize,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        /// Comma-separated suite names; all suites when omitted.
        #[arg(long, value_delimiter = ',')]
        suites: Option<Vec<String>>,
        /// Per-suite tolerance, e.g. `--tolerance interlacing=1e-8`.
        #[arg(long = "tolerance", value_name = "SUITE=TOL")]
        tolerances: Vec<String>,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Solve a secular equation from a problem file.
    Secular {
        file: PathBuf,
        /// Also bound the window sum `μ_L + ... + μ_R`.
        #[arg(long, num_args = 2, value_names = ["L", "R"])]
        window: Option<Vec<usize>>,
    },
    /// Write a random matrix file.
    Generate {
        #[arg(long)]
        model: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated non-increasing spectrum for `prescribed_spectrum`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        spectrum: Option<Vec<f64>>,
    },
}

#[derive(Serialize)]
struct SecularOutput {
    poles: Vec<f64>,
    weights: Vec<f64>,
    roots: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    bounds: Vec<BoundRecord>,
}

fn parse_tolerances(items: &[String]) -> Result<Vec<(Suite, f64)>> {
    items
        .iter()
        .map(|item| {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| specbounds::Error::Config(format!("expected SUITE=TOL, got `{item}`")))?;
            let tol = value
                .parse()
                .map_err(|_| specbounds::Error::Config(format!("bad tolerance `{value}`")))?;
            Ok((Suite::from_name(name.trim())?, tol))
        })
        .collect()
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Inspect { file, json } => {
            let report = inspect(&read_matrix(&file)?)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", render_text(&report));
            }
            Ok(true)
        }
        Command::Campaign {
            seed,
            trials,
            nmin,
            nmax,
            suites,
            tolerances,
            json,
        } => {
            let suites = match suites {
                Some(names) => names
                    .iter()
                    .map(|s| Suite::from_name(s.trim()))
                    .collect::<Result<_>>()?,
                None => Suite::ALL.to_vec(),
            };
            let config = CampaignConfig {
                seed,
                trials,
                n_range: [nmin, nmax],
                suites,
                tolerance_overrides: parse_tolerances(&tolerances)?.into_iter().collect(),
            };
            let report = run_campaign(&config)?;
            for s in &report.suites {
                println!(
                    "{:<12} {:>5}/{:<5} worst relative slack {:+.3e}  {}",
                    s.suite.name(),
                    s.passed,
                    s.trials,
                    s.worst_relative_slack,
                    if s.failed == 0 { "PASS" } else { "FAIL" }
                );
                for f in &s.failures {
                    println!(
                        "    trial {} n={}: {}",
                        f.trial,
                        f.n,
                        f.failure.as_deref().unwrap_or("")
                    );
                }
            }
            println!("wall time {:.2}s", report.wall_time_s);
            if let Some(path) = json {
                fs::write(path, report.to_json() + "\n")?;
            }
            Ok(report.all_pass)
        }
        Command::Secular { file, window } => {
            let prob = read_problem(&file)?;
            let roots = solve_secular(&prob);
            let mut bounds = Vec::new();
            if let Some(w) = window {
                let w = Window::new(w[0], w[1], prob.len())?;
                let actual = roots.window_sum(w.ell, w.r);
                let scale = prob.len() as f64 * prob.spread();
                for iv in [weighted_window_bounds(&prob, w)?, relaxed_weighted_bounds(&prob, w)?] {
                    bounds.push(BoundRecord::new(&iv, w, actual, &verify_bound(&iv, actual, scale)));
                }
            }
            let pass = bounds.iter().all(|b| b.pass);
            let out = SecularOutput {
                poles: prob.poles().to_vec(),
                weights: prob.weights().to_vec(),
                roots: roots.roots,
                bounds,
            };
            println!("{}", serde_json::to_string_pretty(&out).expect("output serializes"));
            Ok(pass)
        }
        Command::Generate {
            model,
            n,
            seed,
            out,
            spectrum,
        } => {
            let model = RandomModel::from_name(&model, spectrum)?;
            let a = generate(&model, n, &mut stream(seed, 0))?;
            write_matrix(&out, &a)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
