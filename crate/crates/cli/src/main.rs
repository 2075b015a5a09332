use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use multischmidt::states::{acin_state, ghz_state, random_product, random_pure, w_state, AcinParameters};
use multischmidt::{DimensionProfile, PureState, SearchBudget, Settings};
use multischmidt_cli::{analyze, render_table, reproduce, statefile, StateFile};

const FORMAT_HELP: &str = "\
State files are JSON: {\"format\": \"multischmidt-state/1\", \"name\": ..., \"dims\": [N1, ..., Nm],
\"amplitudes\": [[re, im], ...], \"seed\": ...}. Amplitudes are row-major over (i1, ..., im) with
party 1 the slowest index. Norms within 1e-8 of 1 are accepted (renormalized with a warning
above 1e-10).";

#[derive(Parser)]
#[command(name = "multischmidt", version, about = "Multipartite Schmidt numbers, coefficients and EoF", after_help = FORMAT_HELP)]
struct Cli {
    /// Relative eigenvalue cutoff for ranks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for random states and ensemble searches.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Restarts per ensemble search.
    #[arg(long, global = true, default_value_t = 64)]
    restarts: usize,
    /// Iterations per restart.
    #[arg(long, global = true, default_value_t = 500)]
    iters: usize,
    /// Also write machine-readable output to this path.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    W,
    Ghz,
    Acin,
    Random,
    RandomProduct,
}

#[derive(Subcommand)]
enum Command {
    /// Write a state file.
    Gen {
        #[arg(value_enum)]
        family: Family,
        /// Number of parties (w, ghz).
        #[arg(long)]
        m: Option<usize>,
        /// Local dimension (ghz).
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Local dimensions, comma separated (random, random-product).
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        /// Five canonical-form weights, comma separated (acin).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambdas: Vec<f64>,
        /// Canonical-form phase in [0, pi] (acin).
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long)]
        name: Option<String>,
        /// Output path; standard output when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Analyze a state file.
    Analyze { input: PathBuf },
    /// Check the reference table; exits nonzero if any row fails.
    Reproduce,
}

fn settings(cli: &Cli) -> Result<Settings> {
    if !(cli.tol > 0.0 && cli.tol < 1.0) {
        bail!("--tol must lie in (0, 1), got {}", cli.tol);
    }
    Ok(Settings {
        rank_tol: cli.tol,
        budget: SearchBudget {
            restarts: cli.restarts,
            iterations: cli.iters,
            seed: cli.seed,
        },
    })
}

#[allow(clippy::too_many_arguments)]
fn generate(
    family: Family,
    m: Option<usize>,
    d: usize,
    dims: &[usize],
    lambdas: &[f64],
    theta: f64,
    seed: u64,
) -> Result<(PureState, String, Option<u64>)> {
    let need_m = || m.context("--m is required for this family");
    let need_dims = || -> Result<DimensionProfile> {
        if dims.is_empty() {
            bail!("--dims is required for this family");
        }
        Ok(DimensionProfile::new(dims.to_vec())?)
    };
    Ok(match family {
        Family::W => {
            let m = need_m()?;
            (w_state(m)?, format!("W_{m}"), None)
        }
        Family::Ghz => {
            let m = need_m()?;
            let name = if d == 2 { format!("GHZ_{m}") } else { format!("GHZ_{m}^({d})") };
            (ghz_state(m, d)?, name, None)
        }
        Family::Acin => {
            let l: [f64; 5] = lambdas
                .try_into()
                .map_err(|_| anyhow::anyhow!("--lambdas needs exactly five values"))?;
            (acin_state(&AcinParameters::new(l, theta)?)?, "acin".into(), None)
        }
        Family::Random => (random_pure(&need_dims()?, seed), "random".into(), Some(seed)),
        Family::RandomProduct => (random_product(&need_dims()?, seed), "random-product".into(), Some(seed)),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let settings = settings(&cli)?;
    match &cli.command {
        Command::Gen { family, m, d, dims, lambdas, theta, name, out } => {
            let (state, default_name, seed) = generate(*family, *m, *d, dims, lambdas, *theta, cli.seed)?;
            let file = StateFile::from_state(Some(name.clone().unwrap_or(default_name)), &state, seed);
            let summary = format!("dims {:?}, norm {:.12}", file.dims, state.amplitudes().norm());
            match out {
                Some(path) => {
                    statefile::write(path, &file)?;
                    println!("wrote {}: {summary}", path.display());
                }
                None => {
                    print!("{}", file.to_json());
                    eprintln!("{summary}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze { input } => {
            let file = StateFile::read(input)?;
            let (state, warning) = file.to_state()?;
            if let Some(w) = &warning {
                eprintln!("warning: {w}");
            }
            let (report, elapsed) = analyze(&state, file.name.clone(), warning.into_iter().collect(), &settings)?;
            print!("{}", render_table(&report, elapsed));
            if let Some(path) = &cli.json {
                std::fs::write(path, report.to_json()).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Reproduce => {
            let rows = reproduce::run(&settings);
            print!("{}", reproduce::render(&rows));
            if let Some(path) = &cli.json {
                let mut text = serde_json::to_string_pretty(&rows)?;
                text.push('\n');
                std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            let failed: Vec<&str> = rows.iter().filter(|r| !r.pass).map(|r| r.quantity.as_str()).collect();
            if failed.is_empty() {
                println!("all {} rows pass", rows.len());
                Ok(ExitCode::SUCCESS)
            } else {
                println!("{} of {} rows fail: {}", failed.len(), rows.len(), failed.join(", "));
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
