use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use elegance::analyze::{json_path, run_analyze};
use elegance::headless::{read_problem, run_batch, run_headless, write_log};
use elegance::service::{self, load_problem_dir, AppState};
use elegance_core::problem::{generate_fixture, save_problem, ReferenceScale};
use elegance_core::{DesignerSpec, EpisodeConfig};

#[derive(Parser)]
#[command(name = "elegance", version, about = "Interactive evolution of elegant class designs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run episodes with a simulated designer and write JSONL logs.
    Evolve {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        pop: usize,
        #[arg(long = "max-gen", default_value_t = 1000)]
        max_gen: usize,
        #[arg(long, default_value_t = 10)]
        interval: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// constant:N, random:SEED or purist:{nac,ec,iu,atmr}
        #[arg(long, value_parser = parse_designer)]
        designer: DesignerSpec,
        /// Log file, or output directory when --batch is given.
        #[arg(long)]
        out: PathBuf,
        /// Run this many episodes with consecutive seeds starting at --seed.
        #[arg(long)]
        batch: Option<u64>,
        #[arg(long)]
        mutation_rate: Option<f64>,
        #[arg(long, default_value_t = 0.9)]
        crossover_rate: f64,
        #[arg(long, default_value_t = 1)]
        elitism: usize,
    },
    /// Serve the interactive session API on localhost.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of problem JSON files.
        #[arg(long)]
        problems: PathBuf,
        /// Directory for finished session logs.
        #[arg(long, default_value = "logs")]
        logs: PathBuf,
    },
    /// Correlate rewards with elegance values across episode logs.
    Analyze {
        /// Glob pattern, e.g. "logs/*.jsonl"
        #[arg(long)]
        logs: String,
        /// TSV output; the JSON report is written to <out>.json
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic problem file.
    Fixture {
        #[arg(long, value_enum, conflicts_with_all = ["attributes", "methods", "uses"])]
        scale: Option<Scale>,
        #[arg(long)]
        attributes: Option<usize>,
        #[arg(long)]
        methods: Option<usize>,
        #[arg(long)]
        uses: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Scale {
    Cbs,
    Gdp,
    Sc,
}

fn parse_designer(s: &str) -> Result<DesignerSpec, String> {
    s.parse()
}

fn main() -> Result<()> {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    match Cli::parse().command {
        Command::Evolve {
            problem,
            k,
            pop,
            max_gen,
            interval,
            seed,
            designer,
            out,
            batch,
            mutation_rate,
            crossover_rate,
            elitism,
        } => {
            let problem = Arc::new(read_problem(&problem)?);
            let config = EpisodeConfig {
                population_size: pop,
                class_count: k,
                max_generations: max_gen,
                mutation_rate,
                crossover_rate,
                elitism,
                interaction_interval: interval,
                seed,
            };
            match batch {
                Some(n) => {
                    let paths = run_batch(problem, &config, designer, n, &out)?;
                    eprintln!("wrote {} logs to {}", paths.len(), out.display());
                }
                None => {
                    let log = run_headless(problem, config, designer)?;
                    write_log(&out, &log)?;
                    eprintln!("wrote {}", out.display());
                }
            }
        }
        Command::Serve { port, problems, logs } => {
            let problems = load_problem_dir(&problems)?;
            if problems.is_empty() {
                bail!("no problem files found");
            }
            let state = AppState::new(problems, Some(logs));
            tokio::runtime::Runtime::new()?.block_on(service::serve(state, port))?;
        }
        Command::Analyze { logs, out } => {
            let report = run_analyze(&logs, &out)?;
            print!("{}", report.correlation.to_tsv());
            eprintln!("wrote {} and {}", out.display(), json_path(&out).display());
        }
        Command::Fixture {
            scale,
            attributes,
            methods,
            uses,
            seed,
            out,
        } => {
            let problem = match (scale, attributes, methods, uses) {
                (Some(s), ..) => match s {
                    Scale::Cbs => ReferenceScale::Cbs,
                    Scale::Gdp => ReferenceScale::Gdp,
                    Scale::Sc => ReferenceScale::Sc,
                }
                .fixture(seed),
                (None, Some(a), Some(m), Some(u)) => generate_fixture(a, m, u, seed)?,
                _ => bail!("give --scale or all of --attributes, --methods and --uses"),
            };
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            save_problem(&problem, BufWriter::new(file))?;
        }
    }
    Ok(())
}
