use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use walkrank::commands;
use walkrank::config::{PipelineConfig, CONFIG_ENV_VAR};
use walkrank::CliError;

/// Knowledge-graph node embeddings via random-walk sampling and skip-gram
/// training, with top-K cosine link ranking and a logistic-regression
/// baseline.
///
/// Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal
/// error.
#[derive(Parser)]
#[command(name = "walkrank", version)]
struct Cli {
    /// Pipeline config file (TOML). Defaults are used when absent.
    #[arg(long, global = true, env = CONFIG_ENV_VAR)]
    config: Option<PathBuf>,
    /// Override paths.output_dir.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse triples and write the binary graph cache.
    Ingest {
        /// Triples file (N-Triples-like or TSV), overriding paths.triples.
        #[arg(long)]
        triples: Option<PathBuf>,
        /// Type-rule file (TSV `pattern<TAB>typename`).
        #[arg(long)]
        type_rules: Option<PathBuf>,
    },
    /// Generate a walk corpus file from the cached graph.
    Walk {
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long)]
        walk_length: Option<usize>,
        #[arg(long)]
        walks_per_node: Option<usize>,
        /// node2vec return parameter.
        #[arg(long)]
        p: Option<f64>,
        /// node2vec in-out parameter.
        #[arg(long)]
        q: Option<f64>,
        /// Metapath file (one node type per line), for strategy=metapath.
        #[arg(long)]
        metapath: Option<PathBuf>,
    },
    /// Sample walks and train embeddings; writes text + binary vectors and
    /// a run manifest.
    Train {
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        negatives: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        workers: Option<usize>,
        /// true: single-worker bit-reproducible training; false: lock-free
        /// parallel training across --workers threads.
        #[arg(long)]
        deterministic: Option<bool>,
        #[arg(long)]
        metapath: Option<PathBuf>,
    },
    /// Top-K similarity query for one source node.
    Rank {
        #[arg(long)]
        source: String,
        #[arg(long, default_value_t = 20)]
        k: usize,
        /// Restrict candidates to one node type (needs the graph cache).
        #[arg(long)]
        target_type: Option<String>,
        /// Output CSV path (default <output_dir>/ranking.csv).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Train the logistic baseline and compare it with top-K ranking on
    /// the configured test sets.
    Evaluate {
        /// K values (repeatable), overriding evaluate.k_values.
        #[arg(long = "k")]
        k_values: Vec<usize>,
        /// "hadamard" or "concat".
        #[arg(long)]
        feature_mode: Option<String>,
    },
    /// Print statistics for the cached graph and trained embeddings.
    Inspect,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(dir) = cli.output_dir {
        config.paths.output_dir = dir;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }

    match cli.command {
        Command::Ingest { triples, type_rules } => {
            if let Some(path) = triples {
                config.paths.triples = path;
            }
            if let Some(path) = type_rules {
                config.paths.type_rules = Some(path);
            }
            let summary = commands::cmd_ingest(&config)?;
            println!("{summary}");
        }
        Command::Walk {
            strategy,
            walk_length,
            walks_per_node,
            p,
            q,
            metapath,
        } => {
            apply_walk_overrides(
                &mut config,
                strategy,
                walk_length,
                walks_per_node,
                p,
                q,
                metapath,
            );
            let summary = commands::cmd_walk(&config)?;
            println!("{summary}");
        }
        Command::Train {
            strategy,
            dim,
            window,
            negatives,
            epochs,
            learning_rate,
            workers,
            deterministic,
            metapath,
        } => {
            apply_walk_overrides(&mut config, strategy, None, None, None, None, metapath);
            if let Some(v) = dim {
                config.train.dim = v;
            }
            if let Some(v) = window {
                config.train.window = v;
            }
            if let Some(v) = negatives {
                config.train.negatives = v;
            }
            if let Some(v) = epochs {
                config.train.epochs = v;
            }
            if let Some(v) = learning_rate {
                config.train.learning_rate = v;
            }
            if let Some(v) = workers {
                config.train.workers = v;
            }
            if let Some(v) = deterministic {
                config.train.deterministic = v;
            }
            let summary = commands::cmd_train(&config)?;
            println!("{summary}");
        }
        Command::Rank {
            source,
            k,
            target_type,
            output,
        } => {
            let path = commands::cmd_rank(
                &config,
                &source,
                k,
                target_type.as_deref(),
                output.as_deref(),
            )?;
            println!("wrote ranking -> {}", path.display());
        }
        Command::Evaluate {
            k_values,
            feature_mode,
        } => {
            if !k_values.is_empty() {
                config.evaluate.k_values = k_values;
            }
            if let Some(mode) = feature_mode {
                config.evaluate.feature_mode = mode;
            }
            let summary = commands::cmd_evaluate(&config)?;
            println!(
                "baseline model -> {} (validation accuracy {:.4})",
                summary.baseline_model.display(),
                summary.validation_accuracy
            );
            for path in &summary.reports {
                println!("wrote {}", path.display());
            }
        }
        Command::Inspect => {
            print!("{}", commands::cmd_inspect(&config)?);
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn apply_walk_overrides(
    config: &mut PipelineConfig,
    strategy: Option<String>,
    walk_length: Option<usize>,
    walks_per_node: Option<usize>,
    p: Option<f64>,
    q: Option<f64>,
    metapath: Option<PathBuf>,
) {
    if let Some(v) = strategy {
        config.walk.strategy = v;
    }
    if let Some(v) = walk_length {
        config.walk.walk_length = v;
    }
    if let Some(v) = walks_per_node {
        config.walk.walks_per_node = v;
    }
    if let Some(v) = p {
        config.walk.p = v;
    }
    if let Some(v) = q {
        config.walk.q = v;
    }
    if let Some(v) = metapath {
        config.paths.metapath = Some(v);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
