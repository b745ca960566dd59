use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use crossdomain::pipeline::{self, PipelineConfig};

#[derive(Parser)]
#[command(name = "crossdomain", version, about = "Rank words by cross-domain ambiguity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preprocess domain corpora into token caches.
    Ingest(Opts),
    /// Train and normalize one embedding space per domain.
    Train(Opts),
    /// Align the domain spaces into a unified space.
    Align(Opts),
    /// Select target words and write the ambiguity ranking.
    Rank {
        #[command(flatten)]
        opts: Opts,
        /// Also write both baseline rankings.
        #[arg(long)]
        baseline: bool,
        /// Also write disagreement tables against the baselines (implies --baseline).
        #[arg(long)]
        compare: bool,
        #[arg(long, default_value_t = 20)]
        top_m: usize,
    },
    /// Rank target words with the context-similarity and nearest-neighbor baselines.
    Baseline(Opts),
    /// Compare two ranking files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 20)]
        top_m: usize,
        /// Output CSV path.
        #[arg(long, default_value = "disagreement.csv")]
        out: PathBuf,
    },
}

/// Every flag maps onto the config key of the same name.
#[derive(Args)]
struct Opts {
    /// key=value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Domain corpus as id=path; repeat per domain.
    #[arg(long = "domain", value_name = "ID=PATH")]
    domains: Vec<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    negatives: Option<String>,
    #[arg(long)]
    min_freq: Option<String>,
    #[arg(long)]
    epochs: Option<String>,
    #[arg(long)]
    lr: Option<String>,
    #[arg(long)]
    noise_exponent: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    max_iterations: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    stopwords: Option<String>,
    #[arg(long)]
    lemmatizer: Option<String>,
    #[arg(long)]
    min_token_length: Option<String>,
    #[arg(long)]
    lexicon: Option<String>,
    #[arg(long)]
    neighbors: Option<String>,
    #[arg(long)]
    exclude_target: bool,
    #[arg(long)]
    skip_non_utf8: bool,
    #[arg(long)]
    force: bool,
}

impl Opts {
    fn build(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::read(p).with_context(|| format!("reading {}", p.display()))?,
            None => PipelineConfig::default(),
        };
        let pairs = [
            ("dim", &self.dim),
            ("window", &self.window),
            ("negatives", &self.negatives),
            ("min-freq", &self.min_freq),
            ("epochs", &self.epochs),
            ("lr", &self.lr),
            ("noise-exponent", &self.noise_exponent),
            ("tau", &self.tau),
            ("max-iterations", &self.max_iterations),
            ("k", &self.k),
            ("rho", &self.rho),
            ("seed", &self.seed),
            ("workers", &self.workers),
            ("out", &self.out),
            ("format", &self.format),
            ("stopwords", &self.stopwords),
            ("lemmatizer", &self.lemmatizer),
            ("min-token-length", &self.min_token_length),
            ("lexicon", &self.lexicon),
            ("neighbors", &self.neighbors),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for (key, on) in [
            ("exclude-target", self.exclude_target),
            ("skip-non-utf8", self.skip_non_utf8),
            ("force", self.force),
        ] {
            if on {
                cfg.set(key, "true")?;
            }
        }
        for d in &self.domains {
            let (id, path) = d.split_once('=').context("--domain expects ID=PATH")?;
            cfg.set(&format!("domain.{id}"), path)?;
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.training.workers)
            .build_global()
            .ok();
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(opts) => {
            let stats = pipeline::cmd_ingest(&opts.build()?)?;
            eprint!("{}", pipeline::stats_to_csv(&stats));
        }
        Command::Train(opts) => {
            let spaces = pipeline::cmd_train(&opts.build()?)?;
            for s in spaces {
                eprintln!("{}: {} words x {}", s.domain_id(), s.len(), s.dim());
            }
        }
        Command::Align(opts) => {
            let u = pipeline::cmd_align(&opts.build()?)?;
            eprintln!(
                "{} iterations, final residual {:?}, converged={}",
                u.iterations(),
                u.residual_history.last(),
                u.converged
            );
        }
        Command::Rank {
            opts,
            baseline,
            compare,
            top_m,
        } => {
            let cfg = opts.build()?;
            let ranking = pipeline::cmd_rank(&cfg)?;
            eprintln!("ranked {} target words -> {}", ranking.len(), cfg.ranking_path().display());
            if baseline || compare {
                let b = pipeline::cmd_baseline(&cfg)?;
                if compare {
                    for other in [&b.context_similarity, &b.nn_overlap] {
                        let rows = crossdomain::scoring::compare_rankings(&ranking, other, top_m)?;
                        let path = cfg.out.join(format!("disagreement_{}.csv", other.method));
                        std::fs::write(&path, crossdomain::scoring::disagreements_to_csv(&rows))
                            .with_context(|| format!("writing {}", path.display()))?;
                    }
                }
            }
        }
        Command::Baseline(opts) => {
            let b = pipeline::cmd_baseline(&opts.build()?)?;
            eprintln!(
                "context similarity: {} words, nn overlap: {} words",
                b.context_similarity.len(),
                b.nn_overlap.len()
            );
        }
        Command::Compare { a, b, top_m, out } => {
            let rows = pipeline::cmd_compare(&a, &b, top_m, &out)?;
            eprintln!("{} rows -> {}", rows.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
