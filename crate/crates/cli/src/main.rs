//! `audit`: command-line front end for the citation audit pipeline.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use epiaudit::acquisition::Fetcher;
use epiaudit::agreement::DifferenceMetric;
use epiaudit::pipeline::{self, labels, AuditConfig, PipelineDeps};
use epiaudit::taxonomy::{CacheWorkResolver, Classifier, ClassifierMode, HttpLlmClient, LlmClient};

#[derive(Debug, Parser)]
#[command(name = "audit", version, about = "Citation-source audit of paired encyclopedia articles")]
struct Cli {
    /// TOML file with configuration keys; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Overrides {
    #[arg(long, global = true)]
    topics: Option<PathBuf>,
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Use only the cache; never open a connection.
    #[arg(long, global = true)]
    offline: bool,
    /// Refetch pages even when cached.
    #[arg(long, global = true)]
    refresh: bool,
    #[arg(long, global = true)]
    max_concurrency: Option<usize>,
    #[arg(long, global = true)]
    host_interval_ms: Option<u64>,
    #[arg(long, global = true)]
    classifier: Option<ClassifierMode>,
    #[arg(long, global = true)]
    model: Option<String>,
    #[arg(long, global = true)]
    llm_base_url: Option<String>,
    #[arg(long, global = true)]
    max_inflight: Option<usize>,
    /// Homophily similarity threshold.
    #[arg(long, global = true)]
    threshold: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fetch both versions of every topic and write the pair manifest.
    Fetch,
    /// Extract citations and word counts from cached pages.
    Parse,
    /// Label every citation.
    Classify,
    /// Build per-article and corpus profiles.
    Profile,
    /// Divergence, network and scaling analyses.
    #[command(alias = "metrics")]
    Analyze,
    /// Assemble report.json and summary.txt from stage outputs.
    Report,
    /// Inter-rater agreement between label files.
    Agree(AgreeArgs),
    /// All stages in order.
    Run,
}

#[derive(Debug, Args)]
struct AgreeArgs {
    /// Reference labels (`id,label` CSV).
    #[arg(long = "ref", requires = "pred", conflicts_with = "matrix")]
    reference: Option<PathBuf>,
    /// Predicted labels (`id,label` CSV).
    #[arg(long)]
    pred: Option<PathBuf>,
    /// Items-by-raters matrix CSV for Krippendorff's alpha.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Difference metric for the matrix.
    #[arg(long, default_value = "nominal")]
    metric: DifferenceMetric,
    /// Also store the result for the next report.
    #[arg(long)]
    save: bool,
}

fn load_config(cli: &Cli) -> Result<AuditConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => AuditConfig::default(),
    };
    let o = &cli.overrides;
    if let Some(v) = &o.topics {
        cfg.topics = v.clone();
    }
    if let Some(v) = &o.cache {
        cfg.cache_dir = v.clone();
    }
    if let Some(v) = &o.out {
        cfg.out_dir = v.clone();
    }
    cfg.offline |= o.offline;
    cfg.refresh |= o.refresh;
    if let Some(v) = o.max_concurrency {
        cfg.max_concurrency = v;
    }
    if let Some(v) = o.host_interval_ms {
        cfg.host_interval_ms = v;
    }
    if let Some(v) = o.classifier {
        cfg.classifier = v;
    }
    if let Some(v) = &o.model {
        cfg.llm.model = v.clone();
    }
    if let Some(v) = &o.llm_base_url {
        cfg.llm.base_url = v.clone();
    }
    if let Some(v) = o.max_inflight {
        cfg.max_inflight = v;
    }
    if let Some(v) = o.threshold {
        cfg.homophily_threshold = v;
    }
    if let Some(v) = o.alpha {
        cfg.alpha = v;
    }
    Ok(cfg)
}

fn fetcher(cfg: &AuditConfig) -> Option<Fetcher> {
    (!cfg.offline).then(|| Fetcher::new(cfg.fetch_policy()))
}

fn classifier(cfg: &AuditConfig) -> Classifier {
    let client: Option<Arc<dyn LlmClient>> = match cfg.classifier {
        ClassifierMode::Rules => None,
        _ => {
            if std::env::var_os(&cfg.llm.api_key_env).is_none() {
                log::warn!("{} is not set; model calls will be unauthenticated", cfg.llm.api_key_env);
            }
            Some(Arc::new(HttpLlmClient::from_env(
                &cfg.llm.base_url,
                &cfg.llm.model,
                &cfg.llm.api_key_env,
                Duration::from_secs(cfg.llm.timeout_secs),
            )))
        }
    };
    let resolver = CacheWorkResolver::new(cfg.cache(), fetcher(cfg).map(Arc::new));
    let mut c = Classifier::new(cfg.classifier, client, Arc::new(resolver));
    c.max_inflight = cfg.max_inflight;
    c
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    let value = serde_json::to_value(v)?;
    print!("{}", pipeline::canonical_json(&value));
    Ok(())
}

fn agree(cfg: &AuditConfig, a: &AgreeArgs) -> Result<()> {
    let result = match (&a.reference, &a.pred, &a.matrix) {
        (Some(r), Some(p), None) => serde_json::to_value(labels::compare_label_files(r, p)?)?,
        (None, None, Some(m)) => serde_json::to_value(labels::matrix_agreement(m, a.metric)?)?,
        _ => bail!("give either --ref and --pred, or --matrix"),
    };
    print_json(&result)?;
    if a.save {
        let path = pipeline::write_agreement(cfg, &result)?;
        log::info!("saved {}", path.display());
    }
    Ok(())
}

fn report_paths(out: &Path) {
    println!("report:  {}", out.join("report.json").display());
    println!("summary: {}", out.join("summary.txt").display());
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Fetch => {
            let m = pipeline::fetch(&cfg, fetcher(&cfg).as_ref())?;
            println!(
                "{} topics: {} eligible, {} missing, {} excluded",
                m.entries.len(),
                m.eligible_count,
                m.missing_count,
                m.excluded_count
            );
        }
        Command::Parse => {
            let s = pipeline::parse(&cfg)?;
            println!("{} pairs parsed, {} failures", s.pairs.len(), s.failures.len());
        }
        Command::Classify => {
            let m = pipeline::classify(&cfg, &classifier(&cfg))?;
            println!("{} classified, {} unresolved", m.classified, m.unresolved);
        }
        Command::Profile => {
            let s = pipeline::profile(&cfg)?;
            println!("{} empty articles", s.empty_articles.len());
        }
        Command::Analyze => {
            let a = pipeline::analyze(&cfg)?;
            println!("{} pairs analyzed", a.divergence.len());
        }
        Command::Report => {
            let r = pipeline::report(&cfg)?;
            pipeline::emit_report(&cfg, &r)?;
            report_paths(&cfg.out_dir);
        }
        Command::Agree(a) => agree(&cfg, a)?,
        Command::Run => {
            let deps = PipelineDeps { fetcher: fetcher(&cfg), classifier: classifier(&cfg) };
            pipeline::run_pipeline(&cfg, &deps)?;
            report_paths(&cfg.out_dir);
        }
    }
    Ok(())
}
