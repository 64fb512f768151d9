use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use reprolint::http::{router, AppState};
use reprolint::pipeline::{self, EXPLORATION_BUDGET};
use reprolint::settings::{build_config, Overrides};
use reprolint::store::Store;
use reprolint_core::appsim::AppModel;
use reprolint_core::graph::ExecutionGraph;
use reprolint_core::quality::{render_html, render_json};
use reprolint_core::resolve::MatchConfig;

/// Rates the steps to reproduce in a bug report against a model of the app.
#[derive(Parser)]
#[command(name = "reprolint", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assess a bug report and write the quality report.
    Assess(AssessArgs),
    /// Explore an app model systematically and write a graph cache.
    Explore(ExploreArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Html,
    Both,
}

#[derive(Args)]
struct AssessArgs {
    /// Bug report text file.
    #[arg(long)]
    report: PathBuf,
    /// App model (JSON).
    #[arg(long)]
    app: PathBuf,
    /// Graph cache to read, or to create when missing.
    #[arg(long)]
    graph_cache: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    rand_iters: Option<usize>,
    #[arg(long)]
    rand_steps: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Action-group, keyword and synonym vocabulary (JSON).
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Per-sentence B/I/O labels replacing the built-in labeler.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Parameter file (JSON); flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ExploreArgs {
    #[arg(long)]
    app: PathBuf,
    /// Maximum number of exploration steps, launch included.
    #[arg(long)]
    budget: usize,
    /// Cache file; an existing cache is merged with the new trace.
    #[arg(long)]
    out: PathBuf,
    /// Accepted for symmetry with `assess`; systematic exploration is
    /// deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Store root.
    #[arg(long, env = "REPROLINT_DATA_DIR", default_value = "reprolint-data")]
    data_dir: PathBuf,
    /// Assessments run at the same time.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

/// Bad user input: exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Invalid(String);

fn invalid(e: impl std::fmt::Display) -> anyhow::Error {
    Invalid(e.to_string()).into()
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<AppModel> {
    AppModel::from_json(&read_input(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn load_overrides(path: Option<&Path>) -> Result<Overrides> {
    match path {
        Some(p) => Overrides::from_json(&read_input(p)?)
            .map_err(|e| invalid(format!("{}: {e}", p.display()))),
        None => Ok(Overrides::default()),
    }
}

fn load_matching(path: Option<&Path>) -> Result<MatchConfig> {
    match path {
        Some(p) => MatchConfig::from_json(&read_input(p)?)
            .map_err(|e| invalid(format!("{}: {e}", p.display()))),
        None => Ok(MatchConfig::default()),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn assess(args: AssessArgs) -> Result<()> {
    let report = read_input(&args.report)?;
    let model = load_model(&args.app)?;
    let labels = args.labels.as_deref().map(read_input).transpose()?;
    let flags = Overrides {
        depth: args.depth,
        random_iterations: args.rand_iters,
        random_steps: args.rand_steps,
        similarity_threshold: args.threshold,
        seed: args.seed,
    };
    let file = load_overrides(args.config.as_deref())?;
    let cfg =
        build_config(&[&flags, &file], load_matching(args.lexicon.as_deref())?).map_err(invalid)?;

    let graph = match &args.graph_cache {
        Some(path) if path.exists() => ExecutionGraph::from_cache_json(&read_input(path)?)
            .map_err(|e| invalid(format!("{}: {e}", path.display())))?,
        cache => {
            let g = pipeline::explore(&model, EXPLORATION_BUDGET);
            if let Some(path) = cache {
                write_file(path, &g.to_cache_json())?;
            }
            g
        }
    };
    let qr = pipeline::run(&report, labels.as_deref(), &model, &graph, &cfg).map_err(invalid)?;

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let base = args.out.join(format!("reprolint-{}", qr.report_id));
    if args.format != Format::Html {
        let path = base.with_extension("json");
        write_file(&path, &render_json(&qr))?;
        println!("{}", path.display());
    }
    if args.format != Format::Json {
        let path = base.with_extension("html");
        write_file(&path, &render_html(&qr))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn explore(args: ExploreArgs) -> Result<()> {
    let model = load_model(&args.app)?;
    if args.budget == 0 {
        return Err(invalid("budget must be at least 1"));
    }
    let trace = reprolint_core::graph::systematic_explore(&model, args.budget);
    let graph = if args.out.exists() {
        let mut g = ExecutionGraph::from_cache_json(&read_input(&args.out)?)
            .map_err(|e| invalid(format!("{}: {e}", args.out.display())))?;
        pipeline::check_graph(&model, &g).map_err(invalid)?;
        g.merge_trace(&trace);
        g
    } else {
        ExecutionGraph::build(model.app_name(), model.screen_size(), &trace)
    };
    write_file(&args.out, &graph.to_cache_json())?;
    println!(
        "{} screens, {} interactions",
        graph.vertices.len(),
        graph.edges.len()
    );
    Ok(())
}

fn serve(args: ServeArgs) -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .init();
    let store = Store::open(&args.data_dir)
        .with_context(|| format!("opening store {}", args.data_dir.display()))?;
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(2, |n| n.get()));
    let mut state = AppState::new(store, workers);
    state.defaults = load_overrides(args.config.as_deref())?;
    state.matching = load_matching(args.lexicon.as_deref())?;
    build_config(&[&state.defaults], state.matching.clone()).map_err(invalid)?;

    let rt = tokio::runtime::Runtime::new().context("starting runtime")?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(args.addr)
            .await
            .with_context(|| format!("binding {}", args.addr))?;
        tracing::info!("listening on {}", args.addr);
        axum::serve(listener, router(state))
            .await
            .context("serving")
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Assess(a) => assess(a),
        Command::Explore(a) => explore(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<Invalid>()) {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
