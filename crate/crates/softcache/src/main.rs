use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use softcache::config::{CatalogSpec, ExperimentConfig};
use softcache::experiment::{
    prepare, run_experiment, simulate_grid, solve_grid, to_records, write_solved, write_summary, OutputDir,
};
use softcache::formats::{
    read_runs, read_to_string, write_edges, write_id_map, write_json, write_popularity, write_runs, write_trace,
};
use softcache::gains::write_gains;
use softcache::scenario::{build_dataset, build_relations, build_trace, Dataset};
use softcache::{report_gains, Stage, StageError, StageExt};
use softcache_core::catalog::{graph_stats, ingest_related_graph, RelationCase, UtilityGraph};

#[derive(Parser)]
#[command(
    name = "softcache",
    version,
    about = "Edge caching with soft cache hits: placement, simulation and sweeps"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON experiment config; built-in defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Write the configured catalog as popularity, id and (if any) edge files.
    GenCatalog,
    /// Write the configured relation graph.
    GenGraph,
    /// Preprocess edge and popularity files into a dense catalog and graph.
    Ingest {
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        popularity: Option<PathBuf>,
    },
    /// Solve every configured policy, TTL and capacity.
    Solve,
    /// Write the configured contact trace.
    GenTrace,
    /// Simulate every configured policy and access mode.
    Simulate,
    /// Run the figure sweeps.
    Sweep,
    /// Relative SCH1 gains from per-seed run files.
    Report {
        /// Run CSVs written by `simulate` or `sweep`.
        #[arg(long, required = true, num_args = 1..)]
        runs: Vec<PathBuf>,
    },
}

#[derive(Serialize)]
struct GraphSummary {
    contents: usize,
    relations: usize,
    symmetric: bool,
    mean_row_degree: f64,
    min_row_degree: usize,
    max_row_degree: usize,
    components: usize,
    largest_component: usize,
}

impl GraphSummary {
    fn new(g: &UtilityGraph) -> Self {
        let s = graph_stats(g);
        Self {
            contents: s.content_count,
            relations: g.edge_count(),
            symmetric: g.is_symmetric(),
            mean_row_degree: s.mean_row_degree,
            min_row_degree: s.min_row_degree,
            max_row_degree: s.max_row_degree,
            components: s.component_sizes.len(),
            largest_component: s.component_sizes.first().copied().unwrap_or(0),
        }
    }
}

fn load_config(common: &Common) -> Result<ExperimentConfig, StageError> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path).map_err(|source| StageError {
            stage: Stage::Config,
            config: Some(path.clone()),
            source,
        })?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|source| StageError {
        stage: Stage::Config,
        config: common.config.clone(),
        source,
    })?;
    Ok(cfg)
}

fn write_dataset(out: &mut OutputDir, ds: &Dataset, graph: Option<&UtilityGraph>) -> Result<(), StageError> {
    out.write("popularity.txt", |w| {
        write_popularity(w, &ds.ids, ds.catalog.popularity())
    })?;
    out.write("ids.csv", |w| write_id_map(w, &ds.ids))?;
    if let Some(g) = graph {
        out.write("edges.txt", |w| write_edges(w, &ds.ids, g))?;
        out.write("graph.json", |w| write_json(w, &GraphSummary::new(g)))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), StageError> {
    let cfg = load_config(&cli.common)?;
    let out_dir: &Path = &cli.common.out;
    match cli.command {
        Command::GenCatalog => {
            let ds = build_dataset(&cfg.catalog, cfg.seed).stage(Stage::Catalog)?;
            let mut out = OutputDir::new(out_dir)?;
            write_dataset(&mut out, &ds, ds.graph.as_ref())?;
            out.finish("gen-catalog", &cfg, None)?;
        }
        Command::GenGraph => {
            let ds = build_dataset(&cfg.catalog, cfg.seed).stage(Stage::Catalog)?;
            let r = &cfg.relations;
            let g = build_relations(&ds, r.class, r.degree, r.symmetrize, RelationCase::Binary, cfg.seed)
                .stage(Stage::Graph)?;
            let mut out = OutputDir::new(out_dir)?;
            write_dataset(&mut out, &ds, Some(&g))?;
            out.finish("gen-graph", &cfg, None)?;
        }
        Command::Ingest { edges, popularity } => {
            let (edges, popularity) = match (edges, popularity, &cfg.catalog) {
                (Some(e), Some(p), _) => (e, p),
                (None, None, CatalogSpec::Dataset { edges, popularity }) => (edges.clone(), popularity.clone()),
                _ => {
                    return Err(anyhow!(
                        "ingest needs --edges and --popularity, or a dataset catalog in the config"
                    ))
                    .stage(Stage::Ingest)
                }
            };
            let edge_text = read_to_string(&edges).stage(Stage::Ingest)?;
            let pop_text = read_to_string(&popularity).stage(Stage::Ingest)?;
            let ingested = ingest_related_graph(&edge_text, &pop_text).stage(Stage::Ingest)?;
            let ds = Dataset {
                catalog: ingested.catalog,
                graph: Some(ingested.graph),
                ids: ingested.ids,
            };
            let mut out = OutputDir::new(out_dir)?;
            write_dataset(&mut out, &ds, ds.graph.as_ref())?;
            out.finish("ingest", &cfg, None)?;
        }
        Command::Solve => {
            let scn = prepare(&cfg)?;
            let solved = solve_grid(&cfg, &scn)?;
            let mut out = OutputDir::new(out_dir)?;
            write_solved(&mut out, &solved)?;
            out.finish("solve", &cfg, Some(&scn))?;
        }
        Command::GenTrace => {
            let trace = build_trace(&cfg.contact, cfg.seed).stage(Stage::Trace)?;
            let mut out = OutputDir::new(out_dir)?;
            out.write("trace.csv", |w| write_trace(w, &trace))?;
            out.finish("gen-trace", &cfg, None)?;
        }
        Command::Simulate => {
            let scn = prepare(&cfg)?;
            let cells = simulate_grid(&cfg, &scn)?;
            let runs = to_records(&cells, &cfg.seeds);
            let mut out = OutputDir::new(out_dir)?;
            out.write("runs.csv", |w| write_runs(w, &runs))?;
            out.write("summary.csv", |w| write_summary(w, &cells))?;
            out.finish("simulate", &cfg, Some(&scn))?;
        }
        Command::Sweep => {
            run_experiment(&cfg, out_dir)?;
        }
        Command::Report { runs } => {
            let mut records = Vec::new();
            for path in &runs {
                let file = std::fs::File::open(path)
                    .map_err(|e| anyhow!("{}: {e}", path.display()))
                    .stage(Stage::Report)?;
                records.extend(
                    read_runs(std::io::BufReader::new(file))
                        .map_err(|e| anyhow!("{}: {e:#}", path.display()))
                        .stage(Stage::Report)?,
                );
            }
            let gains = report_gains(&records).stage(Stage::Report)?;
            let mut out = OutputDir::new(out_dir)?;
            out.write("gains.csv", |w| write_gains(w, &gains))?;
            out.finish("report", &cfg, None)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
