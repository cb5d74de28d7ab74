//! Scenario runs, figure sweeps and the run manifest.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use softcache_core::catalog::{graph_stats, ContentCatalog, RelationCase, UtilityGraph};
use softcache_core::contact::ContactTrace;
use softcache_core::placement::{integerize, AccessModel, SolveOptions};
use softcache_core::protocol::{compare_modes, AccessMode, CompareConfig, ComparisonRow, Policy};

use crate::config::{ExperimentConfig, ModeName, PolicyName, RelationClass};
use crate::formats::{write_json, write_placement, write_runs, RunRecord, SolveRecord};
use crate::gains::{report_gains, write_gains};
use crate::scenario::{build_dataset, build_relations, build_trace, resolve_lambda, Dataset};
use crate::{Stage, StageError, StageExt};

/// Catalog, relations, trace and meeting rate resolved from a config.
pub struct Scenario {
    pub dataset: Dataset,
    pub graph: UtilityGraph,
    pub trace: ContactTrace,
    pub lambda: f64,
    pub lambda_source: &'static str,
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Scenario, StageError> {
    cfg.validate().stage(Stage::Config)?;
    let dataset = build_dataset(&cfg.catalog, cfg.seed).stage(Stage::Catalog)?;
    let graph = build_relations(
        &dataset,
        cfg.relations.class,
        cfg.relations.degree,
        cfg.relations.symmetrize,
        RelationCase::Binary,
        cfg.seed,
    )
    .stage(Stage::Graph)?;
    let trace = build_trace(&cfg.contact, cfg.seed).stage(Stage::Trace)?;
    let (lambda, lambda_source) = resolve_lambda(cfg, &trace).stage(Stage::Trace)?;
    Ok(Scenario {
        dataset,
        graph,
        trace,
        lambda,
        lambda_source,
    })
}

/// Files written by one command, hashed for the manifest.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<OutputFile>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

impl OutputDir {
    pub fn new(root: &Path) -> Result<Self, StageError> {
        std::fs::create_dir_all(root)
            .map_err(|e| anyhow!("creating {}: {e}", root.display()))
            .stage(Stage::Output)?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    /// Renders into memory, then writes `name` under the output directory.
    pub fn write(&mut self, name: &str, render: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<(), StageError> {
        let mut buf = Vec::new();
        render(&mut buf).stage(Stage::Output)?;
        let path = self.root.join(name);
        std::fs::write(&path, &buf)
            .map_err(|e| anyhow!("writing {}: {e}", path.display()))
            .stage(Stage::Output)?;
        self.files.push(OutputFile {
            file: name.to_string(),
            sha256: hex(&Sha256::digest(&buf)),
        });
        Ok(())
    }

    /// Writes `manifest.json` listing everything written so far.
    pub fn finish(
        self,
        command: &str,
        cfg: &ExperimentConfig,
        scenario: Option<&Scenario>,
    ) -> Result<Manifest, StageError> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config_hash: cfg.hash(),
            seed: cfg.seed,
            seeds: cfg.seeds.clone(),
            scenario: scenario.map(ScenarioInfo::new),
            config: cfg.clone(),
            outputs: self.files,
        };
        let path = self.root.join("manifest.json");
        let mut buf = Vec::new();
        write_json(&mut buf, &manifest).stage(Stage::Output)?;
        std::fs::write(&path, &buf)
            .map_err(|e| anyhow!("writing {}: {e}", path.display()))
            .stage(Stage::Output)?;
        Ok(manifest)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioInfo {
    pub contents: usize,
    pub relations: usize,
    pub mean_row_degree: f64,
    pub users: usize,
    pub cells: usize,
    pub horizon: f64,
    pub contact_events: usize,
    pub lambda: f64,
    pub lambda_source: &'static str,
}

impl ScenarioInfo {
    fn new(s: &Scenario) -> Self {
        Self {
            contents: s.dataset.catalog.len(),
            relations: s.graph.edge_count(),
            mean_row_degree: graph_stats(&s.graph).mean_row_degree,
            users: s.trace.users(),
            cells: s.trace.cells(),
            horizon: s.trace.horizon(),
            contact_events: s.trace.events().len(),
            lambda: s.lambda,
            lambda_source: s.lambda_source,
        }
    }
}

/// Seeds, versions, the resolved config and its hash, and output checksums.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub seeds: Vec<u64>,
    pub scenario: Option<ScenarioInfo>,
    pub config: ExperimentConfig,
    pub outputs: Vec<OutputFile>,
}

/// One simulated grid cell: its key columns and the per-(policy, mode) rows.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub keys: Vec<(String, String)>,
    pub rows: Vec<ComparisonRow>,
}

struct Job<'a> {
    keys: Vec<(String, String)>,
    catalog: &'a ContentCatalog,
    graph: &'a UtilityGraph,
    ttl: f64,
    capacity: usize,
    policies: Vec<Policy>,
    modes: Vec<AccessMode>,
}

fn run_jobs(cfg: &ExperimentConfig, trace: &ContactTrace, lambda: f64, jobs: Vec<Job<'_>>) -> Result<Vec<CellResult>> {
    jobs.into_par_iter()
        .map(|job| {
            let model = AccessModel::new(lambda, job.ttl).map_err(|e| anyhow!("{e}"))?;
            let compare = CompareConfig {
                policies: job.policies,
                modes: job.modes,
                rounding: cfg.rounding.mode(),
                solve: SolveOptions::default(),
                ..CompareConfig::new(
                    trace.cells(),
                    job.capacity,
                    job.ttl,
                    cfg.c,
                    cfg.requests_per_seed,
                    cfg.seeds.clone(),
                )
            };
            let rows = compare_modes(trace, job.catalog, job.graph, &model, &compare)
                .map_err(|e| anyhow!("{}: {e}", describe(&job.keys)))?;
            Ok(CellResult { keys: job.keys, rows })
        })
        .collect()
}

fn describe(keys: &[(String, String)]) -> String {
    keys.iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn key(name: &str, value: impl ToString) -> (String, String) {
    (name.to_string(), value.to_string())
}

fn policies(names: &[PolicyName]) -> Vec<Policy> {
    names.iter().map(|p| p.policy()).collect()
}

fn modes(names: &[ModeName], c: f64) -> Vec<AccessMode> {
    names.iter().map(|m| m.mode(c)).collect()
}

/// Every configured (TTL, capacity) cell on the scenario's relation graph.
pub fn simulate_grid(cfg: &ExperimentConfig, scn: &Scenario) -> Result<Vec<CellResult>, StageError> {
    let mut jobs = Vec::new();
    for &ttl in &cfg.ttl {
        for &capacity in &cfg.capacity {
            jobs.push(Job {
                keys: vec![key("ttl", ttl), key("capacity", capacity)],
                catalog: &scn.dataset.catalog,
                graph: &scn.graph,
                ttl,
                capacity,
                policies: policies(&cfg.policies),
                modes: modes(&cfg.modes, cfg.c),
            });
        }
    }
    run_jobs(cfg, &scn.trace, scn.lambda, jobs).stage(Stage::Simulate)
}

const SUMMARY_COLUMNS: [&str; 10] = [
    "policy",
    "mode",
    "seeds",
    "hit_ratio",
    "hit_ratio_se",
    "utility",
    "utility_se",
    "expensive",
    "expensive_se",
    "requests",
];

/// Mean and standard error across seeds, one line per (cell, policy, mode).
pub fn write_summary(w: impl std::io::Write, cells: &[CellResult]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = cells
        .first()
        .map_or(Vec::new(), |c| c.keys.iter().map(|(k, _)| k.as_str()).collect());
    header.extend(SUMMARY_COLUMNS);
    out.write_record(&header)?;
    for cell in cells {
        for row in &cell.rows {
            let mut rec: Vec<String> = cell.keys.iter().map(|(_, v)| v.clone()).collect();
            rec.push(row.policy.name().into());
            rec.push(row.mode.name().into());
            rec.push(row.per_seed.len().to_string());
            for x in [
                row.hit_ratio.mean,
                row.hit_ratio.se,
                row.utility.mean,
                row.utility.se,
                row.expensive.mean,
                row.expensive.se,
            ] {
                rec.push(format!("{x:.6}"));
            }
            rec.push(row.per_seed.iter().map(|s| s.requests).sum::<u64>().to_string());
            out.write_record(&rec)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Solver output for every configured policy, TTL and capacity.
pub struct Solved {
    pub name: String,
    pub record: SolveRecord,
    pub continuous: softcache_core::placement::PlacementVector,
    pub integer: softcache_core::placement::IntegerPlacement,
}

pub fn solve_grid(cfg: &ExperimentConfig, scn: &Scenario) -> Result<Vec<Solved>, StageError> {
    let mut jobs = Vec::new();
    for &policy in &cfg.policies {
        for &ttl in &cfg.ttl {
            for &capacity in &cfg.capacity {
                jobs.push((policy.policy(), ttl, capacity));
            }
        }
    }
    let cells = scn.trace.cells();
    jobs.into_par_iter()
        .map(|(policy, ttl, capacity)| {
            let model = AccessModel::new(scn.lambda, ttl).map_err(|e| anyhow!("{e}"))?;
            let (continuous, report) = policy
                .solve(
                    &scn.dataset.catalog,
                    &scn.graph,
                    &model,
                    cells,
                    capacity,
                    cfg.c,
                    &SolveOptions::default(),
                )
                .map_err(|e| anyhow!("{} ttl={ttl} capacity={capacity}: {e}", policy.name()))?;
            let integer = integerize(&continuous, cfg.rounding.mode());
            Ok(Solved {
                name: format!("placement_{}_ttl{}_q{}.csv", policy.name(), ttl, capacity),
                record: SolveRecord::new(policy.name(), &model, cells, capacity, &report),
                continuous,
                integer,
            })
        })
        .collect::<Result<Vec<_>>>()
        .stage(Stage::Solve)
}

pub fn write_solved(out: &mut OutputDir, solved: &[Solved]) -> Result<(), StageError> {
    for s in solved {
        out.write(&s.name, |w| write_placement(w, &s.continuous, &s.integer))?;
    }
    let records: Vec<&SolveRecord> = solved.iter().map(|s| &s.record).collect();
    out.write("solve.json", |w| write_json(w, &records))
}

/// Figure-style sweeps: hit ratio against relation density, policy
/// comparison under SCH1, and soft-hit gains on a related-content graph.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Manifest, StageError> {
    let scn = prepare(cfg)?;
    let mut out = OutputDir::new(out_dir)?;
    let catalog = &scn.dataset.catalog;

    if let Some(fig) = &cfg.figures.density {
        let mut graphs = Vec::new();
        for &class in &fig.classes {
            for &degree in &fig.degrees {
                let g = build_relations(
                    &scn.dataset,
                    class,
                    degree,
                    cfg.relations.symmetrize,
                    RelationCase::Binary,
                    cfg.seed,
                )
                .stage(Stage::Graph)?;
                graphs.push((class, degree, g));
            }
        }
        let jobs = graphs
            .iter()
            .map(|(class, degree, g)| Job {
                keys: vec![
                    key("class", class.name()),
                    key("degree", degree),
                    key("mean_row_degree", format!("{:.4}", graph_stats(g).mean_row_degree)),
                ],
                catalog,
                graph: g,
                ttl: fig.ttl,
                capacity: fig.capacity,
                policies: vec![Policy::Base],
                modes: modes(&fig.modes, cfg.c),
            })
            .collect();
        let cells = run_jobs(cfg, &scn.trace, scn.lambda, jobs).stage(Stage::Sweep)?;
        write_cells(&mut out, "density", &cells, &cfg.seeds)?;
    }

    if let Some(fig) = &cfg.figures.policy_bars {
        let mut graphs = Vec::new();
        for &class in &fig.classes {
            let g = build_relations(
                &scn.dataset,
                class,
                fig.degree,
                cfg.relations.symmetrize,
                RelationCase::Binary,
                cfg.seed,
            )
            .stage(Stage::Graph)?;
            graphs.push((class, g));
        }
        let mut jobs = Vec::new();
        for (class, g) in &graphs {
            for &ttl in &fig.ttls {
                jobs.push(Job {
                    keys: vec![key("class", class.name()), key("ttl", ttl)],
                    catalog,
                    graph: g,
                    ttl,
                    capacity: fig.capacity,
                    policies: policies(&fig.policies),
                    modes: vec![AccessMode::Sch1],
                });
            }
        }
        let cells = run_jobs(cfg, &scn.trace, scn.lambda, jobs).stage(Stage::Sweep)?;
        write_cells(&mut out, "policy_bars", &cells, &cfg.seeds)?;
    }

    if let Some(fig) = &cfg.figures.gain_grid {
        let dataset = build_dataset(&fig.catalog, cfg.seed).stage(Stage::Catalog)?;
        let graph = build_relations(
            &dataset,
            RelationClass::Dataset,
            0.0,
            true,
            RelationCase::Binary,
            cfg.seed,
        )
        .stage(Stage::Graph)?;
        let mut jobs = Vec::new();
        for &ttl in &fig.ttls {
            for &capacity in &fig.capacities {
                jobs.push(Job {
                    keys: vec![key("ttl", ttl), key("capacity", capacity)],
                    catalog: &dataset.catalog,
                    graph: &graph,
                    ttl,
                    capacity,
                    policies: vec![Policy::Base],
                    modes: vec![AccessMode::None, AccessMode::Sch1],
                });
            }
        }
        let cells = run_jobs(cfg, &scn.trace, scn.lambda, jobs).stage(Stage::Sweep)?;
        let runs = to_records(&cells, &cfg.seeds);
        let gains = report_gains(&runs).stage(Stage::Report)?;
        out.write("gain_grid_runs.csv", |w| write_runs(w, &runs))?;
        out.write("gain_grid.csv", |w| write_gains(w, &gains))?;
    }

    out.finish("sweep", cfg, Some(&scn))
}

/// Summary and per-seed CSVs for one figure.
pub fn write_cells(out: &mut OutputDir, stem: &str, cells: &[CellResult], seeds: &[u64]) -> Result<(), StageError> {
    let runs = to_records(cells, seeds);
    out.write(&format!("{stem}_runs.csv"), |w| write_runs(w, &runs))?;
    out.write(&format!("{stem}.csv"), |w| write_summary(w, cells))
}

/// Flattens cells into per-seed records in cell, policy, mode, seed order.
pub fn to_records(cells: &[CellResult], seeds: &[u64]) -> Vec<RunRecord> {
    let mut runs = Vec::new();
    for cell in cells {
        for row in &cell.rows {
            for (stats, &seed) in row.per_seed.iter().zip(seeds) {
                runs.push(RunRecord::new(
                    cell.keys.clone(),
                    row.mode.name(),
                    row.policy.name(),
                    seed,
                    stats,
                ));
            }
        }
    }
    runs
}
