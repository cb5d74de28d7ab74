//! On-disk formats: edge/popularity lists, id sidecars, placements, solver
//! reports, contact traces and hit statistics.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use softcache_core::catalog::UtilityGraph;
use softcache_core::contact::{ContactEvent, ContactKind, ContactTrace};
use softcache_core::placement::{AccessModel, IntegerPlacement, PlacementVector, SolveReport};
use softcache_core::protocol::HitStats;

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(std::io::BufWriter::new(f))
}

/// Popularity file: one `id value` pair per line.
pub fn write_popularity(mut w: impl Write, ids: &[String], values: &[f64]) -> Result<()> {
    for (id, v) in ids.iter().zip(values) {
        writeln!(w, "{id} {v}")?;
    }
    Ok(())
}

/// Edge file: one `id id` pair per relation. Symmetric graphs list each pair once.
pub fn write_edges(mut w: impl Write, ids: &[String], graph: &UtilityGraph) -> Result<()> {
    let symmetric = graph.is_symmetric();
    for (i, row) in graph.rows().iter().enumerate() {
        for &j in row {
            if !symmetric || i < j {
                writeln!(w, "{} {}", ids[i], ids[j])?;
            }
        }
    }
    Ok(())
}

/// Sidecar CSV mapping opaque ids to dense indices.
pub fn write_id_map(w: impl Write, ids: &[String]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["id", "index"])?;
    for (index, id) in ids.iter().enumerate() {
        out.write_record([id.as_str(), &index.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Ids used for generated catalogs.
pub fn synthetic_ids(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("c{i}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PlacementRow {
    content_index: usize,
    n_continuous: f64,
    n_integer: f64,
}

pub fn write_placement(w: impl Write, continuous: &PlacementVector, integer: &IntegerPlacement) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (content_index, (&n_continuous, n_integer)) in continuous.n().iter().zip(integer.as_continuous()).enumerate() {
        out.serialize(PlacementRow {
            content_index,
            n_continuous,
            n_integer,
        })?;
    }
    out.flush()?;
    Ok(())
}

/// Reads the `n_integer` column back as copy counts plus partial copies.
pub fn read_placement(r: impl Read, cells: usize, capacity: usize) -> Result<IntegerPlacement> {
    let mut rows: Vec<PlacementRow> = Vec::new();
    for (line, rec) in csv::Reader::from_reader(r).deserialize().enumerate() {
        rows.push(rec.with_context(|| format!("placement line {}", line + 2))?);
    }
    rows.sort_by_key(|r| r.content_index);
    if rows.iter().enumerate().any(|(i, r)| r.content_index != i) {
        bail!("placement content indices must be 0..K without gaps");
    }
    let values: Vec<f64> = rows.iter().map(|r| r.n_integer).collect();
    let pv = PlacementVector::new(values, cells, capacity).map_err(|e| anyhow!("placement: {e}"))?;
    Ok(softcache_core::placement::integerize(
        &pv,
        softcache_core::placement::RoundingMode::Fractional,
    ))
}

/// Solver summary written next to a placement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub policy: String,
    pub lambda: f64,
    pub ttl: f64,
    pub cells: usize,
    pub capacity: usize,
    pub objective: f64,
    pub rho: f64,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub converged: bool,
}

impl SolveRecord {
    pub fn new(policy: &str, model: &AccessModel, cells: usize, capacity: usize, report: &SolveReport) -> Self {
        Self {
            policy: policy.to_string(),
            lambda: model.lambda(),
            ttl: model.ttl(),
            cells,
            capacity,
            objective: report.objective_value,
            rho: report.rho,
            iterations: report.iterations,
            kkt_residual: report.kkt_residual,
            converged: report.converged,
        }
    }
}

pub fn write_json<T: Serialize>(mut w: impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn kind_name(kind: ContactKind) -> &'static str {
    match kind {
        ContactKind::Enter => "enter",
        ContactKind::Exit => "exit",
    }
}

/// Trace CSV `time,user,cell,kind` with microsecond times. A leading
/// `# horizon=.. users=.. cells=..` line preserves the trace dimensions.
pub fn write_trace(mut w: impl Write, trace: &ContactTrace) -> Result<()> {
    writeln!(
        w,
        "# horizon={:.6} users={} cells={}",
        trace.horizon(),
        trace.users(),
        trace.cells()
    )?;
    writeln!(w, "time,user,cell,kind")?;
    let mut line = String::new();
    for e in trace.events() {
        line.clear();
        writeln!(line, "{:.6},{},{},{}", e.time, e.user, e.cell, kind_name(e.kind))?;
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Loads a trace CSV. Without the dimension comment, the horizon is the
/// last event time and user/cell counts are one past the largest index.
pub fn read_trace(r: impl Read) -> Result<ContactTrace> {
    let mut horizon = None;
    let mut users = None;
    let mut cells = None;
    let mut events = Vec::new();
    let mut header_seen = false;
    for (n, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            for kv in meta.split_whitespace() {
                let (k, v) = kv.split_once('=').unwrap_or((kv, ""));
                let bad = || anyhow!("trace line {lineno}: bad value for {k}");
                match k {
                    "horizon" => horizon = Some(v.parse::<f64>().map_err(|_| bad())?),
                    "users" => users = Some(v.parse::<usize>().map_err(|_| bad())?),
                    "cells" => cells = Some(v.parse::<usize>().map_err(|_| bad())?),
                    _ => {}
                }
            }
            continue;
        }
        if !header_seen {
            if line != "time,user,cell,kind" {
                bail!("trace line {lineno}: expected header time,user,cell,kind");
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let [time, user, cell, kind] = fields[..] else {
            bail!("trace line {lineno}: expected 4 fields");
        };
        let bad = |what: &str| anyhow!("trace line {lineno}: bad {what}");
        let kind = match kind {
            "enter" => ContactKind::Enter,
            "exit" => ContactKind::Exit,
            _ => return Err(bad("kind")),
        };
        events.push(ContactEvent {
            time: time.parse().map_err(|_| bad("time"))?,
            user: user.parse().map_err(|_| bad("user"))?,
            cell: cell.parse().map_err(|_| bad("cell"))?,
            kind,
        });
    }
    let horizon = horizon.unwrap_or_else(|| events.iter().map(|e| e.time).fold(0.0, f64::max));
    let users = users.unwrap_or_else(|| events.iter().map(|e| e.user + 1).max().unwrap_or(0));
    let cells = cells.unwrap_or_else(|| events.iter().map(|e| e.cell + 1).max().unwrap_or(0));
    events.sort_by(ContactEvent::order);
    ContactTrace::new(events, horizon, users, cells).map_err(|e| anyhow!("trace: {e}"))
}

/// Columns every hit-statistics CSV carries, in order.
pub const HIT_COLUMNS: [&str; 9] = [
    "mode",
    "policy",
    "seed",
    "requests",
    "full_hits",
    "soft_hits",
    "misses",
    "utility",
    "expensive_accesses",
];

/// One simulation run. `keys` hold the sweep coordinates (e.g. `ttl`,
/// `capacity`) and are written as leading columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub keys: Vec<(String, String)>,
    pub mode: String,
    pub policy: String,
    pub seed: u64,
    pub requests: u64,
    pub full_hits: u64,
    pub soft_hits: u64,
    pub misses: u64,
    pub utility: f64,
    pub expensive_accesses: f64,
}

impl RunRecord {
    pub fn new(keys: Vec<(String, String)>, mode: &str, policy: &str, seed: u64, stats: &HitStats) -> Self {
        Self {
            keys,
            mode: mode.to_string(),
            policy: policy.to_string(),
            seed,
            requests: stats.requests,
            full_hits: stats.full_hits,
            soft_hits: stats.soft_hits,
            misses: stats.misses,
            utility: stats.utility,
            expensive_accesses: stats.expensive_accesses,
        }
    }

    pub fn hit_ratio(&self) -> f64 {
        if self.requests == 0 {
            return 0.0;
        }
        (self.full_hits + self.soft_hits) as f64 / self.requests as f64
    }
}

pub fn write_runs(w: impl Write, runs: &[RunRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let key_names: Vec<&str> = runs
        .first()
        .map_or(Vec::new(), |r| r.keys.iter().map(|(k, _)| k.as_str()).collect());
    let header: Vec<&str> = key_names.iter().copied().chain(HIT_COLUMNS).collect();
    out.write_record(&header)?;
    for r in runs {
        if r.keys.len() != key_names.len() || r.keys.iter().zip(&key_names).any(|((k, _), n)| k != n) {
            bail!("runs in one file must share their key columns");
        }
        let mut rec: Vec<String> = r.keys.iter().map(|(_, v)| v.clone()).collect();
        rec.extend([
            r.mode.clone(),
            r.policy.clone(),
            r.seed.to_string(),
            r.requests.to_string(),
            r.full_hits.to_string(),
            r.soft_hits.to_string(),
            r.misses.to_string(),
            r.utility.to_string(),
            r.expensive_accesses.to_string(),
        ]);
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_runs(r: impl Read) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| anyhow!("missing column {name}"))
    };
    let idx: Vec<usize> = HIT_COLUMNS.iter().map(|c| find(c)).collect::<Result<_>>()?;
    let keys: Vec<(usize, String)> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| !HIT_COLUMNS.contains(h))
        .map(|(i, h)| (i, h.to_string()))
        .collect();
    let mut runs = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = n + 2;
        let field = |c: usize| rec.get(idx[c]).unwrap_or("");
        let num = |c: usize| -> Result<f64> {
            field(c)
                .parse()
                .map_err(|_| anyhow!("line {line}: bad {}", HIT_COLUMNS[c]))
        };
        let int = |c: usize| -> Result<u64> {
            field(c)
                .parse()
                .map_err(|_| anyhow!("line {line}: bad {}", HIT_COLUMNS[c]))
        };
        runs.push(RunRecord {
            keys: keys
                .iter()
                .map(|(i, k)| (k.clone(), rec.get(*i).unwrap_or("").to_string()))
                .collect(),
            mode: field(0).to_string(),
            policy: field(1).to_string(),
            seed: int(2)?,
            requests: int(3)?,
            full_hits: int(4)?,
            soft_hits: int(5)?,
            misses: int(6)?,
            utility: num(7)?,
            expensive_accesses: num(8)?,
        });
    }
    Ok(runs)
}
