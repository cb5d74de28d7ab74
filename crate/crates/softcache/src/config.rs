//! Declarative experiment configuration (JSON).
//!
//! Every field has a default; the defaults form the reference preset
//! (K = 1000 Zipf(2) contents, 25 cells of range 100 m over three
//! communities, Q ∈ {5, 20}, TTL ∈ {1, 5, 20} min, c = 0.5).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use softcache_core::contact::{CellLayout, MobilityConfig, Rect};
use softcache_core::placement::RoundingMode;
use softcache_core::protocol::{AccessMode, Policy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CatalogSpec {
    /// Zipf popularity; ranks are shuffled unless `identity_ranks` is set.
    Zipf {
        contents: usize,
        alpha: f64,
        #[serde(default)]
        identity_ranks: bool,
    },
    /// Edge and popularity files, preprocessed like a crawled dataset.
    Dataset { edges: PathBuf, popularity: PathBuf },
    /// Generated crawl-like dataset (heavy-tailed views, related lists
    /// biased toward popular items), run through the same preprocessing.
    SyntheticRelated {
        contents: usize,
        alpha: f64,
        links_per_content: usize,
        popular_share: f64,
        zero_view_share: f64,
    },
}

impl CatalogSpec {
    pub fn has_graph(&self) -> bool {
        !matches!(self, CatalogSpec::Zipf { .. })
    }

    pub fn synthetic_related_default() -> Self {
        CatalogSpec::SyntheticRelated {
            contents: 2100,
            alpha: 0.8,
            links_per_content: 3,
            popular_share: 0.5,
            zero_view_share: 0.03,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationClass {
    None,
    Random,
    Popularity,
    /// The graph that came with the catalog.
    Dataset,
}

impl RelationClass {
    pub fn name(&self) -> &'static str {
        match self {
            RelationClass::None => "none",
            RelationClass::Random => "random",
            RelationClass::Popularity => "popularity",
            RelationClass::Dataset => "dataset",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelationSpec {
    pub class: RelationClass,
    /// Mean number of related contents per content, `L`.
    pub degree: f64,
    /// Union the popularity-proportional graph with its transpose.
    pub symmetrize: bool,
}

impl Default for RelationSpec {
    fn default() -> Self {
        Self {
            class: RelationClass::Random,
            degree: 5.0,
            symmetrize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TvcmSpec {
    pub area: f64,
    /// `[x0, y0, x1, y1]` rectangles.
    pub communities: Vec<[f64; 4]>,
    pub home_fraction: f64,
    pub roaming_epoch_mean: f64,
    pub cells: usize,
    pub cell_range: f64,
    /// `grid` or `random`.
    pub cell_layout: String,
    pub users: usize,
    pub speed: [f64; 2],
    pub pause: [f64; 2],
    pub horizon: f64,
}

impl Default for TvcmSpec {
    fn default() -> Self {
        let d = MobilityConfig::default();
        Self {
            area: d.area,
            communities: d.communities.iter().map(|r| [r.x0, r.y0, r.x1, r.y1]).collect(),
            home_fraction: d.home_fraction,
            roaming_epoch_mean: d.roaming_epoch_mean,
            cells: d.cells,
            cell_range: d.cell_range,
            cell_layout: "grid".into(),
            users: d.users,
            speed: [d.speed.0, d.speed.1],
            pause: [d.pause.0, d.pause.1],
            horizon: d.horizon,
        }
    }
}

impl TvcmSpec {
    pub fn mobility(&self, seed: u64) -> Result<MobilityConfig> {
        let cell_layout = match self.cell_layout.as_str() {
            "grid" => CellLayout::Grid,
            "random" => CellLayout::Random,
            other => bail!("unknown cell layout {other:?}"),
        };
        Ok(MobilityConfig {
            area: self.area,
            communities: self
                .communities
                .iter()
                .map(|c| Rect::new(c[0], c[1], c[2], c[3]))
                .collect(),
            home_fraction: self.home_fraction,
            roaming_epoch_mean: self.roaming_epoch_mean,
            cells: self.cells,
            cell_range: self.cell_range,
            cell_layout,
            users: self.users,
            speed: (self.speed[0], self.speed[1]),
            pause: (self.pause[0], self.pause[1]),
            horizon: self.horizon,
            seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContactSpec {
    Tvcm(TvcmSpec),
    Exponential {
        users: usize,
        cells: usize,
        lambda: f64,
        horizon: f64,
    },
    /// A trace CSV written by `gen-trace`.
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyName {
    Base,
    Sch1,
    Sch2,
}

impl PolicyName {
    pub fn policy(self) -> Policy {
        match self {
            PolicyName::Base => Policy::Base,
            PolicyName::Sch1 => Policy::Sch1,
            PolicyName::Sch2 => Policy::Sch2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    None,
    Sch1,
    Sch2,
}

impl ModeName {
    pub fn mode(self, c: f64) -> AccessMode {
        match self {
            ModeName::None => AccessMode::None,
            ModeName::Sch1 => AccessMode::Sch1,
            ModeName::Sch2 => AccessMode::Sch2(c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    Round,
    Fractional,
}

impl Rounding {
    pub fn mode(self) -> RoundingMode {
        match self {
            Rounding::Round => RoundingMode::Round,
            Rounding::Fractional => RoundingMode::Fractional,
        }
    }
}

/// Hit ratio against relation density, under the water-filling placement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensitySweep {
    pub degrees: Vec<f64>,
    pub classes: Vec<RelationClass>,
    pub ttl: f64,
    pub capacity: usize,
    pub modes: Vec<ModeName>,
}

impl Default for DensitySweep {
    fn default() -> Self {
        Self {
            degrees: vec![0.0, 1.0, 2.0, 5.0, 10.0],
            classes: vec![RelationClass::Random, RelationClass::Popularity],
            ttl: 300.0,
            capacity: 20,
            modes: vec![ModeName::None, ModeName::Sch1, ModeName::Sch2],
        }
    }
}

/// Placement policies compared under SCH1 access.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyBars {
    pub degree: f64,
    pub classes: Vec<RelationClass>,
    pub ttls: Vec<f64>,
    pub capacity: usize,
    pub policies: Vec<PolicyName>,
}

impl Default for PolicyBars {
    fn default() -> Self {
        Self {
            degree: 5.0,
            classes: vec![RelationClass::Random, RelationClass::Popularity],
            ttls: vec![60.0, 1200.0],
            capacity: 5,
            policies: vec![PolicyName::Base, PolicyName::Sch1],
        }
    }
}

/// Soft-hit gains over a TTL × capacity grid on a related-content graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainGrid {
    pub catalog: CatalogSpec,
    pub ttls: Vec<f64>,
    pub capacities: Vec<usize>,
}

impl Default for GainGrid {
    fn default() -> Self {
        Self {
            catalog: CatalogSpec::synthetic_related_default(),
            ttls: vec![60.0, 1200.0],
            capacities: vec![5, 50],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Figures {
    pub density: Option<DensitySweep>,
    pub policy_bars: Option<PolicyBars>,
    pub gain_grid: Option<GainGrid>,
}

impl Default for Figures {
    fn default() -> Self {
        Self {
            density: Some(DensitySweep::default()),
            policy_bars: Some(PolicyBars::default()),
            gain_grid: Some(GainGrid::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for catalogs, graphs and traces.
    pub seed: u64,
    pub catalog: CatalogSpec,
    pub relations: RelationSpec,
    pub contact: ContactSpec,
    /// Meeting rate for the analytic placement; estimated from the trace when absent.
    pub lambda: Option<f64>,
    /// Deadlines, seconds.
    pub ttl: Vec<f64>,
    /// Per-cell capacities (Q).
    pub capacity: Vec<usize>,
    /// Utility of a related content in Case 2.
    pub c: f64,
    pub policies: Vec<PolicyName>,
    pub modes: Vec<ModeName>,
    /// Replication seeds: each drives one request stream and cache assignment.
    pub seeds: Vec<u64>,
    pub requests_per_seed: usize,
    pub rounding: Rounding,
    pub figures: Figures,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            catalog: CatalogSpec::Zipf {
                contents: 1000,
                alpha: 2.0,
                identity_ranks: false,
            },
            relations: RelationSpec::default(),
            contact: ContactSpec::Tvcm(TvcmSpec::default()),
            lambda: None,
            ttl: vec![60.0, 300.0, 1200.0],
            capacity: vec![5, 20],
            c: 0.5,
            policies: vec![PolicyName::Base, PolicyName::Sch1, PolicyName::Sch2],
            modes: vec![ModeName::None, ModeName::Sch1, ModeName::Sch2],
            seeds: (1..=10).collect(),
            requests_per_seed: 10_000,
            rounding: Rounding::Round,
            figures: Figures::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = crate::formats::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Ok(cfg.resolve_paths(base))
    }

    /// Makes dataset and trace paths relative to the config file's directory.
    fn resolve_paths(mut self, base: &Path) -> Self {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for spec in [
            Some(&mut self.catalog),
            self.figures.gain_grid.as_mut().map(|g| &mut g.catalog),
        ]
        .into_iter()
        .flatten()
        {
            if let CatalogSpec::Dataset { edges, popularity } = spec {
                fix(edges);
                fix(popularity);
            }
        }
        if let ContactSpec::File { path } = &mut self.contact {
            fix(path);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let nonempty = |name: &str, len: usize| -> Result<()> {
            if len == 0 {
                bail!("{name} must not be empty");
            }
            Ok(())
        };
        nonempty("ttl", self.ttl.len())?;
        nonempty("capacity", self.capacity.len())?;
        nonempty("policies", self.policies.len())?;
        nonempty("modes", self.modes.len())?;
        nonempty("seeds", self.seeds.len())?;
        if self.requests_per_seed == 0 {
            bail!("requests_per_seed must be positive");
        }
        if self.ttl.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            bail!("every ttl must be positive");
        }
        if self.capacity.contains(&0) {
            bail!("every capacity must be at least 1");
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            bail!("c must lie in (0, 1)");
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                bail!("lambda must be positive");
            }
        }
        if self.relations.class == RelationClass::Dataset && !self.catalog.has_graph() {
            bail!("relation class \"dataset\" needs a dataset or synthetic_related catalog");
        }
        if let Some(d) = &self.figures.density {
            nonempty("figures.density.degrees", d.degrees.len())?;
            nonempty("figures.density.classes", d.classes.len())?;
            nonempty("figures.density.modes", d.modes.len())?;
            if d.classes.contains(&RelationClass::Dataset) {
                bail!("figures.density.classes cannot use the dataset graph");
            }
        }
        if let Some(b) = &self.figures.policy_bars {
            nonempty("figures.policy_bars.classes", b.classes.len())?;
            nonempty("figures.policy_bars.ttls", b.ttls.len())?;
            nonempty("figures.policy_bars.policies", b.policies.len())?;
        }
        if let Some(g) = &self.figures.gain_grid {
            nonempty("figures.gain_grid.ttls", g.ttls.len())?;
            nonempty("figures.gain_grid.capacities", g.capacities.len())?;
            if !g.catalog.has_graph() {
                bail!("figures.gain_grid.catalog must carry a relation graph");
            }
        }
        Ok(())
    }

    /// Canonical JSON used for hashing and the manifest.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
