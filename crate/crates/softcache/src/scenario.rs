//! Builds catalogs, relation graphs and traces from configuration specs.

use anyhow::{anyhow, bail, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use softcache_core::catalog::{
    ingest_related_graph, make_popularity_proportional_u, make_random_u, make_zipf_catalog, make_zipf_catalog_ranked,
    popularity_normalization, ContentCatalog, RelationCase, UtilityGraph,
};
use softcache_core::contact::{estimate_lambda, exponential_trace, generate_tvcm_trace, ContactTrace};

use crate::config::{CatalogSpec, ContactSpec, ExperimentConfig, RelationClass};
use crate::formats::{read_to_string, read_trace, synthetic_ids};

/// Independent sub-seeds for the different generators driven by one seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub const CATALOG_STREAM: u64 = 1;
pub const GRAPH_STREAM: u64 = 2;
pub const TRACE_STREAM: u64 = 3;

/// A catalog with its content ids and, for crawled-style sources, its graph.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub catalog: ContentCatalog,
    pub graph: Option<UtilityGraph>,
    pub ids: Vec<String>,
}

/// Edge and popularity file contents of a crawl-like dataset.
///
/// View counts follow Zipf(`alpha`) over a random ranking, with a share of
/// items reporting zero views. Each item lists `links` related items, each
/// picked by popularity with probability `popular_share` and uniformly
/// otherwise.
pub fn synthetic_related_texts(
    contents: usize,
    alpha: f64,
    links: usize,
    popular_share: f64,
    zero_view_share: f64,
    seed: u64,
) -> Result<(String, String)> {
    if contents < 2 || !(alpha > 0.0) || !(0.0..=1.0).contains(&popular_share) || !(0.0..1.0).contains(&zero_view_share)
    {
        bail!("invalid synthetic dataset parameters");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rank: Vec<usize> = (1..=contents).collect();
    rank.shuffle(&mut rng);
    const TOP_VIEWS: f64 = 1e6;
    let views: Vec<u64> = rank
        .iter()
        .map(|&r| {
            if rng.gen_bool(zero_view_share) {
                0
            } else {
                (TOP_VIEWS * (r as f64).powf(-alpha)).ceil() as u64
            }
        })
        .collect();
    let total: f64 = views.iter().map(|&v| v as f64).sum();
    let mut cdf = Vec::with_capacity(contents);
    let mut acc = 0.0;
    for &v in &views {
        acc += v as f64 / total;
        cdf.push(acc);
    }
    let ids = synthetic_ids(contents);
    let mut edges = String::new();
    for i in 0..contents {
        let mut picked = Vec::with_capacity(links);
        while picked.len() < links {
            let j = if rng.gen_bool(popular_share) {
                let u: f64 = rng.gen();
                cdf.partition_point(|&c| c <= u).min(contents - 1)
            } else {
                rng.gen_range(0..contents)
            };
            if j != i && !picked.contains(&j) {
                picked.push(j);
            }
        }
        for j in picked {
            edges.push_str(&format!("{} {}\n", ids[i], ids[j]));
        }
    }
    let popularity = ids.iter().zip(&views).map(|(id, v)| format!("{id} {v}\n")).collect();
    Ok((edges, popularity))
}

pub fn build_dataset(spec: &CatalogSpec, seed: u64) -> Result<Dataset> {
    let seed = derive_seed(seed, CATALOG_STREAM);
    match spec {
        &CatalogSpec::Zipf {
            contents,
            alpha,
            identity_ranks,
        } => {
            let catalog = if identity_ranks {
                make_zipf_catalog_ranked(contents, alpha)
            } else {
                make_zipf_catalog(contents, alpha, seed)
            }
            .map_err(|e| anyhow!("{e}"))?;
            Ok(Dataset {
                catalog,
                graph: None,
                ids: synthetic_ids(contents),
            })
        }
        CatalogSpec::Dataset { edges, popularity } => {
            let ds = ingest_related_graph(&read_to_string(edges)?, &read_to_string(popularity)?)
                .map_err(|e| anyhow!("{e}"))?;
            Ok(Dataset {
                catalog: ds.catalog,
                graph: Some(ds.graph),
                ids: ds.ids,
            })
        }
        &CatalogSpec::SyntheticRelated {
            contents,
            alpha,
            links_per_content,
            popular_share,
            zero_view_share,
        } => {
            let (edges, pop) =
                synthetic_related_texts(contents, alpha, links_per_content, popular_share, zero_view_share, seed)?;
            let ds = ingest_related_graph(&edges, &pop).map_err(|e| anyhow!("{e}"))?;
            Ok(Dataset {
                catalog: ds.catalog,
                graph: Some(ds.graph),
                ids: ds.ids,
            })
        }
    }
}

/// Relation graph of the given class with mean row degree `degree` (before
/// any symmetrization); `case` only sets the stored utility.
pub fn build_relations(
    dataset: &Dataset,
    class: RelationClass,
    degree: f64,
    symmetrize: bool,
    case: RelationCase,
    seed: u64,
) -> Result<UtilityGraph> {
    let seed = derive_seed(seed, GRAPH_STREAM);
    let k = dataset.catalog.len();
    let graph = match class {
        RelationClass::None => UtilityGraph::empty(k, case),
        RelationClass::Random => make_random_u(&dataset.catalog, degree, case, seed).map_err(|e| anyhow!("{e}"))?,
        RelationClass::Popularity if degree == 0.0 => UtilityGraph::empty(k, case),
        RelationClass::Popularity => {
            let l_prime = popularity_normalization(&dataset.catalog, degree).map_err(|e| anyhow!("{e}"))?;
            make_popularity_proportional_u(&dataset.catalog, l_prime, case, seed, symmetrize)
                .map_err(|e| anyhow!("{e}"))?
        }
        RelationClass::Dataset => dataset
            .graph
            .as_ref()
            .ok_or_else(|| anyhow!("catalog has no relation graph"))?
            .with_case(case)
            .map_err(|e| anyhow!("{e}"))?,
    };
    Ok(graph)
}

pub fn build_trace(spec: &ContactSpec, seed: u64) -> Result<ContactTrace> {
    let seed = derive_seed(seed, TRACE_STREAM);
    match spec {
        ContactSpec::Tvcm(t) => generate_tvcm_trace(&t.mobility(seed)?).map_err(|e| anyhow!("{e}")),
        &ContactSpec::Exponential {
            users,
            cells,
            lambda,
            horizon,
        } => exponential_trace(users, cells, lambda, horizon, seed).map_err(|e| anyhow!("{e}")),
        ContactSpec::File { path } => {
            read_trace(std::fs::File::open(path).map_err(|e| anyhow!("{}: {e}", path.display()))?)
        }
    }
}

/// Meeting rate for analytic placement: the configured value or a trace estimate.
pub fn resolve_lambda(cfg: &ExperimentConfig, trace: &ContactTrace) -> Result<(f64, &'static str)> {
    match cfg.lambda {
        Some(l) => Ok((l, "config")),
        None => Ok((estimate_lambda(trace).map_err(|e| anyhow!("{e}"))?, "estimated")),
    }
}
