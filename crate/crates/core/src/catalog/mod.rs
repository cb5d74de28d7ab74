//! Content catalogs, popularity laws and content-relation graphs.

mod graph;
mod ingest;
mod popularity;

pub use graph::{
    graph_stats, make_popularity_proportional_u, make_random_u, popularity_normalization, GraphStats, RelationCase,
    UtilityGraph,
};
pub use ingest::{ingest_related_graph, IngestedDataset, ParseError};
pub use popularity::{make_zipf_catalog, make_zipf_catalog_ranked, ContentCatalog};

/// Errors raised while building catalogs and relation graphs.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CatalogError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("invalid dataset: {0}")]
    InvalidDataset(&'static str),
}
