use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::CatalogError;
use crate::math::powf;

/// Request probabilities over `K` equally sized contents.
#[derive(Debug, Clone, PartialEq)]
pub struct ContentCatalog {
    popularity: Vec<f64>,
}

impl ContentCatalog {
    /// Builds a catalog from nonnegative weights, normalizing them to sum to one.
    ///
    /// Every weight must be strictly positive and finite.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self, CatalogError> {
        if weights.is_empty() {
            return Err(CatalogError::InvalidParameter("catalog must hold at least one content"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(CatalogError::InvalidParameter(
                "popularity weights must be positive and finite",
            ));
        }
        let total: f64 = weights.iter().sum();
        let mut popularity: Vec<f64> = weights.into_iter().map(|w| w / total).collect();
        // one compensation pass keeps the sum within a few ulps of 1
        let residual = 1.0 - popularity.iter().sum::<f64>();
        if let Some(max) = popularity.iter_mut().max_by(|a, b| a.partial_cmp(b).unwrap()) {
            *max += residual;
        }
        Ok(Self { popularity })
    }

    pub fn len(&self) -> usize {
        self.popularity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.popularity.is_empty()
    }

    pub fn popularity(&self) -> &[f64] {
        &self.popularity
    }

    pub fn p(&self, i: usize) -> f64 {
        self.popularity[i]
    }

    /// Content indices ordered from most to least popular (ties by index).
    pub fn ranked(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            self.popularity[b]
                .partial_cmp(&self.popularity[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        idx
    }

    /// Cumulative distribution, for inverse-CDF sampling of requests.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = self
            .popularity
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        cdf
    }
}

fn zipf_weights(k: usize, alpha: f64) -> Result<Vec<f64>, CatalogError> {
    if k == 0 {
        return Err(CatalogError::InvalidParameter("K must be at least 1"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(CatalogError::InvalidParameter("Zipf exponent must be positive"));
    }
    Ok((1..=k).map(|rank| powf(rank as f64, -alpha)).collect())
}

/// Zipf popularity `p ∝ rank^-alpha` where content `i` receives rank `i + 1`.
pub fn make_zipf_catalog_ranked(k: usize, alpha: f64) -> Result<ContentCatalog, CatalogError> {
    ContentCatalog::from_weights(zipf_weights(k, alpha)?)
}

/// Zipf popularity with ranks assigned to contents by a seeded random permutation.
pub fn make_zipf_catalog(k: usize, alpha: f64, seed: u64) -> Result<ContentCatalog, CatalogError> {
    let mut weights = zipf_weights(k, alpha)?;
    weights.shuffle(&mut crate::rng_from_seed(seed));
    ContentCatalog::from_weights(weights)
}
