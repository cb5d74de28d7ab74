//! Hit-ratio objectives and placement optimization.
//!
//! A placement `N` gives, for every content, the (continuous) number of
//! small-cell caches holding a copy. With exponential meetings of rate `λ`
//! and a deadline `T`, a content held by `N` caches is missed with
//! probability `exp(-λ T N)`; every objective here is built from that term.

mod baseline;
mod femto;
mod gain;
mod integerize;
mod objective;
mod projection;
mod u_aware;

pub use baseline::{base_miss_rate, kkt_residual, solve_baseline, Thresholds};
pub use femto::{femto_hit_probability, StorageMatrix};
pub use gain::{analytic_gain_case1, uniform_popularity_gain};
pub use integerize::{integerize, IntegerPlacement, RoundingMode};
pub use objective::{g_base, g_sch1, g_sch2, gradient_base, gradient_sch1, gradient_sch2, hessian_case2, p_miss};
pub use projection::project_capped_simplex;
pub use u_aware::{solve_u_aware_case1, solve_u_aware_case2};

use alloc::vec::Vec;

/// Exponential meeting model: rate `lambda` per user/cell pair, deadline `ttl`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccessModel {
    lambda: f64,
    ttl: f64,
}

impl AccessModel {
    pub fn new(lambda: f64, ttl: f64) -> Result<Self, PlacementError> {
        if !(lambda > 0.0 && lambda.is_finite() && ttl > 0.0 && ttl.is_finite()) {
            return Err(PlacementError::InvalidParameter("lambda and ttl must be positive"));
        }
        Ok(Self { lambda, ttl })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn ttl(&self) -> f64 {
        self.ttl
    }

    /// `λ T`, the only combination the objectives depend on.
    pub fn rate_ttl(&self) -> f64 {
        self.lambda * self.ttl
    }
}

/// Slack allowed when checking placement constraints.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Continuous replica counts over `cells` caches of `capacity` contents each.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementVector {
    n: Vec<f64>,
    cells: usize,
    capacity: usize,
}

impl PlacementVector {
    /// Checks `0 <= n_i <= M` and `sum n_i <= M * C`.
    pub fn new(n: Vec<f64>, cells: usize, capacity: usize) -> Result<Self, PlacementError> {
        let p = Self { n, cells, capacity };
        p.check()?;
        Ok(p)
    }

    pub fn zeros(k: usize, cells: usize, capacity: usize) -> Self {
        Self {
            n: alloc::vec![0.0; k],
            cells,
            capacity,
        }
    }

    fn check(&self) -> Result<(), PlacementError> {
        let m = self.cells as f64;
        if self
            .n
            .iter()
            .any(|&x| !x.is_finite() || x < -FEASIBILITY_TOL || x > m + FEASIBILITY_TOL)
        {
            return Err(PlacementError::Infeasible("replica count outside [0, M]"));
        }
        if self.total() > self.budget() + FEASIBILITY_TOL {
            return Err(PlacementError::Infeasible("total replicas exceed M * C"));
        }
        Ok(())
    }

    pub fn n(&self) -> &[f64] {
        &self.n
    }

    pub fn len(&self) -> usize {
        self.n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n.is_empty()
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Total replica budget `M * C`.
    pub fn budget(&self) -> f64 {
        (self.cells * self.capacity) as f64
    }

    pub fn total(&self) -> f64 {
        self.n.iter().sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.n
    }
}

/// Knobs for the projected-gradient solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Stop once the projected-gradient norm falls to this value.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Armijo sufficient-increase constant.
    pub armijo: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 10_000,
            armijo: 1e-4,
        }
    }
}

/// Outcome of a placement solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub objective_value: f64,
    pub iterations: usize,
    pub kkt_residual: f64,
    /// Multiplier of the total-capacity constraint (0 when it is slack).
    pub rho: f64,
    pub projected_gradient_norm: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlacementError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("constraint violation: {0}")]
    Infeasible(&'static str),
    #[error("wrong relation case: {0}")]
    WrongCase(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("formula not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("numeric failure: {0}")]
    NumericFailure(&'static str),
}

pub(crate) fn check_capacity(k: usize, cells: usize, capacity: usize) -> Result<(), PlacementError> {
    if k == 0 {
        return Err(PlacementError::InvalidParameter("catalog is empty"));
    }
    if cells == 0 || capacity == 0 {
        return Err(PlacementError::InvalidParameter("M and C must be at least 1"));
    }
    Ok(())
}
