use alloc::vec::Vec;

use super::{check_capacity, objective, AccessModel, PlacementError, PlacementVector, SolveReport};
use crate::catalog::ContentCatalog;
use crate::math::{exp, ln};

/// Popularity cut-offs of the water-filling solution for a multiplier `rho`:
/// contents below `lower` get no copy, contents above `upper` get `M` copies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub lower: f64,
    pub upper: f64,
}

impl Thresholds {
    pub fn new(rho: f64, model: &AccessModel, cells: usize) -> Self {
        let a = model.rate_ttl();
        Self {
            lower: rho / a,
            upper: rho / a * exp(a * cells as f64),
        }
    }

    /// True when every popularity lies in `[lower, upper]`, i.e. no copy
    /// count is clipped by the box constraint.
    pub fn all_interior(&self, popularity: &[f64]) -> bool {
        const REL: f64 = 1e-12;
        popularity
            .iter()
            .all(|&p| p >= self.lower * (1.0 - REL) && p <= self.upper * (1.0 + REL))
    }
}

const MAX_BISECTIONS: usize = 2_000;

fn fill(log_ap: &[f64], a: f64, cap: f64, ln_rho: f64) -> impl Iterator<Item = f64> + '_ {
    log_ap.iter().map(move |&l| ((l - ln_rho) / a).clamp(0.0, cap))
}

/// Optimal placement without soft hits (continuous relaxation).
///
/// `N_i = clamp(ln(p_i λT / ρ) / λT, 0, M)` with the multiplier `ρ` found by
/// bisection (on `ln ρ`) so that the copies exhaust `M * C`. Once the
/// bisection has identified which contents are clipped, `ln ρ` is recomputed
/// in closed form from the unclipped ones, which leaves a capacity residual
/// at rounding level.
pub fn solve_baseline(
    catalog: &ContentCatalog,
    model: &AccessModel,
    cells: usize,
    capacity: usize,
) -> Result<(PlacementVector, SolveReport), PlacementError> {
    let k = catalog.len();
    check_capacity(k, cells, capacity)?;
    let a = model.rate_ttl();
    let cap = cells as f64;
    let budget = (cells * capacity) as f64;

    if k <= capacity {
        let placement = PlacementVector::new(alloc::vec![cap; k], cells, capacity)?;
        return Ok((placement.clone(), report(catalog, model, &placement, 0.0, 0)?));
    }

    let log_ap: Vec<f64> = catalog.popularity().iter().map(|&p| ln(a * p)).collect();
    let total = |ln_rho: f64| fill(&log_ap, a, cap, ln_rho).sum::<f64>();
    let max_l = log_ap.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_l = log_ap.iter().cloned().fold(f64::INFINITY, f64::min);
    // every content saturated at `lo`, none placed at `hi`
    let (mut lo, mut hi) = (min_l - a * cap - 1.0, max_l);
    let mut iterations = 0;
    while iterations < MAX_BISECTIONS {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if total(mid) > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut ln_rho = hi;
    let (mut free, mut saturated, mut free_sum) = (0usize, 0usize, 0.0);
    for (&l, n) in log_ap.iter().zip(fill(&log_ap, a, cap, ln_rho)) {
        if n >= cap {
            saturated += 1;
        } else if n > 0.0 {
            free += 1;
            free_sum += l;
        }
    }
    if free > 0 {
        let exact = (free_sum - a * (budget - cap * saturated as f64)) / free as f64;
        if (total(exact) - budget).abs() <= (total(ln_rho) - budget).abs() {
            ln_rho = exact;
        }
    }
    let residual = (total(ln_rho) - budget).abs();
    if residual > 1e-9 * budget {
        return Err(PlacementError::NumericFailure(
            "water-filling bisection did not converge",
        ));
    }

    let n: Vec<f64> = fill(&log_ap, a, cap, ln_rho).collect();
    let placement = PlacementVector::new(n, cells, capacity)?;
    let rho = exp(ln_rho);
    Ok((placement.clone(), report(catalog, model, &placement, rho, iterations)?))
}

fn report(
    catalog: &ContentCatalog,
    model: &AccessModel,
    placement: &PlacementVector,
    rho: f64,
    iterations: usize,
) -> Result<SolveReport, PlacementError> {
    let grad = objective::gradient_base(catalog, placement.n(), model)?;
    let kkt = kkt_residual(&grad, placement.n(), placement.cells() as f64, placement.budget(), rho);
    Ok(SolveReport {
        objective_value: objective::g_base(catalog, placement, model)?,
        iterations,
        kkt_residual: kkt,
        rho,
        projected_gradient_norm: super::u_aware::projected_gradient_norm(
            placement.n(),
            &grad,
            placement.cells() as f64,
            placement.budget(),
        ),
        converged: true,
    })
}

/// Miss ratio `Kρ / λT` of the water-filling placement when no copy count is clipped.
pub fn base_miss_rate(k: usize, model: &AccessModel, rho: f64) -> f64 {
    k as f64 * rho / model.rate_ttl()
}

/// Largest violation of the KKT conditions of
/// `max g(N) s.t. 0 <= N_i <= M, Σ N_i <= B` for gradient `grad` and capacity
/// multiplier `rho`, relative to the largest gradient entry.
///
/// Checked: stationarity of unclipped coordinates (`g_i = ρ`), sign
/// conditions at the bounds, complementary slackness of the budget and
/// primal feasibility.
pub fn kkt_residual(grad: &[f64], n: &[f64], cap: f64, budget: f64, rho: f64) -> f64 {
    let scale = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let bound_tol = 1e-12 * cap.max(1.0);
    let mut worst: f64 = if rho < 0.0 { -rho / scale } else { 0.0 };
    for (&g, &x) in grad.iter().zip(n) {
        let v = if x <= bound_tol {
            (g - rho).max(0.0)
        } else if x >= cap - bound_tol {
            (rho - g).max(0.0)
        } else {
            (g - rho).abs()
        };
        worst = worst.max(v / scale);
        worst = worst.max((-x).max(x - cap).max(0.0) / cap.max(1.0));
    }
    let slack = budget - n.iter().sum::<f64>();
    let denom = budget.max(1.0);
    worst = worst.max(rho / scale * slack.abs() / denom);
    worst.max((-slack).max(0.0) / denom)
}
