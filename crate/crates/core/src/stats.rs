//! Small summary statistics shared by the simulators and sweeps.

use crate::math::sqrt;

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanSe {
    /// Summarizes a sample. An empty sample yields zeros; a singleton has `se = 0`.
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self::default();
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Self { mean, se: 0.0, n };
        }
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        Self {
            mean,
            se: sqrt(var / n as f64),
            n,
        }
    }
}

/// Standard error of a Bernoulli proportion `p` estimated from `n` trials.
pub fn proportion_se(p: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    sqrt((p * (1.0 - p)).max(0.0) / n as f64)
}

/// Relative gain `treated / control - 1` with a delta-method standard error.
pub fn relative_gain(treated: MeanSe, control: MeanSe) -> (f64, f64) {
    if control.mean == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let ratio = treated.mean / control.mean;
    let rel_t = if treated.mean != 0.0 {
        treated.se / treated.mean
    } else {
        0.0
    };
    let rel_c = control.se / control.mean;
    (ratio - 1.0, ratio.abs() * sqrt(rel_t * rel_t + rel_c * rel_c))
}
