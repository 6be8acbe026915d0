use std::ops::RangeBounds;

use crate::error::{Error, Result};
use crate::solvers::Trace;

pub const MIN_FIT_POINTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    FxGap,
    FyGap,
    Rho,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::FxGap => "f_x_gap",
            Metric::FyGap => "f_y_gap",
            Metric::Rho => "rho",
        }
    }
}

/// Least-squares fit of `ln(metric)` against the iteration count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Per-iteration log-slope.
    pub slope: f64,
    pub intercept: f64,
    /// First and last iteration in the window.
    pub window: (u64, u64),
    pub points: usize,
    /// Root-mean-square residual of the log fit.
    pub residual: f64,
}

impl RateFit {
    /// Iterations to shrink the metric by `eps`; infinite unless decaying.
    pub fn complexity(&self, eps: f64) -> f64 {
        if self.slope < 0.0 {
            (1.0 / eps).ln() / -self.slope
        } else {
            f64::INFINITY
        }
    }

    pub fn converging(&self) -> bool {
        self.slope < 0.0
    }
}

pub fn fit_rate(trace: &Trace, metric: Metric, window: impl RangeBounds<u64>) -> Result<RateFit> {
    let mut ks = Vec::new();
    let mut values = Vec::new();
    for c in trace.checkpoints.iter().filter(|c| window.contains(&c.k)) {
        let value = match metric {
            Metric::FxGap => c.f_x_gap,
            Metric::FyGap => c.f_y_gap,
            Metric::Rho => c.rho.ok_or_else(|| {
                Error::InvalidParameter(format!("checkpoint {} has no Lyapunov value", c.k))
            })?,
        };
        ks.push(c.k);
        values.push(value);
    }
    fit_series(&ks, &values)
}

pub fn fit_series(ks: &[u64], values: &[f64]) -> Result<RateFit> {
    if ks.len() != values.len() {
        return Err(Error::InvalidParameter("iteration and value counts differ".into()));
    }
    if ks.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidParameter(format!(
            "rate fit needs at least {MIN_FIT_POINTS} checkpoints, got {}",
            ks.len()
        )));
    }
    if let Some(bad) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Numeric(format!("metric must be positive for a log fit, got {bad}")));
    }
    let k0 = ks[0] as f64;
    let l0 = values[0].ln();
    let xs: Vec<f64> = ks.iter().map(|&k| k as f64 - k0).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln() - l0).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("window spans a single iteration".into()));
    }
    let slope = sxy / sxx;
    let shifted = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - shifted - slope * x).powi(2)).sum();
    Ok(RateFit {
        slope,
        intercept: l0 + shifted - slope * k0,
        window: (ks[0], ks[ks.len() - 1]),
        points: ks.len(),
        residual: (sse / n).sqrt(),
    })
}
