use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::rate::Metric;
use crate::solvers::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Iterations,
    Seconds,
}

#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub metric: Metric,
    pub axis: Axis,
    pub targets: Vec<f64>,
    /// Statistic taken across the runs of each group, 0.5 for the median.
    pub quantile: f64,
    pub resamples: usize,
    pub confidence: f64,
    pub seed: u64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            metric: Metric::FyGap,
            axis: Axis::Iterations,
            targets: vec![1e-2, 1e-4, 1e-6],
            quantile: 0.5,
            resamples: 1000,
            confidence: 0.95,
            seed: 0,
        }
    }
}

/// Cost of reaching one target, group A relative to group B.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub target: f64,
    pub a_cost: f64,
    pub b_cost: f64,
    pub ratio: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub a_reached: usize,
    pub b_reached: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub metric: Metric,
    pub axis: Axis,
    pub quantile: f64,
    pub confidence: f64,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("target,a_cost,b_cost,ratio,ci_low,ci_high,a_reached,b_reached\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
                r.target, r.a_cost, r.b_cost, r.ratio, r.ci_low, r.ci_high, r.a_reached, r.b_reached
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let axis = match self.axis {
            Axis::Iterations => "iterations",
            Axis::Seconds => "seconds",
        };
        let mut out = format!(
            "{} to reach {} (quantile {}), A relative to B, {:.0}% bootstrap interval\n",
            axis,
            self.metric.name(),
            self.quantile,
            100.0 * self.confidence
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "  target {:>8.1e}: A {:>12.4e}  B {:>12.4e}  ratio {:>8.4} [{:.4}, {:.4}]  reached {}/{}",
                r.target, r.a_cost, r.b_cost, r.ratio, r.ci_low, r.ci_high, r.a_reached, r.b_reached
            );
        }
        out
    }
}

/// Per-target cost ratios between two groups of runs on the same problem.
/// Runs that never reach a target count as infinitely expensive.
pub fn compare_traces(a: &[Trace], b: &[Trace], options: &CompareOptions) -> ComparisonReport {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let rows = options
        .targets
        .iter()
        .map(|&target| {
            let ca: Vec<f64> = a.iter().map(|t| hitting_cost(t, options, target)).collect();
            let cb: Vec<f64> = b.iter().map(|t| hitting_cost(t, options, target)).collect();
            let a_cost = quantile(&ca, options.quantile);
            let b_cost = quantile(&cb, options.quantile);
            let mut boot = Vec::with_capacity(options.resamples);
            for _ in 0..options.resamples {
                let ra = quantile(&resample(&ca, &mut rng), options.quantile);
                let rb = quantile(&resample(&cb, &mut rng), options.quantile);
                boot.push(ratio(ra, rb));
            }
            let tail = (1.0 - options.confidence) / 2.0;
            let (ci_low, ci_high) = if boot.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                (quantile(&boot, tail), quantile(&boot, 1.0 - tail))
            };
            ComparisonRow {
                target,
                a_cost,
                b_cost,
                ratio: ratio(a_cost, b_cost),
                ci_low,
                ci_high,
                a_reached: ca.iter().filter(|c| c.is_finite()).count(),
                b_reached: cb.iter().filter(|c| c.is_finite()).count(),
            }
        })
        .collect();
    ComparisonReport {
        metric: options.metric,
        axis: options.axis,
        quantile: options.quantile,
        confidence: options.confidence,
        rows,
    }
}

fn hitting_cost(trace: &Trace, options: &CompareOptions, target: f64) -> f64 {
    trace
        .checkpoints
        .iter()
        .find(|c| {
            let v = match options.metric {
                Metric::FxGap => c.f_x_gap,
                Metric::FyGap => c.f_y_gap,
                Metric::Rho => c.rho.unwrap_or(f64::INFINITY),
            };
            v <= target
        })
        .map(|c| match options.axis {
            Axis::Iterations => c.k as f64,
            Axis::Seconds => c.seconds,
        })
        .unwrap_or(f64::INFINITY)
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        a / b
    }
}

fn resample(values: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..values.len()).map(|_| values[rng.random_range(0..values.len())]).collect()
}

/// Linear-interpolated empirical quantile; infinities sort last.
fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi || sorted[lo] == sorted[hi] {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}
