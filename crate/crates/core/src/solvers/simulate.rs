//! Drivers that run the dense iterations and record traces.

use std::time::Instant;

use super::delay::{DelaySchedule, IterateHistory};
use super::dense::{a2bcd_step, nu_acdm_step, rbcd_step, DenseState, NuAcdmCoefficients};
use super::trace::{Checkpoint, Trace};
use crate::diagnostics::LyapunovMeter;
use crate::error::{Error, Result};
use crate::problem::{norm, Objective};
use crate::sampler::BlockSampler;
use crate::schedule::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimumSource {
    Known,
    /// Computed by a high-accuracy synchronous run.
    PreSolved,
}

impl OptimumSource {
    pub fn label(self) -> &'static str {
        match self {
            OptimumSource::Known => "known",
            OptimumSource::PreSolved => "presolved",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub x: Option<Vec<f64>>,
    pub f: f64,
    pub source: OptimumSource,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Iterations between checkpoints; one epoch (`n`) when `None`.
    pub checkpoint_every: Option<u64>,
    /// Record wall-clock seconds. When off every checkpoint reports 0 s,
    /// which makes traces bitwise reproducible.
    pub timing: bool,
    pub start: Option<Vec<f64>>,
    pub optimum: Option<Optimum>,
    pub presolve_max_iters: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            checkpoint_every: None,
            timing: true,
            start: None,
            optimum: None,
            presolve_max_iters: 50_000_000,
        }
    }
}

const PRESOLVE_TOL: f64 = 1e-12;
const PRESOLVE_SEED: u64 = 0x5eed;

/// Runs the synchronous accelerated method from the origin until the full
/// gradient norm is at most `1e-12` or `max_iters` is spent.
pub fn presolve_optimum(oracle: &dyn Objective, max_iters: u64) -> Result<Optimum> {
    let dim = oracle.dim();
    let coeffs = NuAcdmCoefficients::new(oracle.params());
    let mut sampler = BlockSampler::accelerated(oracle.params(), PRESOLVE_SEED);
    let mut state = DenseState::new(&vec![0.0; dim]);
    let mut grad = Vec::new();
    let mut full = vec![0.0; dim];
    let epoch = oracle.partition().n_blocks() as u64;
    let mut best = f64::INFINITY;
    let mut best_x = state.y.clone();
    let mut k = 0;
    loop {
        for candidate in [&state.x, &state.y] {
            let f = oracle.value(candidate);
            if !f.is_finite() {
                return Err(Error::Numeric("pre-solve diverged".into()));
            }
            if f < best {
                best = f;
                best_x.copy_from_slice(candidate);
            }
        }
        oracle.gradient(&state.y, &mut full);
        if norm(&full) <= PRESOLVE_TOL || k >= max_iters {
            break;
        }
        for _ in 0..(10 * epoch) {
            nu_acdm_step(oracle, coeffs, &mut state, sampler.sample(), &mut grad);
        }
        k += 10 * epoch;
    }
    Ok(Optimum { x: Some(best_x), f: best, source: OptimumSource::PreSolved })
}

/// The optimum to measure against: the override in `options`, then the
/// oracle's analytic one, then a pre-solve.
pub fn resolve_optimum(oracle: &dyn Objective, options: &RunOptions) -> Result<Optimum> {
    if let Some(o) = &options.optimum {
        return Ok(o.clone());
    }
    if let Some(f) = oracle.optimal_value() {
        return Ok(Optimum {
            x: oracle.minimizer().map(<[f64]>::to_vec),
            f,
            source: OptimumSource::Known,
        });
    }
    presolve_optimum(oracle, options.presolve_max_iters)
}

struct Recorder<'a> {
    oracle: &'a dyn Objective,
    optimum: Optimum,
    meter: Option<LyapunovMeter>,
    clock: Option<Instant>,
    every: u64,
    trace: Trace,
}

impl<'a> Recorder<'a> {
    fn new(
        oracle: &'a dyn Objective,
        schedule: Option<&Schedule>,
        options: &RunOptions,
        seed: u64,
    ) -> Result<Self> {
        let optimum = resolve_optimum(oracle, options)?;
        let meter = match (&optimum.x, optimum.source, schedule) {
            (Some(x), OptimumSource::Known, Some(s)) => Some(LyapunovMeter::new(s, x.clone(), optimum.f)),
            _ => None,
        };
        let every = options.checkpoint_every.unwrap_or(oracle.partition().n_blocks() as u64).max(1);
        let trace = Trace::new(seed)
            .with_config("seed", seed)
            .with_config("optimum", optimum.source.label())
            .with_config("checkpoint_every", every);
        Ok(Self {
            oracle,
            optimum,
            meter,
            clock: options.timing.then(Instant::now),
            every,
            trace,
        })
    }

    fn due(&self, k: u64) -> bool {
        k.is_multiple_of(self.every)
    }

    fn record(&mut self, k: u64, x: &[f64], y: &[f64], v: &[f64], history: Option<&IterateHistory>) {
        let f_x = self.oracle.value(x);
        let f_y = if std::ptr::eq(x, y) { f_x } else { self.oracle.value(y) };
        let rho = match (&self.meter, history) {
            (Some(m), Some(h)) => m.rho(v, f_x, h).ok(),
            _ => None,
        };
        let seconds = self.clock.map_or(0.0, |c| c.elapsed().as_secs_f64());
        self.trace.push(Checkpoint {
            k,
            seconds,
            f_x_gap: f_x - self.optimum.f,
            f_y_gap: f_y - self.optimum.f,
            rho,
        });
    }

    fn finish(mut self, k: u64, x: &[f64], y: &[f64], v: &[f64], history: Option<&IterateHistory>) -> Trace {
        if self.trace.last().is_none_or(|c| c.k < k) {
            self.record(k, x, y, v, history);
        }
        self.trace
    }
}

fn check_budget(budget: u64) -> Result<()> {
    if budget == 0 {
        return Err(Error::InvalidParameter("iteration budget must be at least 1".into()));
    }
    Ok(())
}

fn start_point(oracle: &dyn Objective, options: &RunOptions) -> Result<Vec<f64>> {
    match &options.start {
        Some(s) if s.len() != oracle.dim() => Err(Error::InvalidParameter(format!(
            "start point has length {}, problem dimension is {}",
            s.len(),
            oracle.dim()
        ))),
        Some(s) => Ok(s.clone()),
        None => Ok(vec![0.0; oracle.dim()]),
    }
}

/// A2BCD with delays injected from `delays`, reading whole blocks from the
/// iterate history.
pub fn run_simulated(
    oracle: &dyn Objective,
    schedule: &Schedule,
    delays: &DelaySchedule,
    budget: u64,
    seed: u64,
    options: &RunOptions,
) -> Result<Trace> {
    check_budget(budget)?;
    let start = start_point(oracle, options)?;
    let mut rec = Recorder::new(oracle, Some(schedule), options, seed)?;
    rec.trace.set_config("solver", "a2bcd");
    rec.trace.set_config("tau", schedule.tau);
    rec.trace.set_config("psi", schedule.psi);
    rec.trace.set_config("delay_tau", delays.tau());
    let mut sampler = BlockSampler::accelerated(oracle.params(), seed);
    let mut state = DenseState::new(&start);
    let mut history = IterateHistory::new(&start, schedule.tau.max(delays.tau()));
    let mut delayed = vec![0.0; oracle.dim()];
    let mut grad = Vec::new();
    let offsets = oracle.partition().offsets().to_vec();
    rec.record(0, &state.x, &state.y, &state.v, Some(&history));
    for k in 0..budget {
        let block = sampler.sample();
        if delays.is_zero() {
            a2bcd_step(oracle, schedule, &mut state, block, None, &mut grad);
        } else {
            history.assemble(delays, k, &offsets, &mut delayed)?;
            a2bcd_step(oracle, schedule, &mut state, block, Some(&delayed), &mut grad);
        }
        history.push(&state.y);
        if rec.due(k + 1) {
            rec.record(k + 1, &state.x, &state.y, &state.v, Some(&history));
        }
    }
    Ok(rec.finish(budget, &state.x, &state.y, &state.v, Some(&history)))
}

pub fn nu_acdm_run(oracle: &dyn Objective, budget: u64, seed: u64, options: &RunOptions) -> Result<Trace> {
    check_budget(budget)?;
    let start = start_point(oracle, options)?;
    let schedule = Schedule::synchronous(oracle.params());
    let mut rec = Recorder::new(oracle, Some(&schedule), options, seed)?;
    rec.trace.set_config("solver", "nu_acdm");
    let coeffs = NuAcdmCoefficients::new(oracle.params());
    let mut sampler = BlockSampler::accelerated(oracle.params(), seed);
    let mut state = DenseState::new(&start);
    let mut history = IterateHistory::new(&start, 0);
    let mut grad = Vec::new();
    rec.record(0, &state.x, &state.y, &state.v, Some(&history));
    for k in 0..budget {
        nu_acdm_step(oracle, coeffs, &mut state, sampler.sample(), &mut grad);
        if rec.due(k + 1) {
            history.push(&state.y);
            rec.record(k + 1, &state.x, &state.y, &state.v, Some(&history));
        }
    }
    history.push(&state.y);
    Ok(rec.finish(budget, &state.x, &state.y, &state.v, Some(&history)))
}

/// Uniform-sampling block descent. Its trace has no Lyapunov column and
/// reports `f(x) - f*` in both gap columns.
pub fn rbcd_run(oracle: &dyn Objective, budget: u64, seed: u64, options: &RunOptions) -> Result<Trace> {
    check_budget(budget)?;
    let mut x = start_point(oracle, options)?;
    let mut rec = Recorder::new(oracle, None, options, seed)?;
    rec.trace.set_config("solver", "rbcd");
    let mut sampler = BlockSampler::uniform(oracle.partition().n_blocks(), seed);
    let mut grad = Vec::new();
    rec.record(0, &x, &x, &x, None);
    for k in 0..budget {
        rbcd_step(oracle, &mut x, sampler.sample(), &mut grad);
        if rec.due(k + 1) {
            rec.record(k + 1, &x, &x, &x, None);
        }
    }
    Ok(rec.finish(budget, &x, &x, &x, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{synth_quadratic, synthetic_dataset, RidgeDual};
    use crate::schedule::WindowPolicy;

    fn quiet() -> RunOptions {
        RunOptions { timing: false, ..Default::default() }
    }

    #[test]
    fn zero_delays_match_nu_acdm() {
        let q = synth_quadratic(8, 2, 100.0, 3).unwrap();
        let s = Schedule::synchronous(q.params());
        let a = run_simulated(&q, &s, &DelaySchedule::Zero, 2000, 9, &quiet()).unwrap();
        let b = nu_acdm_run(&q, 2000, 9, &quiet()).unwrap();
        assert_eq!(a.checkpoints, b.checkpoints);
    }

    #[test]
    fn replay_is_bitwise_identical() {
        let q = synth_quadratic(8, 2, 100.0, 3).unwrap();
        let s = Schedule::from_psi(q.params(), 0.2, 2, WindowPolicy::Strict).unwrap();
        let d = DelaySchedule::recorded(vec![0, 1, 2, 2, 1]).unwrap();
        let a = run_simulated(&q, &s, &d, 3000, 4, &quiet()).unwrap();
        let b = run_simulated(&q, &s, &d, 3000, 4, &quiet()).unwrap();
        assert_eq!(a, b);
        assert!(a.checkpoints.iter().all(|c| c.rho.is_some()));
    }

    #[test]
    fn stays_at_minimizer() {
        let q = synth_quadratic(5, 2, 50.0, 1).unwrap();
        let opts = RunOptions { start: q.minimizer().map(<[f64]>::to_vec), ..quiet() };
        let t = nu_acdm_run(&q, 500, 2, &opts).unwrap();
        for c in &t.checkpoints {
            assert!(c.f_y_gap.abs() < 1e-28 && c.rho.unwrap() < 1e-28, "{c:?}");
        }
    }

    #[test]
    fn constant_offset_shifts_values_only() {
        let q = synth_quadratic(5, 2, 50.0, 1).unwrap();
        let shifted = synth_quadratic(5, 2, 50.0, 1).unwrap().with_offset(7.5);
        let a = nu_acdm_run(&q, 800, 2, &quiet()).unwrap();
        let b = nu_acdm_run(&shifted, 800, 2, &quiet()).unwrap();
        for (ca, cb) in a.checkpoints.iter().zip(&b.checkpoints) {
            assert!((ca.f_y_gap - cb.f_y_gap).abs() <= 1e-12 * (1.0 + ca.f_y_gap.abs()) + 1e-14 * 7.5);
        }
    }

    #[test]
    fn presolve_labels_ridge_optimum() {
        let data = synthetic_dataset(10, 30, 0.5, 1);
        let r = RidgeDual::new(data, 0.1, 3).unwrap();
        let t = nu_acdm_run(&r, 20_000, 1, &quiet()).unwrap();
        assert_eq!(t.config_value("optimum"), Some("presolved"));
        assert!(t.checkpoints.iter().all(|c| c.rho.is_none()));
        assert!(t.final_gap().unwrap() < 1e-9);
        assert!(t.checkpoints.iter().all(|c| c.f_y_gap >= -1e-12));
    }

    #[test]
    fn default_cadence_is_one_epoch() {
        let q = synth_quadratic(7, 1, 10.0, 0).unwrap();
        let t = rbcd_run(&q, 30, 0, &quiet()).unwrap();
        let ks: Vec<u64> = t.checkpoints.iter().map(|c| c.k).collect();
        assert_eq!(ks, vec![0, 7, 14, 21, 28, 30]);
    }

    #[test]
    fn rejects_zero_budget_and_bad_start() {
        let q = synth_quadratic(3, 1, 10.0, 0).unwrap();
        assert!(rbcd_run(&q, 0, 0, &quiet()).is_err());
        let opts = RunOptions { start: Some(vec![0.0; 2]), ..quiet() };
        assert!(nu_acdm_run(&q, 10, 0, &opts).is_err());
    }
}
