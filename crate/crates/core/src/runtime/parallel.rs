//! Multi-threaded driver: workers, a sampling monitor and dry runs.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use parking_lot::Mutex;

use super::staleness::{StalenessRecord, WorkerLog};
use super::state::{restart_period, SparseState};
use super::transform::TransformSnapshot;
use super::worker::{StepOutcome, UpdatePlan, Worker};
use crate::error::{Error, Result};
use crate::problem::Objective;
use crate::sampler::BlockSampler;
use crate::schedule::Schedule;
use crate::solvers::{resolve_optimum, Checkpoint, Optimum, RunOptions, Trace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    Iterations(u64),
    Seconds(f64),
}

#[derive(Debug, Clone)]
pub struct ParallelOptions {
    pub workers: usize,
    pub budget: Budget,
    pub seed: u64,
    /// Wall-clock spacing of monitor checkpoints.
    pub monitor_interval: Duration,
    /// Discard updates whose read is more than this many updates old.
    pub staleness_cap: Option<u64>,
    /// Defaults to the overflow-safe period for the schedule.
    pub restart_period: Option<u64>,
    /// Stop once the monitor sees both `f(x) - f*` and `f(y) - f*` at or
    /// below this.
    pub target_gap: Option<f64>,
    pub start: Option<Vec<f64>>,
    pub optimum: Option<Optimum>,
    pub timing: bool,
    /// Per-worker cap on recorded staleness events.
    pub record_limit: usize,
}

impl Default for ParallelOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            budget: Budget::Iterations(1000),
            seed: 0,
            monitor_interval: Duration::from_millis(50),
            staleness_cap: None,
            restart_period: None,
            target_gap: None,
            start: None,
            optimum: None,
            timing: true,
            record_limit: 1 << 20,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParallelRun {
    pub trace: Trace,
    pub staleness: StalenessRecord,
    pub audit: TransformAudit,
    pub y: Vec<f64>,
    pub v: Vec<f64>,
    pub x: Vec<f64>,
    pub iterations: u64,
    pub restarts: u64,
}

impl ParallelRun {
    /// Largest observed staleness.
    pub fn tau_hat(&self) -> usize {
        self.staleness.max()
    }
}

/// Largest [`TransformSnapshot::pairing_defect`] accepted as one publish.
pub const AUDIT_TOLERANCE: f64 = 1e-7;

/// Checks made by the monitor on live transform snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransformAudit {
    pub snapshots: u64,
    /// Snapshots with an odd version, a `k` behind the previous one, or a
    /// `(B, B^{-1}, k)` triple that does not come from a single publish.
    pub mismatches: u64,
    pub max_defect: f64,
    last_k: u64,
}

impl TransformAudit {
    pub fn check(&mut self, snap: &TransformSnapshot, alpha: f64, beta: f64) {
        let defect = snap.pairing_defect(alpha, beta);
        self.snapshots += 1;
        self.max_defect = self.max_defect.max(defect);
        if snap.version % 2 == 1 || snap.k < self.last_k || !(defect <= AUDIT_TOLERANCE) {
            self.mismatches += 1;
        }
        self.last_k = self.last_k.max(snap.k);
    }
}

struct Control {
    stop: AtomicBool,
    failure: Mutex<Option<Error>>,
}

impl Control {
    fn fail(&self, err: Error) {
        let mut slot = self.failure.lock();
        if slot.is_none() {
            *slot = Some(err);
        }
        self.stop.store(true, Ordering::SeqCst);
    }
}

fn validate(oracle: &dyn Objective, options: &ParallelOptions) -> Result<()> {
    if options.workers == 0 {
        return Err(Error::InvalidParameter("at least one worker is required".into()));
    }
    match options.budget {
        Budget::Iterations(0) => Err(Error::InvalidParameter("iteration budget must be at least 1".into())),
        Budget::Seconds(s) if !(s > 0.0 && s.is_finite()) => {
            Err(Error::InvalidParameter(format!("time budget must be positive, got {s}")))
        }
        _ => match &options.start {
            Some(s) if s.len() != oracle.dim() => Err(Error::InvalidParameter(format!(
                "start point has length {}, problem dimension is {}",
                s.len(),
                oracle.dim()
            ))),
            _ => Ok(()),
        },
    }
}

fn run_workers(
    oracle: &dyn Objective,
    state: &SparseState,
    plan: &UpdatePlan,
    options: &ParallelOptions,
    control: &Control,
    deadline: Option<Instant>,
    monitor: Option<&mut dyn FnMut() -> bool>,
) -> Vec<WorkerLog> {
    let base = BlockSampler::accelerated(oracle.params(), options.seed);
    let logs: Vec<Mutex<WorkerLog>> =
        (0..options.workers).map(|_| Mutex::new(WorkerLog::new(options.record_limit))).collect();
    std::thread::scope(|scope| {
        for (w, log) in logs.iter().enumerate() {
            let mut sampler = base.for_worker(options.seed, w);
            scope.spawn(move || {
                let body = AssertUnwindSafe(|| {
                    let mut worker = Worker::new(state, oracle, plan);
                    let mut log = log.lock();
                    let mut steps = 0u64;
                    while !control.stop.load(Ordering::Relaxed) {
                        steps += 1;
                        if steps.is_multiple_of(64) && deadline.is_some_and(|d| Instant::now() >= d) {
                            control.stop.store(true, Ordering::SeqCst);
                            break;
                        }
                        match worker.step(sampler.sample()) {
                            Ok(StepOutcome::Applied { k_write, k_read, .. }) => log.applied(k_write, k_read),
                            Ok(StepOutcome::Discarded { .. }) => log.discarded += 1,
                            Ok(StepOutcome::Exhausted) => {
                                control.stop.store(true, Ordering::SeqCst);
                                break;
                            }
                            Err(e) => {
                                control.fail(e);
                                break;
                            }
                        }
                    }
                });
                if let Err(panic) = catch_unwind(body) {
                    let msg = panic
                        .downcast_ref::<&str>()
                        .map(|s| s.to_string())
                        .or_else(|| panic.downcast_ref::<String>().cloned())
                        .unwrap_or_else(|| "unknown panic".into());
                    control.fail(Error::Numeric(format!("worker {w} aborted: {msg}")));
                }
            });
        }
        if let Some(tick) = monitor {
            while !control.stop.load(Ordering::Relaxed) {
                if deadline.is_some_and(|d| Instant::now() >= d) {
                    control.stop.store(true, Ordering::SeqCst);
                    break;
                }
                if tick() {
                    control.stop.store(true, Ordering::SeqCst);
                }
            }
        }
    });
    logs.into_iter().map(Mutex::into_inner).collect()
}

/// Shared-memory A2BCD over `options.workers` threads.
pub fn run_parallel(oracle: &dyn Objective, schedule: &Schedule, options: &ParallelOptions) -> Result<ParallelRun> {
    validate(oracle, options)?;
    let run_opts = RunOptions { optimum: options.optimum.clone(), ..RunOptions::default() };
    let optimum = resolve_optimum(oracle, &run_opts)?;
    let start = options.start.clone().unwrap_or_else(|| vec![0.0; oracle.dim()]);
    let period = options.restart_period.unwrap_or_else(|| restart_period(schedule.alpha, schedule.beta));
    let state = SparseState::new(oracle, &start, &start, period);
    let mut plan = UpdatePlan::new(oracle, schedule);
    plan.staleness_cap = options.staleness_cap;
    if let Budget::Iterations(n) = options.budget {
        plan.max_iterations = Some(n);
    }
    let alpha = schedule.alpha;
    let mut trace = Trace::new(options.seed)
        .with_config("solver", "a2bcd")
        .with_config("workers", options.workers)
        .with_config("seed", options.seed)
        .with_config("tau", schedule.tau)
        .with_config("psi", schedule.psi)
        .with_config("restart_period", period)
        .with_config("optimum", optimum.source.label());
    let clock = Instant::now();
    let timing = options.timing;
    let f_star = optimum.f;
    let checkpoint = |y: &[f64], v: &[f64], k: u64| -> Checkpoint {
        let x: Vec<f64> = y.iter().zip(v).map(|(y, v)| (y - alpha * v) / (1.0 - alpha)).collect();
        Checkpoint {
            k,
            seconds: if timing { clock.elapsed().as_secs_f64() } else { 0.0 },
            f_x_gap: oracle.value(&x) - f_star,
            f_y_gap: oracle.value(y) - f_star,
            rho: None,
        }
    };
    trace.push(checkpoint(&start, &start, 0));
    let control = Control { stop: AtomicBool::new(false), failure: Mutex::new(None) };
    let deadline = match options.budget {
        Budget::Seconds(s) => Some(clock + Duration::from_secs_f64(s)),
        Budget::Iterations(_) => None,
    };
    let interval = options.monitor_interval;
    let mut monitor_error = None;
    let mut audit = TransformAudit::default();
    let beta = schedule.beta;
    let mut tick = || -> bool {
        std::thread::sleep(interval);
        audit.check(&state.transform(), alpha, beta);
        match state.recover_live() {
            Ok((y, v, k)) => {
                if trace.last().is_some_and(|c| c.k >= k) {
                    return false;
                }
                let c = checkpoint(&y, &v, k);
                trace.push(c);
                options.target_gap.is_some_and(|t| c.f_x_gap.max(c.f_y_gap) <= t)
            }
            Err(e) => {
                monitor_error = Some(e);
                true
            }
        }
    };
    let logs = run_workers(oracle, &state, &plan, options, &control, deadline, Some(&mut tick));
    if let Some(e) = control.failure.into_inner().or(monitor_error) {
        return Err(e);
    }
    audit.check(&state.transform(), alpha, beta);
    let (y, v, k) = state.recover()?;
    if trace.last().is_none_or(|c| c.k < k) {
        trace.push(checkpoint(&y, &v, k));
    }
    let x = y.iter().zip(&v).map(|(y, v)| (y - alpha * v) / (1.0 - alpha)).collect();
    let staleness = StalenessRecord::merge(logs);
    trace.set_config("tau_hat", staleness.max());
    Ok(ParallelRun { trace, staleness, audit, y, v, x, iterations: k, restarts: state.restarts() })
}

#[derive(Debug, Clone)]
pub struct DryRun {
    pub tau_hat: usize,
    pub staleness: StalenessRecord,
    pub iterations: u64,
    /// Whether the shared vectors came back bitwise unchanged.
    pub state_unchanged: bool,
}

/// Runs the full worker loop with zeroed update coefficients for `duration`
/// and reports the largest observed staleness.
pub fn dry_run_tau(oracle: &dyn Objective, workers: usize, duration: Duration, seed: u64) -> Result<DryRun> {
    let options = ParallelOptions {
        workers,
        budget: Budget::Seconds(duration.as_secs_f64()),
        seed,
        ..Default::default()
    };
    validate(oracle, &options)?;
    let start = vec![0.0; oracle.dim()];
    let state = SparseState::new(oracle, &start, &start, u64::MAX);
    let before = (state.pq(), state.aux());
    let plan = UpdatePlan::dry(oracle);
    let control = Control { stop: AtomicBool::new(false), failure: Mutex::new(None) };
    let deadline = Some(Instant::now() + duration);
    let logs = run_workers(oracle, &state, &plan, &options, &control, deadline, None);
    if let Some(e) = control.failure.into_inner() {
        return Err(e);
    }
    let after = (state.pq(), state.aux());
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    let same = |a: &[f64], b: &[f64]| bits(a) == bits(b);
    let state_unchanged = same(&before.0 .0, &after.0 .0)
        && same(&before.0 .1, &after.0 .1)
        && match (&before.1, &after.1) {
            (Some((a, b)), Some((c, d))) => same(a, c) && same(b, d),
            _ => true,
        };
    let staleness = StalenessRecord::merge(logs);
    Ok(DryRun { tau_hat: staleness.max(), iterations: state.iterations(), staleness, state_unchanged })
}
