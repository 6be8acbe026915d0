use std::time::Duration;

use a2bcd::runtime::{run_parallel, Budget, ParallelOptions, StalenessRecord};
use a2bcd::solvers::{nu_acdm_run, rbcd_run, run_simulated, DelaySchedule, RunOptions, Trace};
use a2bcd::{Error, Objective, Schedule, WindowPolicy};

use crate::args::{DelayKind, SolveArgs, SolverKind, VariantKind};
use crate::error::{CliError, CliResult};
use crate::output::{Artifacts, Summary, PLOT_SCRIPT};

struct Outcome {
    trace: Trace,
    schedule: Option<Schedule>,
    staleness: Option<StalenessRecord>,
    extra: Vec<(&'static str, String)>,
}

fn check(args: &SolveArgs) -> CliResult<()> {
    let usage = |m: &str| Err(CliError::Usage(m.into()));
    if args.workers == 0 {
        return usage("--workers must be at least 1");
    }
    if args.workers > 1 && args.solver != SolverKind::A2bcd {
        return usage("only a2bcd runs on more than one worker");
    }
    if args.workers == 1 && (args.seconds.is_some() || args.target_gap.is_some()) {
        return usage("--seconds and --target-gap apply to runs with more than one worker");
    }
    if args.problem.lambda.len() > 1 && !args.problem.is_ridge() {
        return usage("a lambda sweep needs a ridge or libsvm problem");
    }
    if args.seconds.is_some_and(|s| !(s > 0.0 && s.is_finite())) {
        return usage("--seconds must be positive");
    }
    Ok(())
}

fn schedule(oracle: &dyn Objective, args: &SolveArgs) -> CliResult<Schedule> {
    let params = oracle.params();
    let policy = if args.allow_wide { WindowPolicy::Warn } else { WindowPolicy::Strict };
    let schedule = match (args.variant, args.psi, args.tau) {
        (VariantKind::Extension, _, tau) => Schedule::extension(params, tau.unwrap_or(0))?,
        (VariantKind::Main, Some(psi), tau) => Schedule::from_psi(params, psi, tau.unwrap_or(0), policy)?,
        (VariantKind::Main, None, Some(tau)) => Schedule::from_tau(params, tau, policy)?,
        (VariantKind::Main, None, None) => Schedule::synchronous(params),
    };
    Ok(schedule)
}

fn run_options(args: &SolveArgs) -> RunOptions {
    RunOptions { checkpoint_every: args.checkpoint_every, timing: args.timing, ..Default::default() }
}

fn run_single(oracle: &dyn Objective, args: &SolveArgs) -> CliResult<Outcome> {
    let budget = args.iterations.unwrap_or(100 * oracle.partition().n_blocks() as u64);
    let options = run_options(args);
    let (trace, schedule) = match args.solver {
        SolverKind::NuAcdm => (nu_acdm_run(oracle, budget, args.seed, &options)?, None),
        SolverKind::Rbcd => (rbcd_run(oracle, budget, args.seed, &options)?, None),
        SolverKind::A2bcd => {
            let schedule = schedule(oracle, args)?;
            let tau = schedule.tau;
            let delays = match args.delay {
                _ if tau == 0 => DelaySchedule::Zero,
                DelayKind::Zero => DelaySchedule::Zero,
                DelayKind::Constant => DelaySchedule::Constant(tau),
                DelayKind::Random => DelaySchedule::UniformRandom { tau, seed: args.seed },
            };
            let trace = run_simulated(oracle, &schedule, &delays, budget, args.seed, &options)?;
            (trace, Some(schedule))
        }
    };
    Ok(Outcome { trace, schedule, staleness: None, extra: vec![("engine", "simulated".into())] })
}

fn run_threads(oracle: &dyn Objective, args: &SolveArgs) -> CliResult<Outcome> {
    let schedule = schedule(oracle, args)?;
    let budget = match (args.seconds, args.iterations) {
        (Some(s), _) => Budget::Seconds(s),
        (None, Some(k)) => Budget::Iterations(k),
        (None, None) => Budget::Iterations(100 * oracle.partition().n_blocks() as u64),
    };
    let options = ParallelOptions {
        workers: args.workers,
        budget,
        seed: args.seed,
        monitor_interval: Duration::from_millis(args.monitor_ms.max(1)),
        staleness_cap: args.staleness_cap,
        restart_period: args.restart_period,
        target_gap: args.target_gap,
        ..Default::default()
    };
    let run = run_parallel(oracle, &schedule, &options)?;
    let tau_hat = run.tau_hat();
    if tau_hat > schedule.tau {
        eprintln!("note: observed staleness {tau_hat} exceeds the schedule's tau = {}", schedule.tau);
    }
    let extra = vec![
        ("engine", "threads".to_string()),
        ("workers", args.workers.to_string()),
        ("tau_hat", tau_hat.to_string()),
        ("staleness_mean", format!("{:.6}", run.staleness.mean())),
        ("restarts", run.restarts.to_string()),
        ("audit_snapshots", run.audit.snapshots.to_string()),
        ("audit_mismatches", run.audit.mismatches.to_string()),
    ];
    Ok(Outcome { trace: run.trace, schedule: Some(schedule), staleness: Some(run.staleness), extra })
}

fn summarize(oracle: &dyn Objective, args: &SolveArgs, lambda: Option<f64>, outcome: &Outcome) -> String {
    let p = oracle.params();
    let mut s = Summary::default();
    s.put("solver", args.solver.label())
        .put("problem", args.problem.label())
        .put("dim", oracle.dim())
        .put("n_blocks", p.n_blocks())
        .put("sigma", p.sigma())
        .put("lipschitz", p.lipschitz())
        .put("kappa", p.kappa())
        .put("sqrt_sum", p.sqrt_sum())
        .put("seed", args.seed);
    if let Some(l) = lambda {
        s.put("lambda", l);
    }
    if let Some(sched) = &outcome.schedule {
        s.put("tau", sched.tau).put("psi", sched.psi).put("alpha", sched.alpha).put("beta", sched.beta).put("h", sched.h);
    }
    for (k, v) in &outcome.extra {
        s.put(k, v);
    }
    for (k, v) in &outcome.trace.config {
        s.put(k, v);
    }
    if let Some(last) = outcome.trace.last() {
        s.put("iterations", last.k)
            .put("final_f_x_gap", format!("{:e}", last.f_x_gap))
            .put("final_f_y_gap", format!("{:e}", last.f_y_gap));
        if last.seconds > 0.0 {
            s.put("elapsed_seconds", last.seconds);
        }
    }
    s.into_string()
}

pub fn run(args: &SolveArgs) -> CliResult<()> {
    check(args)?;
    let source = args.problem.load()?;
    let sweep = args.problem.lambda.len() > 1;
    let mut artifacts = Artifacts::create(&args.out)?;
    artifacts.write_text("plot.py", PLOT_SCRIPT.to_string())?;
    let mut diverged = None;
    for &lambda in &args.problem.lambda {
        let oracle = args.problem.build(&source, lambda)?;
        let prefix = if sweep { format!("lambda_{lambda:e}/") } else { String::new() };
        let outcome = if args.workers == 1 { run_single(&*oracle, args)? } else { run_threads(&*oracle, args)? };
        let ridge_lambda = args.problem.is_ridge().then_some(lambda);
        artifacts.write(&format!("{prefix}trace.csv"), outcome.trace.to_csv_string().into_bytes())?;
        if let Some(st) = &outcome.staleness {
            let mut buf = Vec::new();
            st.write_csv(&mut buf).map_err(Error::from)?;
            artifacts.write(&format!("{prefix}staleness.csv"), buf)?;
        }
        artifacts.write_text(&format!("{prefix}summary.txt"), summarize(&*oracle, args, ridge_lambda, &outcome))?;
        let last = outcome.trace.last().expect("traces start with a checkpoint");
        let tag = ridge_lambda.map(|l| format!("lambda {l:e}: ")).unwrap_or_default();
        println!(
            "{tag}{} k = {} f(x)-f* = {:.3e} f(y)-f* = {:.3e}",
            args.solver.label(),
            last.k,
            last.f_x_gap,
            last.f_y_gap
        );
        if !(last.f_x_gap.is_finite() && last.f_y_gap.is_finite()) {
            diverged.get_or_insert(format!("{tag}run diverged at k = {}", last.k));
        }
    }
    let manifest = artifacts.finish()?;
    println!("artifacts: {}", manifest.parent().unwrap_or(&args.out).display());
    match diverged {
        Some(msg) => Err(Error::Numeric(msg).into()),
        None => Ok(()),
    }
}
