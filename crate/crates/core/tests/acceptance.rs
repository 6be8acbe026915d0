//! Acceptance suite. Runs every criterion, prints one verdict line each and
//! exits nonzero if any fails.

use std::io::Cursor;
use std::time::{Duration, Instant};

use a2bcd::diagnostics::{fit_rate, Metric};
use a2bcd::ode::{
    delay_threshold, delayed_constants, integrate_delayed, integrate_sync, verdicts, DelayMode, DiagonalQuadratic,
    LogCoshToy, OdeConfig, Potential,
};
use a2bcd::problem::{check_block_gradient, dist_sq, HalfSquaredNorm};
use a2bcd::problems::{
    expected_q_power, lower_bound_ratio, parse_libsvm, synth_quadratic, synthetic_dataset, write_libsvm, RidgeDual,
    SyntheticQuadratic, WorstCase,
};
use a2bcd::runtime::{
    dry_run_tau, run_parallel, AtomicVec, Budget, ParallelOptions, SparseState, StepOutcome, UpdatePlan, Worker,
};
use a2bcd::schedule::{asynchronicity_parameter, aux_weights, max_tau_in_window, PSI_THEORY_MAX};
use a2bcd::solvers::{
    a2bcd_step, nu_acdm_run, nu_acdm_step, rbcd_step, run_simulated, DelaySchedule, DenseState,
    NuAcdmCoefficients, RunOptions, Trace,
};
use a2bcd::{BlockPartition, BlockSampler, Error, Objective, ProblemParams, Schedule, WindowPolicy};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn rel_dev(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt() / b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300)
}

fn quiet() -> RunOptions {
    RunOptions { timing: false, ..Default::default() }
}

fn ridge_200x500() -> RidgeDual {
    RidgeDual::new(synthetic_dataset(200, 500, 0.1, 11), 1e-2, 5).unwrap()
}

fn zero_delay_equivalence() -> Verdict {
    let q = synth_quadratic(50, 2, 1e3, 21).unwrap();
    let schedule = Schedule::synchronous(q.params());
    let coeffs = NuAcdmCoefficients::new(q.params());
    let start = vec![0.0; q.dim()];
    let mut sampler = BlockSampler::accelerated(q.params(), 5);
    let mut acc = DenseState::new(&start);
    let mut reference = DenseState::new(&start);
    let sparse = SparseState::new(&q, &start, &start, 500);
    let plan = UpdatePlan::new(&q, &schedule);
    let mut worker = Worker::new(&sparse, &q, &plan);
    let (mut g1, mut g2) = (Vec::new(), Vec::new());
    let (mut dense_dev, mut sparse_dev) = (0.0f64, 0.0f64);
    for k in 1..=10_000 {
        let block = sampler.sample();
        a2bcd_step(&q, &schedule, &mut acc, block, None, &mut g1);
        nu_acdm_step(&q, coeffs, &mut reference, block, &mut g2);
        let step = worker.step(block).map_err(|e| e.to_string())?;
        ensure(matches!(step, StepOutcome::Applied { .. }), || format!("sparse step {k} not applied"))?;
        for (a, b) in [(&acc.x, &reference.x), (&acc.y, &reference.y), (&acc.v, &reference.v)] {
            dense_dev = dense_dev.max(rel_dev(a, b));
        }
        if k % 10 == 0 {
            let (y, v, _) = sparse.recover().map_err(|e| e.to_string())?;
            sparse_dev = sparse_dev.max(rel_dev(&y, &reference.y)).max(rel_dev(&v, &reference.v));
        }
    }
    ensure(dense_dev <= 1e-12, || format!("dense deviation {dense_dev:e}"))?;
    Ok(format!("dense max rel dev {dense_dev:.1e}, sparsified {sparse_dev:.1e}"))
}

fn sparsified_equivalence() -> Verdict {
    let r = ridge_200x500();
    let schedule = Schedule::from_psi(r.params(), 0.3, 1, WindowPolicy::Strict).unwrap();
    let start = vec![0.0; r.dim()];
    let state = SparseState::new(&r, &start, &start, 500);
    let plan = UpdatePlan::new(&r, &schedule);
    let mut worker = Worker::new(&state, &r, &plan);
    let mut dense = DenseState::new(&start);
    let mut sampler = BlockSampler::accelerated(r.params(), 8);
    let mut g = Vec::new();
    let mut worst = 0.0f64;
    for k in 1..=10_000u64 {
        let block = sampler.sample();
        a2bcd_step(&r, &schedule, &mut dense, block, None, &mut g);
        worker.step(block).map_err(|e| e.to_string())?;
        if k % 250 == 0 {
            let (y, v, at) = state.recover().map_err(|e| e.to_string())?;
            ensure(at == k, || format!("counter {at} != {k}"))?;
            worst = worst.max(rel_dev(&y, &dense.y)).max(rel_dev(&v, &dense.v));
        }
    }
    ensure(state.restarts() >= 19, || format!("only {} restarts", state.restarts()))?;
    ensure(worst <= 1e-8, || format!("relative error {worst:e}"))?;
    Ok(format!("max rel error {worst:.1e} over 40 checkpoints, {} restarts", state.restarts()))
}

fn mean_ratio(traces: &[Trace]) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for t in traces {
        for w in t.checkpoints.windows(2) {
            sum += w[1].rho.unwrap() / w[0].rho.unwrap();
            count += 1;
        }
    }
    sum / count as f64
}

fn contraction_check(q: &SyntheticQuadratic, tau: usize, iterations: u64) -> Result<(f64, f64), String> {
    let schedule = Schedule::from_tau(q.params(), tau, WindowPolicy::Strict).map_err(|e| e.to_string())?;
    ensure(schedule.psi <= PSI_THEORY_MAX, || format!("psi {}", schedule.psi))?;
    let delays = if tau == 0 { DelaySchedule::Zero } else { DelaySchedule::Constant(tau) };
    let options = RunOptions { checkpoint_every: Some(1), ..quiet() };
    let traces = (0..20)
        .map(|seed| run_simulated(q, &schedule, &delays, iterations, seed, &options))
        .collect::<a2bcd::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let mean = mean_ratio(&traces);
    let normalized = (mean - schedule.beta) / (1.0 - schedule.beta);
    ensure(normalized <= 0.05, || format!("tau {tau}: (mean - beta)/(1 - beta) = {normalized:.4}"))?;
    Ok((schedule.psi, normalized))
}

fn lyapunov_rate() -> Verdict {
    let q = synth_quadratic(100, 2, 1e4, 31).unwrap();
    let tau = max_tau_in_window(q.params());
    let (psi, main) = contraction_check(&q, tau, 100_000)?;
    let wide = synth_quadratic(700, 2, 1.5, 8).unwrap();
    let wide_tau = max_tau_in_window(wide.params());
    ensure(wide_tau >= 1, || "wide instance admits no delay".into())?;
    let (wide_psi, wide_norm) = contraction_check(&wide, wide_tau, 5_000)?;

    let schedule = Schedule::synchronous(q.params());
    let options = ParallelOptions {
        workers: 4,
        budget: Budget::Iterations(5_000_000),
        target_gap: Some(1e-6),
        monitor_interval: Duration::from_millis(10),
        seed: 3,
        ..Default::default()
    };
    let run = run_parallel(&q, &schedule, &options).map_err(|e| e.to_string())?;
    let last = *run.trace.last().unwrap();
    ensure(last.f_x_gap.max(last.f_y_gap) <= 1e-6, || format!("4 workers stopped at gap {:e}", last.f_x_gap))?;
    let sync = nu_acdm_run(&q, 5_000_000, 3, &RunOptions::default()).map_err(|e| e.to_string())?;
    let sync_time = sync.checkpoints.iter().find(|c| c.f_x_gap.max(c.f_y_gap) <= 1e-6).map(|c| c.seconds);
    let ratio = sync_time.map_or("n/a".into(), |s| format!("{:.2}", s / last.seconds));
    Ok(format!(
        "tau {tau} (psi {psi}): normalized ratio {main:.3}; tau {wide_tau} (psi {wide_psi:.3}): {wide_norm:.3}; \
         4 workers reached {:.1e} in {:.2} s, tau_hat {}, sync/async wall-clock {ratio} (informational)",
        last.f_x_gap.max(last.f_y_gap),
        last.seconds,
        run.tau_hat()
    ))
}

fn fitted_complexity(kappa: f64, seed: u64) -> Result<f64, String> {
    let q = synth_quadratic(50, 2, kappa, 41).unwrap();
    let p = q.params();
    let predicted = p.sqrt_sum() / p.sigma().sqrt() * 1e6f64.ln();
    let trace = nu_acdm_run(&q, (3.0 * predicted) as u64, seed, &quiet()).map_err(|e| e.to_string())?;
    let g0 = trace.checkpoints[0].f_x_gap;
    let lo = trace.first_below(1e-2 * g0).ok_or("no progress")?.k;
    let hi = trace.first_below(1e-10 * g0).ok_or("did not reach 1e-10")?.k;
    let fit = fit_rate(&trace, Metric::FxGap, lo..=hi).map_err(|e| e.to_string())?;
    Ok(fit.complexity(1e-6))
}

fn complexity_scaling() -> Verdict {
    let kappas = [1e2, 1e3, 1e4];
    let mut points = Vec::new();
    for &kappa in &kappas {
        let mean = (1..=3).map(|s| fitted_complexity(kappa, s)).sum::<Result<f64, String>>()? / 3.0;
        points.push((kappa.ln(), mean.ln()));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = points.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let slope = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / points.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    ensure((slope - 0.5).abs() <= 0.1, || format!("log-log slope {slope:.3}"))?;
    let ks: Vec<String> = points.iter().map(|p| format!("{:.0}", p.1.exp())).collect();
    Ok(format!("log-log slope {slope:.3}, K(1e-6) = [{}]", ks.join(", ")))
}

fn binomial_expectation(q: f64, p: f64, k: usize) -> f64 {
    let mut total = 0.0;
    let mut choose = 1.0;
    for j in 0..=k {
        if j > 0 {
            choose *= (k - j + 1) as f64 / j as f64;
        }
        total += choose * p.powi(j as i32) * (1.0 - p).powi((k - j) as i32) * q.powi(2 * j as i32);
    }
    total
}

fn lower_bound() -> Verdict {
    let (k, b, trials) = (10usize, 20usize, 500u64);
    let wc = WorstCase::new(1.0, &[9.0, 9.0], b).unwrap();
    let x_star = wc.minimizer().unwrap().to_vec();
    let mut lines = Vec::new();
    for solver in ["rbcd", "nu_acdm"] {
        let probabilities = match solver {
            "rbcd" => vec![0.5, 0.5],
            _ => wc.params().probabilities(),
        };
        let bound = lower_bound_ratio(&wc.kappas(), &probabilities, k, b);
        for block in 0..2 {
            let start = wc.start_point(block);
            let initial = dist_sq(&start, &x_star);
            let ratios: Vec<f64> = (0..trials)
                .map(|seed| {
                    let mut g = Vec::new();
                    let x = if solver == "rbcd" {
                        let mut sampler = BlockSampler::uniform(2, seed);
                        let mut x = start.clone();
                        (0..k).for_each(|_| rbcd_step(&wc, &mut x, sampler.sample(), &mut g));
                        x
                    } else {
                        let mut sampler = BlockSampler::accelerated(wc.params(), seed);
                        let coeffs = NuAcdmCoefficients::new(wc.params());
                        let mut state = DenseState::new(&start);
                        (0..k).for_each(|_| nu_acdm_step(&wc, coeffs, &mut state, sampler.sample(), &mut g));
                        state.x
                    };
                    dist_sq(&x, &x_star) / initial
                })
                .collect();
            let mean = ratios.iter().sum::<f64>() / trials as f64;
            let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
            let se = (var / trials as f64).sqrt();
            let want = bound.per_block[block];
            ensure(mean >= want - 2.0 * se, || {
                format!("{solver} block {block}: mean {mean:.5} < bound {want:.5} - 2 se {se:.5}")
            })?;
            lines.push(format!("{solver}/{block} {mean:.4}>={want:.4}"));
        }
    }
    let mut worst = 0.0f64;
    for kk in 0..=12 {
        for &q in &[0.0, 0.3, 0.5, 0.9, 0.999] {
            for &p in &[0.0, 0.1, 0.5, 0.77, 1.0] {
                worst = worst.max((expected_q_power(q, p, kk) - binomial_expectation(q, p, kk)).abs());
            }
        }
    }
    ensure(worst <= 1e-12, || format!("binomial identity off by {worst:e}"))?;
    Ok(format!("{}; binomial identity max err {worst:.1e}", lines.join(", ")))
}

fn ode_suite() -> Verdict {
    let q = DiagonalQuadratic::new(&[1.0, 7.0, 50.0]).unwrap();
    let toy = LogCoshToy::new(&[4.0, 0.5]).unwrap();
    let cases: [(&dyn Potential, Vec<f64>); 2] = [(&q, vec![1.0, -2.0, 0.5]), (&toy, vec![3.0, -1.0])];
    let mut sync_worst = f64::NEG_INFINITY;
    for (f, y0) in cases {
        let c = OdeConfig::new(3, f.lipschitz(), 0.02, 200.0).map_err(|e| e.to_string())?;
        let t = integrate_sync(f, &y0, &vec![0.1; y0.len()], &c).map_err(|e| e.to_string())?;
        let v = verdicts(&t, 0.0, 0.0, 1e-9, 1e-9).map_err(|e| e.to_string())?;
        ensure(v.energy_monotone, || format!("energy rose by {:e}", v.energy_increase))?;
        sync_worst = sync_worst.max(v.energy_increase);
    }
    let mut composite_worst = f64::NEG_INFINITY;
    for (n, diag) in [(2usize, vec![1.0, 4.0]), (4, vec![1.0, 2.0, 9.0])] {
        let f = DiagonalQuadratic::new(&diag).unwrap();
        let kappa = f.lipschitz();
        let tau = 0.9 * delay_threshold(n, kappa);
        let c = OdeConfig::new(n, kappa, 0.01, 60.0)
            .and_then(|c| c.with_delay(tau, DelayMode::Constant))
            .map_err(|e| e.to_string())?;
        let y0: Vec<f64> = (0..diag.len()).map(|i| 1.0 - 0.7 * i as f64).collect();
        let t = integrate_delayed(&f, &y0, &vec![0.05; diag.len()], &c).map_err(|e| e.to_string())?;
        let (c0, r) = delayed_constants(kappa, c.eta, tau);
        let v = verdicts(&t, c0, r, 1e-8, 1e-8).map_err(|e| e.to_string())?;
        ensure(v.composite_monotone, || format!("composite rose by {:e}", v.composite_increase))?;
        composite_worst = composite_worst.max(v.composite_increase);
    }
    let f = DiagonalQuadratic::new(&[1.0]).unwrap();
    let c = OdeConfig::new(1, 1.0, 0.01, 10.0).map_err(|e| e.to_string())?;
    let t = integrate_sync(&f, &[1.0], &[0.0], &c).map_err(|e| e.to_string())?;
    let exact = (-10.0f64).exp() * (10.0f64.cos() + 10.0f64.sin());
    let err = (t.ys.last().unwrap()[0] - exact).abs();
    ensure(err <= 1e-8, || format!("linear ODE error {err:e}"))?;
    Ok(format!(
        "max energy step {sync_worst:.2e}, max composite step {composite_worst:.2e}, linear ODE error {err:.2e}"
    ))
}

fn random_params(rng: &mut ChaCha8Rng, n_min: usize, n_max: usize, kappa_max: f64) -> ProblemParams {
    let n = rng.random_range(n_min..n_max);
    let spread = rng.random_range(1.0..1.5);
    let scale = rng.random_range(0.01..100.0);
    let blocks: Vec<f64> = (0..n).map(|_| scale * rng.random_range(1.0..spread)).collect();
    let l_max = blocks.iter().copied().fold(0.0, f64::max);
    let l_min = blocks.iter().copied().fold(f64::INFINITY, f64::min);
    let lipschitz = l_max * spread;
    let sigma = (lipschitz / rng.random_range(1.0..kappa_max)).min(l_min);
    ProblemParams::new(sigma, blocks, lipschitz).unwrap()
}

fn schedule_formulas() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut worst_closed = 0.0f64;
    for _ in 0..1000 {
        let p = random_params(&mut rng, 2, 400, 1e4);
        let psi = rng.random_range(0.0..=0.5);
        let s = Schedule::from_psi(&p, psi, 0, WindowPolicy::Warn).map_err(|e| e.to_string())?;
        let closed = 2.0 / p.sigma() * ((1.0 + psi) + psi * psi * p.sigma().sqrt() / p.sqrt_sum());
        worst_closed = worst_closed.max((s.c_lyap - closed).abs() / closed);
        ensure(s.c_lyap <= 4.0 / p.sigma() * (1.0 + 1e-12), || format!("c = {} at psi {psi}", s.c_lyap))?;
    }
    ensure(worst_closed <= 1e-10, || format!("closed form off by {worst_closed:e}"))?;
    let (mut sets, mut worst_rec, mut tightest) = (0, 0.0f64, 0.0f64);
    while sets < 1000 {
        let p = random_params(&mut rng, 3000, 12000, 20.0);
        let max_tau = max_tau_in_window(&p);
        if max_tau == 0 {
            continue;
        }
        sets += 1;
        let tau = rng.random_range(1..=max_tau);
        let psi = asynchronicity_parameter(&p, tau);
        let s = Schedule::from_tau(&p, tau, WindowPolicy::Strict).map_err(|e| e.to_string())?;
        let c = &s.c_weights;
        let bound = 7.0 / p.sqrt_sum() * p.lipschitz().sqrt() * p.kappa().powf(1.5) / psi * (tau * tau) as f64;
        ensure(c[0] <= bound, || format!("c_1 = {} exceeds {bound}", c[0]))?;
        tightest = tightest.max(c[0] / bound);
        let aux = aux_weights(&p, psi, tau);
        for i in 0..tau {
            let next = c.get(i + 1).copied().unwrap_or(0.0);
            worst_rec = worst_rec.max((next - (aux.r * c[i] - aux.s)).abs() / c[i]);
        }
    }
    ensure(worst_rec <= 1e-9, || format!("recurrence residual {worst_rec:e}"))?;
    Ok(format!(
        "2000 parameter sets; closed form rel err {worst_closed:.1e}, recurrence rel residual {worst_rec:.1e}, \
         max c_1/bound {tightest:.3}"
    ))
}

fn fd_error(oracle: &dyn Objective) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<f64> = (0..oracle.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut grad = vec![0.0; oracle.dim()];
    oracle.gradient(&x, &mut grad);
    let scale = grad.iter().fold(1.0f64, |m, g| m.max(g.abs()));
    (0..oracle.partition().n_blocks()).map(|b| check_block_gradient(oracle, b, &x, 1e-5)).fold(0.0, f64::max) / scale
}

fn grad_norm(oracle: &dyn Objective, x: &[f64]) -> f64 {
    let mut g = vec![0.0; oracle.dim()];
    oracle.gradient(x, &mut g);
    g.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Dense solve of `(A'A / (d lambda) + I) a = -l`.
fn ridge_minimizer(problem: &RidgeDual) -> Vec<f64> {
    let m = problem.matrix();
    let (d, n) = (m.nrows(), m.ncols());
    let mut dense = DMatrix::<f64>::zeros(d, n);
    for j in 0..n {
        let (rows, vals) = m.column(j);
        rows.iter().zip(vals).for_each(|(&r, &v)| dense[(r, j)] = v);
    }
    let system = dense.transpose() * &dense / (d as f64 * problem.lambda()) + DMatrix::<f64>::identity(n, n);
    let rhs = -DVector::from_column_slice(problem.labels());
    system.lu().solve(&rhs).expect("system is positive definite").iter().copied().collect()
}

fn oracle_integrity() -> Verdict {
    let quad = synth_quadratic(12, 3, 1e3, 1).unwrap();
    let graded = SyntheticQuadratic::graded(10, 1, 1e2, 2).unwrap();
    let worst = WorstCase::new(1.0, &[9.0, 25.0], 20).unwrap();
    let half = HalfSquaredNorm::new(BlockPartition::uniform(9, 3).unwrap());
    let ridge = RidgeDual::new(synthetic_dataset(30, 40, 0.3, 4), 1e-2, 5).unwrap();
    let problems: [(&str, &dyn Objective); 5] =
        [("quadratic", &quad), ("graded", &graded), ("worst-case", &worst), ("half-norm", &half), ("ridge", &ridge)];
    let mut max_fd = 0.0f64;
    for (name, p) in problems {
        let e = fd_error(p);
        ensure(e <= 1e-4, || format!("{name}: finite-difference error {e:e}"))?;
        max_fd = max_fd.max(e);
        if let Some(x) = p.minimizer() {
            let g = grad_norm(p, x);
            ensure(g <= 1e-10, || format!("{name}: |grad f(x*)| = {g:e}"))?;
        }
    }
    let x = ridge_minimizer(&ridge);
    let g = grad_norm(&ridge, &x) / grad_norm(&ridge, &vec![0.0; ridge.dim()]);
    ensure(g <= 1e-10, || format!("ridge: relative |grad f(x*)| = {g:e}"))?;

    let data = synthetic_dataset(17, 23, 0.4, 7);
    let mut text = Vec::new();
    write_libsvm(&data, &mut text).map_err(|e| e.to_string())?;
    let back = parse_libsvm(Cursor::new(&text), Some(17)).map_err(|e| e.to_string())?;
    ensure(back == data, || "LIBSVM round trip changed the dataset".into())?;
    let malformed = ["1 1:2 1:3\n", "1 0:1\n", "1 a:1\n", "1 1:x\n", "1 1\n", "foo 1:1\n", "1 1:nan\n"];
    for text in malformed {
        ensure(matches!(parse_libsvm(Cursor::new(text), None), Err(Error::Parse { .. })), || {
            format!("accepted malformed input {text:?}")
        })?;
    }
    Ok(format!("5 problems, max relative FD error {max_fd:.1e}; parser round trip and {} malformed inputs", malformed.len()))
}

fn concurrency_stress() -> Verdict {
    const A: u64 = 0xAAAA_AAAA_AAAA_AAAA;
    const B: u64 = 0x5555_5555_5555_5555;
    let r = ridge_200x500();
    let schedule = Schedule::synchronous(r.params());
    let options = ParallelOptions {
        workers: 8,
        budget: Budget::Seconds(10.0),
        monitor_interval: Duration::from_millis(5),
        seed: 9,
        ..Default::default()
    };
    let sentinel = AtomicVec::from_slice(&[f64::from_bits(A); 256]);
    let (run, torn, sentinel_reads) = std::thread::scope(|s| {
        let writer = s.spawn(|| {
            let until = Instant::now() + Duration::from_secs(10);
            let mut round = 0u64;
            while Instant::now() < until {
                let bits = if round.is_multiple_of(2) { B } else { A };
                (0..256).for_each(|i| sentinel.set(i, f64::from_bits(bits)));
                round += 1;
            }
        });
        let reader = s.spawn(|| {
            let until = Instant::now() + Duration::from_secs(10);
            let (mut torn, mut reads) = (0u64, 0u64);
            while Instant::now() < until {
                for i in 0..256 {
                    let bits = sentinel.get(i).to_bits();
                    torn += u64::from(bits != A && bits != B);
                    reads += 1;
                }
            }
            (torn, reads)
        });
        let run = run_parallel(&r, &schedule, &options);
        writer.join().unwrap();
        let (torn, reads) = reader.join().unwrap();
        (run, torn, reads)
    });
    let run = run.map_err(|e| e.to_string())?;
    ensure(torn == 0, || format!("{torn} torn sentinel reads"))?;
    ensure(run.audit.snapshots > 100, || format!("only {} audited snapshots", run.audit.snapshots))?;
    ensure(run.audit.mismatches == 0, || format!("{} transform version mismatches", run.audit.mismatches))?;
    let h = &run.staleness;
    ensure(h.writes() == run.iterations, || format!("histogram holds {} of {} writes", h.writes(), run.iterations))?;
    let last = run.trace.last().unwrap();
    ensure(last.f_y_gap.is_finite(), || "non-finite objective".into())?;
    let dry = dry_run_tau(&r, 1, Duration::from_millis(500), 0).map_err(|e| e.to_string())?;
    ensure(dry.tau_hat == 0, || format!("single-worker dry run tau_hat {}", dry.tau_hat))?;
    Ok(format!(
        "{} updates, {} restarts, staleness max {} mean {:.2}, {} audited snapshots, {sentinel_reads} sentinel reads, \
         final gap {:.1e}, dry run tau_hat 0",
        run.iterations,
        run.restarts,
        h.max(),
        h.mean(),
        run.audit.snapshots,
        last.f_y_gap
    ))
}

fn main() {
    type Check = fn() -> Verdict;
    let criteria: [(&str, f64, Check); 9] = [
        ("zero-delay equivalence", 5.0, zero_delay_equivalence),
        ("sparsified equivalence", 10.0, sparsified_equivalence),
        ("Lyapunov contraction and 4-worker convergence", 120.0, lyapunov_rate),
        ("complexity scaling", 120.0, complexity_scaling),
        ("lower bound", 60.0, lower_bound),
        ("ODE suite", 30.0, ode_suite),
        ("schedule formulas", 5.0, schedule_formulas),
        ("oracle integrity", 30.0, oracle_integrity),
        ("concurrency stress", 60.0, concurrency_stress),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string()) {
            continue;
        }
        let clock = Instant::now();
        let outcome = check();
        let secs = clock.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(detail) if secs > *limit => Err(format!("{detail}; over time limit")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {id} PASS  {name}: {detail} [{secs:.1} s / {limit} s]"),
            Err(reason) => {
                failed += 1;
                println!("criterion {id} FAIL  {name}: {reason} [{secs:.1} s / {limit} s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
