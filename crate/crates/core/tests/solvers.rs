use a2bcd::diagnostics::{compare_traces, fit_rate, fit_series, Axis, CompareOptions, Metric};
use a2bcd::problems::{synth_quadratic, SyntheticQuadratic};
use a2bcd::solvers::{nu_acdm_run, rbcd_run, run_simulated, DelaySchedule, RunOptions, Trace};
use a2bcd::{Objective, Schedule, WindowPolicy};

fn quiet() -> RunOptions {
    RunOptions { timing: false, ..Default::default() }
}

fn per_iteration_options() -> RunOptions {
    RunOptions { checkpoint_every: Some(1), ..quiet() }
}

/// Mean of `rho_{k+1} / rho_k` over every step of every trace.
fn mean_lyapunov_ratio(traces: &[Trace]) -> f64 {
    let ratios: Vec<f64> = traces
        .iter()
        .flat_map(|t| {
            let rho: Vec<f64> = t.checkpoints.iter().map(|c| c.rho.unwrap()).collect();
            rho.windows(2).map(|w| w[1] / w[0]).collect::<Vec<_>>()
        })
        .collect();
    ratios.iter().sum::<f64>() / ratios.len() as f64
}

fn fitted_complexity(q: &SyntheticQuadratic, seed: u64) -> f64 {
    let p = q.params();
    let predicted = p.sqrt_sum() / p.sigma().sqrt() * 1e6f64.ln();
    let trace = nu_acdm_run(q, (3.0 * predicted) as u64, seed, &quiet()).unwrap();
    let g0 = trace.checkpoints[0].f_x_gap;
    let lo = trace.first_below(1e-2 * g0).unwrap().k;
    let hi = trace.first_below(1e-10 * g0).unwrap().k;
    fit_rate(&trace, Metric::FxGap, lo..=hi).unwrap().complexity(1e-6)
}

#[test]
fn synchronous_lyapunov_contracts_in_mean() {
    let q = synth_quadratic(20, 2, 100.0, 4).unwrap();
    let s = Schedule::synchronous(q.params());
    let traces: Vec<Trace> = (0..20)
        .map(|seed| run_simulated(&q, &s, &DelaySchedule::Zero, 3_000, seed, &per_iteration_options()).unwrap())
        .collect();
    let mean = mean_lyapunov_ratio(&traces);
    assert!(mean <= s.beta + 0.05 * (1.0 - s.beta), "mean {mean}, beta {}", s.beta);
}

#[test]
fn delayed_lyapunov_contracts_in_mean() {
    let q = synth_quadratic(700, 2, 1.5, 8).unwrap();
    let s = Schedule::from_tau(q.params(), 1, WindowPolicy::Strict).unwrap();
    assert!(s.psi > 0.0);
    let traces: Vec<Trace> = (0..20)
        .map(|seed| {
            run_simulated(&q, &s, &DelaySchedule::Constant(1), 5_000, seed, &per_iteration_options()).unwrap()
        })
        .collect();
    let mean = mean_lyapunov_ratio(&traces);
    assert!(mean <= s.beta + 0.05 * (1.0 - s.beta), "mean {mean}, beta {}", s.beta);
}

#[test]
fn lyapunov_is_translation_invariant() {
    let shift: Vec<f64> = (0..24).map(|i| 0.3 * i as f64 - 2.0).collect();
    let base = synth_quadratic(8, 3, 50.0, 1).unwrap();
    let moved = base.clone().translated(&shift);
    let s = Schedule::from_psi(base.params(), 0.2, 2, WindowPolicy::Strict).unwrap();
    let delays = DelaySchedule::UniformRandom { tau: 2, seed: 5 };
    let a = run_simulated(&base, &s, &delays, 500, 3, &quiet()).unwrap();
    let opts = RunOptions { start: Some(shift.clone()), ..quiet() };
    let b = run_simulated(&moved, &s, &delays, 500, 3, &opts).unwrap();
    for (ca, cb) in a.checkpoints.iter().zip(&b.checkpoints) {
        let (ra, rb) = (ca.rho.unwrap(), cb.rho.unwrap());
        assert!((ra - rb).abs() <= 1e-9 * ra.max(1e-12), "k = {}: {ra} vs {rb}", ca.k);
    }
}

#[test]
fn nu_acdm_complexity_matches_prediction() {
    let q = synth_quadratic(50, 2, 1e4, 1).unwrap();
    let p = q.params();
    let predicted = p.sqrt_sum() / p.sigma().sqrt() * 1e6f64.ln();
    let fitted = fitted_complexity(&q, 1);
    assert!(fitted >= predicted / 2.0 && fitted <= 2.0 * predicted, "{fitted} vs {predicted}");
}

#[test]
fn complexity_grows_with_root_kappa() {
    let kappas = [1e2, 1e3, 1e4];
    let ks: Vec<f64> = kappas.iter().map(|&k| fitted_complexity(&synth_quadratic(50, 2, k, 1).unwrap(), 2)).collect();
    let logs: Vec<(f64, f64)> = kappas.iter().zip(&ks).map(|(k, c)| (k.ln(), c.ln())).collect();
    let (mx, my) = logs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / 3.0, b + y / 3.0));
    let slope = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / logs.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    assert!((slope - 0.5).abs() <= 0.1, "slope {slope}, complexities {ks:?}");
}

#[test]
fn uniform_descent_is_slower_than_acceleration() {
    let q = synth_quadratic(50, 2, 1e4, 1).unwrap();
    let nu: Vec<Trace> = (0..3).map(|s| nu_acdm_run(&q, 100_000, s, &quiet()).unwrap()).collect();
    let rb: Vec<Trace> = (0..3).map(|s| rbcd_run(&q, 3_000_000, s, &quiet()).unwrap()).collect();
    let g0 = nu[0].checkpoints[0].f_x_gap;
    let options = CompareOptions {
        metric: Metric::FxGap,
        axis: Axis::Iterations,
        targets: vec![1e-6 * g0],
        resamples: 200,
        ..Default::default()
    };
    let report = compare_traces(&rb, &nu, &options);
    let row = &report.rows[0];
    assert_eq!((row.a_reached, row.b_reached), (3, 3));
    assert!(row.ratio >= 3.0, "{}", report.to_text());
}

#[test]
fn identical_trace_groups_compare_as_one() {
    let q = synth_quadratic(10, 2, 100.0, 1).unwrap();
    let runs: Vec<Trace> = (0..4).map(|s| nu_acdm_run(&q, 5000, s, &quiet()).unwrap()).collect();
    let report = compare_traces(&runs, &runs, &CompareOptions::default());
    for row in &report.rows {
        assert_eq!(row.ratio, 1.0);
    }
}

#[test]
fn fit_is_scale_invariant() {
    let ks: Vec<u64> = (0..80).map(|k| 10 * k).collect();
    let values: Vec<f64> = ks.iter().map(|&k| 0.999f64.powi(k as i32) * (1.0 + 0.1 * ((k / 10) % 3) as f64)).collect();
    let scaled: Vec<f64> = values.iter().map(|v| 1e5 * v).collect();
    let a = fit_series(&ks, &values).unwrap();
    let b = fit_series(&ks, &scaled).unwrap();
    assert!((a.slope - b.slope).abs() <= 1e-12);
    assert!((b.intercept - a.intercept - 1e5f64.ln()).abs() <= 1e-9);
}

#[test]
fn trace_csv_round_trip_after_run() {
    let q = synth_quadratic(6, 2, 10.0, 0).unwrap();
    let trace = nu_acdm_run(&q, 600, 2, &quiet()).unwrap();
    let text = trace.to_csv_string();
    let back = Trace::read_csv(std::io::Cursor::new(text.as_bytes())).unwrap();
    assert_eq!(back.checkpoints, trace.checkpoints);
    assert_eq!(q.dim(), 12);
}
