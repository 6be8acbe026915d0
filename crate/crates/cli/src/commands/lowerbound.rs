use std::fmt::Write as _;

use a2bcd::problem::dist_sq;
use a2bcd::problems::{lower_bound_ratio, WorstCase};
use a2bcd::solvers::{nu_acdm_step, rbcd_step, DenseState, NuAcdmCoefficients};
use a2bcd::{BlockSampler, Objective};

use crate::args::LowerBoundArgs;
use crate::error::{CliError, CliResult};
use crate::output::{Artifacts, Summary};

struct Row {
    k: usize,
    solver: &'static str,
    block: usize,
    mean: f64,
    std_err: f64,
    bound: f64,
    closed_form: f64,
}

impl Row {
    /// The empirical mean sits more than two standard errors below the bound.
    fn violated(&self) -> bool {
        self.mean < self.bound - 2.0 * self.std_err
    }
}

/// `|x_k - x*|^2 / |x_0 - x*|^2` after `k` steps from the start that zeroes `block`.
fn error_ratio(wc: &WorstCase, solver: &str, block: usize, k: usize, seed: u64) -> f64 {
    let start = wc.start_point(block);
    let x_star = wc.minimizer().expect("worst case has a known minimizer");
    let mut grad = Vec::new();
    let x = if solver == "rbcd" {
        let mut sampler = BlockSampler::uniform(wc.partition().n_blocks(), seed);
        let mut x = start.clone();
        (0..k).for_each(|_| rbcd_step(wc, &mut x, sampler.sample(), &mut grad));
        x
    } else {
        let mut sampler = BlockSampler::accelerated(wc.params(), seed);
        let coeffs = NuAcdmCoefficients::new(wc.params());
        let mut state = DenseState::new(&start);
        (0..k).for_each(|_| nu_acdm_step(wc, coeffs, &mut state, sampler.sample(), &mut grad));
        state.x
    };
    dist_sq(&x, x_star) / dist_sq(&start, x_star)
}

pub fn run(args: &LowerBoundArgs) -> CliResult<()> {
    if args.trials < 2 {
        return Err(CliError::Usage("--trials must be at least 2".into()));
    }
    let wc = WorstCase::new(args.sigma, &args.kappas.iter().map(|k| k * args.sigma).collect::<Vec<_>>(), args.b)?;
    let n = args.kappas.len();
    let mut rows = Vec::new();
    for &k in &args.k {
        for solver in ["rbcd", "nu_acdm"] {
            let probabilities = match solver {
                "rbcd" => vec![1.0 / n as f64; n],
                _ => wc.params().probabilities(),
            };
            let bound = lower_bound_ratio(&wc.kappas(), &probabilities, k, args.b);
            for block in 0..n {
                let ratios: Vec<f64> = (0..args.trials)
                    .map(|t| error_ratio(&wc, solver, block, k, args.seed.wrapping_add(t)))
                    .collect();
                let m = args.trials as f64;
                let mean = ratios.iter().sum::<f64>() / m;
                let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (m - 1.0);
                rows.push(Row {
                    k,
                    solver,
                    block,
                    mean,
                    std_err: (var / m).sqrt(),
                    bound: bound.per_block[block],
                    closed_form: bound.closed_form,
                });
            }
        }
    }

    let mut table = format!(
        "{:>6} {:>8} {:>5} {:>12} {:>10} {:>12} {:>12}  status\n",
        "k", "solver", "block", "mean", "std_err", "bound", "closed_form"
    );
    let mut csv = String::from("k,solver,block,mean,std_err,bound,closed_form,violated\n");
    for r in &rows {
        let status = if r.violated() { "VIOLATION" } else { "ok" };
        let _ = writeln!(
            table,
            "{:>6} {:>8} {:>5} {:>12.6} {:>10.2e} {:>12.6} {:>12.6}  {status}",
            r.k, r.solver, r.block, r.mean, r.std_err, r.bound, r.closed_form
        );
        let _ = writeln!(
            csv,
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.k,
            r.solver,
            r.block,
            r.mean,
            r.std_err,
            r.bound,
            r.closed_form,
            r.violated()
        );
    }
    let violations = rows.iter().filter(|r| r.violated()).count();
    print!("{table}");
    println!("violations: {violations}");

    if let Some(out) = &args.out {
        let mut artifacts = Artifacts::create(out)?;
        artifacts.write_text("table.csv", csv)?;
        let mut s = Summary::default();
        s.put("kappas", args.kappas.iter().map(f64::to_string).collect::<Vec<_>>().join(","))
            .put("sigma", args.sigma)
            .put("b", args.b)
            .put("trials", args.trials)
            .put("seed", args.seed)
            .put("violations", violations);
        artifacts.write_text("summary.txt", s.into_string())?;
        artifacts.finish()?;
    }
    Ok(())
}
