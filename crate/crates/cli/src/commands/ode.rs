use a2bcd::ode::{
    delay_threshold, delayed_constants, integrate_delayed, integrate_sync, verdicts, write_trajectory_csv,
    DelayMode, DiagonalQuadratic, LogCoshToy, OdeConfig, Potential,
};

use crate::args::{OdeArgs, OdeDelayKind};
use crate::error::{CliError, CliResult};
use crate::output::{Artifacts, Summary};

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn run(args: &OdeArgs) -> CliResult<()> {
    let potential: Box<dyn Potential> = match (&args.diag, &args.logcosh) {
        (_, Some(w)) => Box::new(LogCoshToy::new(w)?),
        (Some(d), None) => Box::new(DiagonalQuadratic::new(d)?),
        (None, None) => Box::new(DiagonalQuadratic::new(&[1.0, 4.0])?),
    };
    let dim = potential.dim();
    let y0 = args.y0.clone().unwrap_or_else(|| (0..dim).map(|i| 1.0 - 0.7 * i as f64).collect());
    let v0 = args.v0.clone().unwrap_or_else(|| vec![0.05; dim]);
    if y0.len() != dim || v0.len() != dim {
        return Err(CliError::Usage(format!("--y0 and --v0 need {dim} entries")));
    }
    let kappa = potential.lipschitz();
    let threshold = delay_threshold(args.n_blocks.max(1), kappa);
    let delay = args.tau.or(args.tau_fraction.map(|f| f * threshold)).unwrap_or(0.0);
    let mode = match args.mode {
        OdeDelayKind::Constant => DelayMode::Constant,
        OdeDelayKind::Random => DelayMode::PiecewiseRandom { seed: args.seed },
    };
    let config = OdeConfig::new(args.n_blocks, kappa, args.step, args.horizon)?.with_delay(delay, mode)?;
    let traj = if delay > 0.0 {
        integrate_delayed(&*potential, &y0, &v0, &config)?
    } else {
        integrate_sync(&*potential, &y0, &v0, &config)?
    };
    let (c0, r) = if delay > 0.0 { delayed_constants(kappa, config.eta, delay) } else { (0.0, 0.0) };
    let v = verdicts(&traj, c0, r, args.tolerance, args.tolerance)?;

    let mut artifacts = Artifacts::create(&args.out)?;
    let mut buf = Vec::new();
    write_trajectory_csv(&traj, c0, r, &mut buf)?;
    let path = artifacts.write("trajectory.csv", buf)?;
    let mut s = Summary::default();
    s.put("dim", dim)
        .put("n_blocks", args.n_blocks)
        .put("kappa", kappa)
        .put("eta", config.eta)
        .put("step", config.step)
        .put("horizon", config.horizon)
        .put("delay", delay)
        .put("delay_threshold", threshold)
        .put("energy_max_increase", v.energy_increase)
        .put("composite_max_increase", v.composite_increase)
        .put("energy_monotone", v.energy_monotone)
        .put("composite_monotone", v.composite_monotone)
        .put("decay_bound_holds", v.decay_bound_holds);
    artifacts.write_text("summary.txt", s.into_string())?;
    artifacts.finish()?;

    if delay > threshold {
        eprintln!("note: delay {delay} exceeds the covered range {threshold:.4}");
    }
    println!("E monotone: {}", yes_no(v.energy_monotone));
    println!("composite monotone: {}", yes_no(v.composite_monotone));
    println!("decay bound holds: {}", yes_no(v.decay_bound_holds));
    println!("max relative increase: E {:.3e}, composite {:.3e}", v.energy_increase, v.composite_increase);
    println!("trajectory: {}", path.display());
    Ok(())
}
