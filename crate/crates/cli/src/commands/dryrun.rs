use std::time::Duration;

use a2bcd::runtime::dry_run_tau;
use a2bcd::Error;

use crate::args::DryrunArgs;
use crate::error::{CliError, CliResult};
use crate::output::{Artifacts, Summary};

pub fn run(args: &DryrunArgs) -> CliResult<()> {
    if !(args.seconds > 0.0 && args.seconds.is_finite()) {
        return Err(CliError::Usage(format!("--seconds must be positive, got {}", args.seconds)));
    }
    if args.workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let source = args.problem.load()?;
    let oracle = args.problem.build(&source, args.problem.lambda[0])?;
    let dry = dry_run_tau(&*oracle, args.workers, Duration::from_secs_f64(args.seconds), args.seed)?;

    let mut artifacts = Artifacts::create(&args.out)?;
    let mut buf = Vec::new();
    dry.staleness.write_csv(&mut buf).map_err(Error::from)?;
    let histogram = artifacts.write("staleness.csv", buf)?;
    let mut s = Summary::default();
    s.put("problem", args.problem.label())
        .put("workers", args.workers)
        .put("seconds", args.seconds)
        .put("seed", args.seed)
        .put("tau_hat", dry.tau_hat)
        .put("staleness_mean", format!("{:.6}", dry.staleness.mean()))
        .put("iterations", dry.iterations)
        .put("state_unchanged", dry.state_unchanged);
    artifacts.write_text("summary.txt", s.into_string())?;
    artifacts.finish()?;

    println!("tau_hat = {}", dry.tau_hat);
    println!("updates = {}", dry.iterations);
    println!("staleness histogram: {}", histogram.display());
    if !dry.state_unchanged {
        return Err(Error::Numeric("dry run modified the shared iterate".into()).into());
    }
    Ok(())
}
