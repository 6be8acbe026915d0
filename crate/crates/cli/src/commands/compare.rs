use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use a2bcd::diagnostics::{compare_traces, Axis, CompareOptions, Metric};
use a2bcd::solvers::Trace;

use crate::args::{AxisKind, CompareArgs, MetricKind};
use crate::error::{CliError, CliResult};
use crate::output::Artifacts;

fn read_traces(paths: &[PathBuf]) -> CliResult<Vec<Trace>> {
    paths
        .iter()
        .map(|path| {
            let file = File::open(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            Trace::read_csv(BufReader::new(file)).map_err(|source| CliError::Input { path: path.clone(), source })
        })
        .collect()
}

pub fn run(args: &CompareArgs) -> CliResult<()> {
    let a = read_traces(&args.a)?;
    let b = read_traces(&args.b)?;
    let options = CompareOptions {
        metric: match args.metric {
            MetricKind::Fx => Metric::FxGap,
            MetricKind::Fy => Metric::FyGap,
            MetricKind::Rho => Metric::Rho,
        },
        axis: match args.axis {
            AxisKind::Iterations => Axis::Iterations,
            AxisKind::Seconds => Axis::Seconds,
        },
        targets: args.targets.clone(),
        quantile: args.quantile,
        resamples: args.resamples,
        confidence: args.confidence,
        seed: args.seed,
    };
    if !(0.0..=1.0).contains(&options.quantile) || !(options.confidence > 0.0 && options.confidence < 1.0) {
        return Err(CliError::Usage("--quantile must lie in [0, 1] and --confidence in (0, 1)".into()));
    }
    let report = compare_traces(&a, &b, &options);
    let text = report.to_text();
    print!("{text}");
    if let Some(out) = &args.out {
        let mut artifacts = Artifacts::create(out)?;
        artifacts.write_text("report.csv", report.to_csv())?;
        artifacts.write_text("report.txt", text)?;
        artifacts.finish()?;
    }
    Ok(())
}
