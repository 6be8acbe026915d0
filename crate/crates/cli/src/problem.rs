use std::fs::File;
use std::io::BufReader;

use a2bcd::problems::{parse_libsvm, synth_quadratic, synthetic_dataset, LabeledDataset, RidgeDual, WorstCase};
use a2bcd::Objective;

use crate::args::{ProblemArgs, ProblemKind};
use crate::error::{CliError, CliResult};

/// Dataset read or generated once and shared across a lambda sweep.
pub enum Source {
    Generated,
    Dataset(LabeledDataset),
}

impl ProblemArgs {
    pub fn is_ridge(&self) -> bool {
        matches!(self.problem, ProblemKind::Ridge | ProblemKind::Libsvm)
    }

    pub fn label(&self) -> &'static str {
        match self.problem {
            ProblemKind::Quadratic => "quadratic",
            ProblemKind::Ridge => "ridge",
            ProblemKind::Libsvm => "libsvm",
            ProblemKind::WorstCase => "worst_case",
        }
    }

    pub fn load(&self) -> CliResult<Source> {
        match self.problem {
            ProblemKind::Quadratic | ProblemKind::WorstCase => Ok(Source::Generated),
            ProblemKind::Ridge => {
                Ok(Source::Dataset(synthetic_dataset(self.features, self.samples, self.density, self.problem_seed)))
            }
            ProblemKind::Libsvm => {
                let path = self.data.as_ref().ok_or_else(|| CliError::Usage("--problem libsvm needs --data".into()))?;
                let file = File::open(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                let data = parse_libsvm(BufReader::new(file), None)
                    .map_err(|source| CliError::Input { path: path.clone(), source })?;
                Ok(Source::Dataset(data))
            }
        }
    }

    pub fn build(&self, source: &Source, lambda: f64) -> CliResult<Box<dyn Objective>> {
        let oracle: Box<dyn Objective> = match (self.problem, source) {
            (ProblemKind::Quadratic, _) => Box::new(synth_quadratic(
                self.n_blocks,
                self.block_size.unwrap_or(2),
                self.kappa,
                self.problem_seed,
            )?),
            (ProblemKind::WorstCase, _) => {
                let blocks = vec![self.kappa; self.n_blocks];
                Box::new(WorstCase::new(1.0, &blocks, self.block_size.unwrap_or(20))?)
            }
            (_, Source::Dataset(data)) => Box::new(RidgeDual::new(data.clone(), lambda, self.block_size.unwrap_or(1))?),
            (_, Source::Generated) => unreachable!("ridge problems always load a dataset"),
        };
        Ok(oracle)
    }
}
