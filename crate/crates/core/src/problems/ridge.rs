//! Dual of L2-regularized least squares,
//! `D(a) = |A a|^2 / (2 d^2 lambda) + |a + l|^2 / (2 d)`,
//! with `A` holding `d` features by `n` samples. Coordinates are samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::libsvm::LabeledDataset;
use super::sparse::SparseColumnMatrix;
use crate::error::{Error, Result};
use crate::linalg::power_iteration;
use crate::problem::{AffineGradient, BlockPartition, Objective, ProblemParams};

const NORM_TOL: f64 = 1e-6;
const NORM_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone)]
pub struct RidgeDual {
    matrix: SparseColumnMatrix,
    labels: Vec<f64>,
    lambda: f64,
    partition: BlockPartition,
    params: ProblemParams,
}

impl RidgeDual {
    pub fn new(data: LabeledDataset, lambda: f64, block_size: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        let LabeledDataset { matrix, labels } = data;
        if matrix.nrows() == 0 || labels.is_empty() {
            return Err(Error::InvalidParameter("empty dataset".into()));
        }
        let partition = BlockPartition::uniform(labels.len(), block_size)?;
        let d = matrix.nrows() as f64;
        let scale = 1.0 / (d * d * lambda);
        let block_lipschitz = (0..partition.n_blocks())
            .map(|i| scale * block_gram_norm(&matrix, partition.range(i)) + 1.0 / d)
            .collect();
        let global = power_iteration(
            matrix.ncols(),
            |x, y| {
                let mut ax = vec![0.0; matrix.nrows()];
                matrix.mul_vec(x, &mut ax);
                matrix.tmul_vec(&ax, y);
            },
            NORM_TOL,
            NORM_MAX_ITER,
        );
        let params = ProblemParams::new(1.0 / d, block_lipschitz, scale * global + 1.0 / d)?;
        Ok(Self { matrix, labels, lambda, partition, params })
    }

    pub fn matrix(&self) -> &SparseColumnMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn n_features(&self) -> f64 {
        self.matrix.nrows() as f64
    }

    fn quad_scale(&self) -> f64 {
        let d = self.n_features();
        1.0 / (d * d * self.lambda)
    }
}

/// `|A_block|_2^2` via power iteration on the dense block Gram matrix.
fn block_gram_norm(matrix: &SparseColumnMatrix, cols: std::ops::Range<usize>) -> f64 {
    let m = cols.len();
    let mut dense = vec![0.0; matrix.nrows()];
    let mut gram = vec![0.0; m * m];
    for (a, ca) in cols.clone().enumerate() {
        let (rows, vals) = matrix.column(ca);
        rows.iter().zip(vals).for_each(|(&r, &v)| dense[r] = v);
        for (b, cb) in cols.clone().enumerate().skip(a) {
            let g = matrix.column_dot(cb, &dense);
            gram[a * m + b] = g;
            gram[b * m + a] = g;
        }
        rows.iter().for_each(|&r| dense[r] = 0.0);
    }
    power_iteration(
        m,
        |x, y| {
            for (r, out) in y.iter_mut().enumerate() {
                *out = gram[r * m..(r + 1) * m].iter().zip(x).map(|(g, v)| g * v).sum();
            }
        },
        NORM_TOL,
        NORM_MAX_ITER,
    )
}

impl Objective for RidgeDual {
    fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    fn params(&self) -> &ProblemParams {
        &self.params
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut ax = vec![0.0; self.matrix.nrows()];
        self.matrix.mul_vec(x, &mut ax);
        let quad: f64 = ax.iter().map(|v| v * v).sum();
        let fit: f64 = x.iter().zip(&self.labels).map(|(a, l)| (a + l) * (a + l)).sum();
        0.5 * self.quad_scale() * quad + fit / (2.0 * self.n_features())
    }

    fn block_gradient(&self, block: usize, x: &[f64], out: &mut [f64]) {
        let mut ax = vec![0.0; self.matrix.nrows()];
        self.matrix.mul_vec(x, &mut ax);
        let r = self.partition.range(block);
        self.block_gradient_from_aux(block, &|row| ax[row], &x[r], out);
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let mut ax = vec![0.0; self.matrix.nrows()];
        self.matrix.mul_vec(x, &mut ax);
        let (scale, inv_d) = (self.quad_scale(), 1.0 / self.n_features());
        for (j, o) in out.iter_mut().enumerate() {
            *o = scale * self.matrix.column_dot(j, &ax) + inv_d * (x[j] + self.labels[j]);
        }
    }

    fn affine(&self) -> Option<&dyn AffineGradient> {
        Some(self)
    }
}

impl AffineGradient for RidgeDual {
    fn aux_dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn aux_product(&self, x: &[f64], out: &mut [f64]) {
        self.matrix.mul_vec(x, out);
    }

    fn block_gradient_from_aux(
        &self,
        block: usize,
        aux: &dyn Fn(usize) -> f64,
        y_block: &[f64],
        out: &mut [f64],
    ) {
        let (scale, inv_d) = (self.quad_scale(), 1.0 / self.n_features());
        for ((local, col), o) in self.partition.range(block).enumerate().zip(out.iter_mut()) {
            let (rows, vals) = self.matrix.column(col);
            let dot: f64 = rows.iter().zip(vals).map(|(&r, &v)| v * aux(r)).sum();
            *o = scale * dot + inv_d * (y_block[local] + self.labels[col]);
        }
    }

    fn for_each_block_entry(&self, block: usize, visit: &mut dyn FnMut(usize, usize, f64)) {
        for (local, col) in self.partition.range(block).enumerate() {
            let (rows, vals) = self.matrix.column(col);
            for (&r, &v) in rows.iter().zip(vals) {
                visit(local, r, v);
            }
        }
    }
}

/// Random sparse dataset with `features x samples` entries present with
/// probability `density`, values uniform in `[-1, 1]`, labels `+-1`.
pub fn synthetic_dataset(features: usize, samples: usize, density: f64, seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns: Vec<Vec<(usize, f64)>> = (0..samples)
        .map(|_| {
            (0..features)
                .filter_map(|r| rng.random_bool(density).then(|| (r, rng.random_range(-1.0..1.0))))
                .collect()
        })
        .collect();
    let labels = (0..samples).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    LabeledDataset {
        matrix: SparseColumnMatrix::from_columns(features, &columns).expect("generated rows are ordered"),
        labels,
    }
}
