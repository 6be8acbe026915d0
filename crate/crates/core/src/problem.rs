//! Problem abstraction: block structure, smoothness constants and gradient
//! oracles.

use crate::error::{Error, Result};

/// Contiguous coordinate blocks. Block `i` covers `offsets[i]..offsets[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    offsets: Vec<usize>,
}

impl BlockPartition {
    pub fn from_offsets(offsets: Vec<usize>) -> Result<Self> {
        if offsets.len() < 3 {
            return Err(Error::InvalidPartition(format!(
                "need at least 2 blocks, got {}",
                offsets.len().saturating_sub(1)
            )));
        }
        if offsets[0] != 0 {
            return Err(Error::InvalidPartition("offsets must start at 0".into()));
        }
        if let Some(w) = offsets.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPartition(format!(
                "offsets not strictly increasing at {} -> {} (empty block)",
                w[0], w[1]
            )));
        }
        Ok(Self { offsets })
    }

    /// Splits `dim` coordinates into blocks of `block_size`; the final block
    /// absorbs the remainder.
    pub fn uniform(dim: usize, block_size: usize) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::InvalidPartition("block size must be positive".into()));
        }
        let n_blocks = dim / block_size;
        if n_blocks < 2 {
            return Err(Error::InvalidPartition(format!(
                "dimension {dim} with block size {block_size} yields fewer than 2 blocks"
            )));
        }
        let mut offsets: Vec<usize> = (0..n_blocks).map(|i| i * block_size).collect();
        offsets.push(dim);
        Self::from_offsets(offsets)
    }

    pub fn n_blocks(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn range(&self, block: usize) -> std::ops::Range<usize> {
        self.offsets[block]..self.offsets[block + 1]
    }

    pub fn block_len(&self, block: usize) -> usize {
        self.offsets[block + 1] - self.offsets[block]
    }

    pub fn max_block_len(&self) -> usize {
        (0..self.n_blocks()).map(|i| self.block_len(i)).max().unwrap_or(0)
    }
}

/// Strong convexity and smoothness constants of an objective.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemParams {
    sigma: f64,
    lipschitz: f64,
    block_lipschitz: Vec<f64>,
    sqrt_sum: f64,
    min_block_lipschitz: f64,
}

impl ProblemParams {
    /// `sigma` may be an underestimate and the Lipschitz constants
    /// overestimates. Requires `sigma <= L` and `sigma <= L_i`.
    pub fn new(sigma: f64, block_lipschitz: Vec<f64>, lipschitz: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::InvalidParameter(format!("L must be positive, got {lipschitz}")));
        }
        if block_lipschitz.len() < 2 {
            return Err(Error::InvalidParameter("need at least 2 block constants".into()));
        }
        if let Some((i, l)) = block_lipschitz
            .iter()
            .enumerate()
            .find(|(_, l)| !(**l > 0.0 && l.is_finite()))
        {
            return Err(Error::InvalidParameter(format!("L_{i} must be positive, got {l}")));
        }
        if sigma > lipschitz {
            return Err(Error::InvalidParameter(format!("sigma = {sigma} exceeds L = {lipschitz}")));
        }
        let min_block_lipschitz = block_lipschitz.iter().copied().fold(f64::INFINITY, f64::min);
        if sigma > min_block_lipschitz {
            return Err(Error::InvalidParameter(format!(
                "sigma = {sigma} exceeds min L_i = {min_block_lipschitz}"
            )));
        }
        let sqrt_sum = block_lipschitz.iter().map(|l| l.sqrt()).sum();
        Ok(Self { sigma, lipschitz, block_lipschitz, sqrt_sum, min_block_lipschitz })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Global gradient Lipschitz constant `L`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn block_lipschitz(&self) -> &[f64] {
        &self.block_lipschitz
    }

    pub fn block(&self, i: usize) -> f64 {
        self.block_lipschitz[i]
    }

    /// `S = sum_i sqrt(L_i)`.
    pub fn sqrt_sum(&self) -> f64 {
        self.sqrt_sum
    }

    pub fn min_block_lipschitz(&self) -> f64 {
        self.min_block_lipschitz
    }

    pub fn kappa(&self) -> f64 {
        self.lipschitz / self.sigma
    }

    pub fn n_blocks(&self) -> usize {
        self.block_lipschitz.len()
    }

    /// Sampling probabilities `sqrt(L_i) / S`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.block_lipschitz.iter().map(|l| l.sqrt() / self.sqrt_sum).collect()
    }

    /// Same constants with `sigma` replaced (used when rescaling objectives).
    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(sigma, self.block_lipschitz.clone(), self.lipschitz)
    }
}

/// Extra structure of objectives whose gradient is affine in `A x`, as in the
/// ridge-regression dual. Lets the parallel runtime maintain `A p` and `A q`
/// incrementally instead of reconstructing the full iterate.
pub trait AffineGradient: Sync {
    /// Length of the auxiliary product `A x`.
    fn aux_dim(&self) -> usize;

    /// `out = A x`.
    fn aux_product(&self, x: &[f64], out: &mut [f64]);

    /// Block gradient from the auxiliary product. `aux(r)` returns `(A y)_r`
    /// and `y_block` holds the block coordinates of `y`.
    fn block_gradient_from_aux(
        &self,
        block: usize,
        aux: &dyn Fn(usize) -> f64,
        y_block: &[f64],
        out: &mut [f64],
    );

    /// Visits every stored entry of the block's columns as
    /// `(column offset within block, row, value)`.
    fn for_each_block_entry(&self, block: usize, visit: &mut dyn FnMut(usize, usize, f64));
}

/// Smooth strongly convex objective with block gradient access.
///
/// Implementations are immutable after construction and may be shared across
/// worker threads.
pub trait Objective: Send + Sync {
    fn partition(&self) -> &BlockPartition;

    fn params(&self) -> &ProblemParams;

    fn dim(&self) -> usize {
        self.partition().dim()
    }

    fn value(&self, x: &[f64]) -> f64;

    /// Writes `grad_i f(x)` into `out` (length = block length).
    fn block_gradient(&self, block: usize, x: &[f64], out: &mut [f64]);

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let partition = self.partition();
        for i in 0..partition.n_blocks() {
            let r = partition.range(i);
            self.block_gradient(i, x, &mut out[r]);
        }
    }

    fn minimizer(&self) -> Option<&[f64]> {
        None
    }

    fn optimal_value(&self) -> Option<f64> {
        None
    }

    fn affine(&self) -> Option<&dyn AffineGradient> {
        None
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Max abs deviation between the oracle's block gradient and central finite
/// differences of `f` over the coordinates of `block`.
pub fn check_block_gradient(oracle: &dyn Objective, block: usize, point: &[f64], step: f64) -> f64 {
    assert!(step > 0.0, "finite-difference step must be positive");
    let range = oracle.partition().range(block);
    let mut analytic = vec![0.0; range.len()];
    oracle.block_gradient(block, point, &mut analytic);
    let mut probe = point.to_vec();
    let mut worst: f64 = 0.0;
    for (local, coord) in range.enumerate() {
        let base = probe[coord];
        probe[coord] = base + step;
        let up = oracle.value(&probe);
        probe[coord] = base - step;
        let down = oracle.value(&probe);
        probe[coord] = base;
        let fd = (up - down) / (2.0 * step);
        worst = worst.max((fd - analytic[local]).abs());
    }
    worst
}

/// `f(x) = 0.5 |x|^2` over a uniform partition. Mostly useful in tests.
#[derive(Debug, Clone)]
pub struct HalfSquaredNorm {
    partition: BlockPartition,
    params: ProblemParams,
    minimizer: Vec<f64>,
}

impl HalfSquaredNorm {
    pub fn new(partition: BlockPartition) -> Self {
        let n = partition.n_blocks();
        let params = ProblemParams::new(1.0, vec![1.0; n], 1.0).expect("unit constants are valid");
        let minimizer = vec![0.0; partition.dim()];
        Self { partition, params, minimizer }
    }
}

impl Objective for HalfSquaredNorm {
    fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    fn params(&self) -> &ProblemParams {
        &self.params
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x.iter().map(|v| v * v).sum::<f64>()
    }

    fn block_gradient(&self, block: usize, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&x[self.partition.range(block)]);
    }

    fn minimizer(&self) -> Option<&[f64]> {
        Some(&self.minimizer)
    }

    fn optimal_value(&self) -> Option<f64> {
        Some(0.0)
    }
}
