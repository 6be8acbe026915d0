//! Block-diagonal quadratics with prescribed per-block spectra.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{random_orthogonal, spectral_compose};
use crate::problem::{BlockPartition, Objective, ProblemParams};

/// `f(x) = sum_i (x_i - x*_i)' H_i (x_i - x*_i) / 2 + f*`.
#[derive(Debug, Clone)]
pub struct SyntheticQuadratic {
    partition: BlockPartition,
    params: ProblemParams,
    /// Row-major dense block Hessians.
    hessians: Vec<Vec<f64>>,
    spectra: Vec<Vec<f64>>,
    minimizer: Vec<f64>,
    optimal_value: f64,
}

/// Every block's spectrum spans `[1, kappa]` when `block_size >= 2`; with
/// unit blocks the block eigenvalues are log-spaced over `[1, kappa]`
/// instead. `sigma = 1` in both cases.
pub fn synth_quadratic(n_blocks: usize, block_size: usize, kappa: f64, seed: u64) -> Result<SyntheticQuadratic> {
    if block_size >= 2 {
        SyntheticQuadratic::spanning(n_blocks, block_size, kappa, seed)
    } else {
        SyntheticQuadratic::graded(n_blocks, block_size.max(1), kappa, seed)
    }
}

impl SyntheticQuadratic {
    /// Equal block constants: each block has eigenvalues `1` and `kappa`
    /// plus log-uniform interior values.
    pub fn spanning(n_blocks: usize, block_size: usize, kappa: f64, seed: u64) -> Result<Self> {
        if block_size < 2 {
            return Err(Error::InvalidParameter("spanning spectra need block size >= 2".into()));
        }
        Self::build(n_blocks, block_size, kappa, seed, |rng, _i| {
            let mut eigs = vec![1.0, kappa];
            eigs.extend((2..block_size).map(|_| kappa.powf(rng.random::<f64>())));
            eigs
        })
    }

    /// Graded block constants: block `i`'s spectrum spans
    /// `[1, kappa^{i/(n-1)}]`, so `L_i` ranges over `[1, kappa]`.
    pub fn graded(n_blocks: usize, block_size: usize, kappa: f64, seed: u64) -> Result<Self> {
        Self::build(n_blocks, block_size, kappa, seed, |rng, i| {
            let top = kappa.powf(i as f64 / (n_blocks - 1).max(1) as f64);
            let mut eigs = vec![top];
            if block_size >= 2 {
                eigs.push(1.0);
            }
            eigs.extend((eigs.len()..block_size).map(|_| top.powf(rng.random::<f64>())));
            eigs
        })
    }

    fn build(
        n_blocks: usize,
        block_size: usize,
        kappa: f64,
        seed: u64,
        mut spectrum: impl FnMut(&mut ChaCha8Rng, usize) -> Vec<f64>,
    ) -> Result<Self> {
        if !(kappa >= 1.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be >= 1, got {kappa}")));
        }
        let partition = BlockPartition::uniform(n_blocks * block_size, block_size)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hessians = Vec::with_capacity(n_blocks);
        let mut spectra = Vec::with_capacity(n_blocks);
        for i in 0..n_blocks {
            let eigs = spectrum(&mut rng, i);
            let q = random_orthogonal(block_size, &mut rng);
            hessians.push(spectral_compose(&q, &eigs));
            spectra.push(eigs);
        }
        let block_lipschitz: Vec<f64> =
            spectra.iter().map(|e| e.iter().copied().fold(0.0, f64::max)).collect();
        let sigma = spectra.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        let l_max = block_lipschitz.iter().copied().fold(0.0, f64::max);
        let params = ProblemParams::new(sigma, block_lipschitz, l_max)?;
        let minimizer = (0..partition.dim()).map(|_| rng.sample(StandardNormal)).collect();
        Ok(Self { partition, params, hessians, spectra, minimizer, optimal_value: 0.0 })
    }

    /// Same quadratic plus a constant.
    pub fn with_offset(mut self, offset: f64) -> Self {
        self.optimal_value += offset;
        self
    }

    /// Same quadratic translated so the minimizer moves by `shift`.
    pub fn translated(mut self, shift: &[f64]) -> Self {
        self.minimizer.iter_mut().zip(shift).for_each(|(m, s)| *m += s);
        self
    }

    pub fn spectra(&self) -> &[Vec<f64>] {
        &self.spectra
    }

    pub fn block_hessian(&self, block: usize) -> &[f64] {
        &self.hessians[block]
    }
}

impl Objective for SyntheticQuadratic {
    fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    fn params(&self) -> &ProblemParams {
        &self.params
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (i, h) in self.hessians.iter().enumerate() {
            let r = self.partition.range(i);
            let m = r.len();
            let dx: Vec<f64> = x[r.clone()].iter().zip(&self.minimizer[r]).map(|(a, b)| a - b).collect();
            for (row, d) in dx.iter().enumerate() {
                let hx: f64 = h[row * m..(row + 1) * m].iter().zip(&dx).map(|(a, b)| a * b).sum();
                total += d * hx;
            }
        }
        0.5 * total + self.optimal_value
    }

    fn block_gradient(&self, block: usize, x: &[f64], out: &mut [f64]) {
        let r = self.partition.range(block);
        let m = r.len();
        let h = &self.hessians[block];
        let xs = &x[r.clone()];
        let star = &self.minimizer[r];
        for (row, o) in out.iter_mut().enumerate() {
            *o = h[row * m..(row + 1) * m]
                .iter()
                .zip(xs.iter().zip(star))
                .map(|(a, (x, s))| a * (x - s))
                .sum();
        }
    }

    fn minimizer(&self) -> Option<&[f64]> {
        Some(&self.minimizer)
    }

    fn optimal_value(&self) -> Option<f64> {
        Some(self.optimal_value)
    }
}
