//! Block-separable tridiagonal quadratic whose minimizer has geometric
//! entries. Certifies the iteration lower bound for randomized block methods.

use crate::error::{Error, Result};
use crate::problem::{BlockPartition, Objective, ProblemParams};

#[derive(Debug, Clone)]
pub struct WorstCase {
    partition: BlockPartition,
    params: ProblemParams,
    block_dim: usize,
    /// `(L_i - sigma) / 4` per block.
    weights: Vec<f64>,
    thetas: Vec<f64>,
    qs: Vec<f64>,
    minimizer: Vec<f64>,
    optimal_value: f64,
}

impl WorstCase {
    /// `n` blocks of dimension `b`, block `i` being
    /// `(L_i - sigma)/4 (x'A_i x / 2 - x_1) + sigma |x|^2 / 2` with `A_i`
    /// tridiagonal `(-1, 2, -1)` except the last diagonal entry `theta_i`.
    pub fn new(sigma: f64, block_lipschitz: &[f64], b: usize) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidParameter(format!("block dimension must be >= 2, got {b}")));
        }
        if let Some(l) = block_lipschitz.iter().find(|l| **l <= sigma) {
            return Err(Error::InvalidParameter(format!(
                "every L_i must exceed sigma = {sigma}, got {l}"
            )));
        }
        let l_max = block_lipschitz.iter().copied().fold(0.0, f64::max);
        let params = ProblemParams::new(sigma, block_lipschitz.to_vec(), l_max)?;
        let n = block_lipschitz.len();
        let partition = BlockPartition::uniform(n * b, b)?;
        let mut weights = Vec::with_capacity(n);
        let mut thetas = Vec::with_capacity(n);
        let mut qs = Vec::with_capacity(n);
        let mut minimizer = Vec::with_capacity(n * b);
        let mut optimal_value = 0.0;
        for &l in block_lipschitz {
            let root = (l / sigma).sqrt();
            let q = (root - 1.0) / (root + 1.0);
            let w = (l - sigma) / 4.0;
            weights.push(w);
            thetas.push((root + 3.0) / (root + 1.0));
            qs.push(q);
            let mut power = 1.0;
            for _ in 0..b {
                power *= q;
                minimizer.push(power);
            }
            // min of x'Mx/2 - c'x is -c'x*/2 with c = w e_1
            optimal_value -= 0.5 * w * q;
        }
        Ok(Self { partition, params, block_dim: b, weights, thetas, qs, minimizer, optimal_value })
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn qs(&self) -> &[f64] {
        &self.qs
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Block condition numbers `L_i / sigma`.
    pub fn kappas(&self) -> Vec<f64> {
        self.params.block_lipschitz().iter().map(|l| l / self.params.sigma()).collect()
    }

    /// Starting point with block `i` at zero and every other block at its
    /// optimum.
    pub fn start_point(&self, block: usize) -> Vec<f64> {
        let mut x = self.minimizer.clone();
        x[self.partition.range(block)].iter_mut().for_each(|v| *v = 0.0);
        x
    }

    /// `A_i x` for one block.
    fn tridiag_apply(&self, block: usize, x: &[f64], out: &mut [f64]) {
        let b = x.len();
        for j in 0..b {
            let diag = if j + 1 == b { self.thetas[block] } else { 2.0 };
            let mut v = diag * x[j];
            if j > 0 {
                v -= x[j - 1];
            }
            if j + 1 < b {
                v -= x[j + 1];
            }
            out[j] = v;
        }
    }
}

impl Objective for WorstCase {
    fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    fn params(&self) -> &ProblemParams {
        &self.params
    }

    fn value(&self, x: &[f64]) -> f64 {
        let sigma = self.params.sigma();
        let mut ax = vec![0.0; self.block_dim];
        let mut total = 0.0;
        for i in 0..self.partition.n_blocks() {
            let xi = &x[self.partition.range(i)];
            self.tridiag_apply(i, xi, &mut ax);
            let quad: f64 = xi.iter().zip(&ax).map(|(a, b)| a * b).sum();
            let sq: f64 = xi.iter().map(|v| v * v).sum();
            total += self.weights[i] * (0.5 * quad - xi[0]) + 0.5 * sigma * sq;
        }
        total
    }

    fn block_gradient(&self, block: usize, x: &[f64], out: &mut [f64]) {
        let sigma = self.params.sigma();
        let xi = &x[self.partition.range(block)];
        self.tridiag_apply(block, xi, out);
        let w = self.weights[block];
        for (o, v) in out.iter_mut().zip(xi) {
            *o = w * *o + sigma * v;
        }
        out[0] -= w;
    }

    fn minimizer(&self) -> Option<&[f64]> {
        Some(&self.minimizer)
    }

    fn optimal_value(&self) -> Option<f64> {
        Some(self.optimal_value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{check_block_gradient, norm};

    #[test]
    fn kappa_nine_values() {
        let w = WorstCase::new(1.0, &[9.0, 9.0], 6).unwrap();
        assert!((w.qs()[0] - 0.5).abs() < 1e-15);
        assert!((w.thetas()[0] - 1.5).abs() < 1e-15);
        let star = w.minimizer().unwrap();
        let want = [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625];
        for (a, b) in star[..6].iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn gradient_vanishes_at_minimizer() {
        for (sigma, ls, b) in [(1.0, vec![9.0, 9.0], 4), (0.3, vec![2.0, 50.0, 7.5], 64), (2.0, vec![2.5, 1e4], 33)] {
            let w = WorstCase::new(sigma, &ls, b).unwrap();
            let star = w.minimizer().unwrap();
            let mut g = vec![0.0; w.dim()];
            w.gradient(star, &mut g);
            assert!(norm(&g) <= 1e-8, "grad norm {}", norm(&g));
            assert!((w.value(star) - w.optimal_value().unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_differences() {
        let w = WorstCase::new(1.0, &[9.0, 4.0], 4).unwrap();
        let x: Vec<f64> = (0..8).map(|i| (i as f64).cos()).collect();
        for i in 0..2 {
            assert!(check_block_gradient(&w, i, &x, 1e-5) <= 1e-6);
        }
    }

    #[test]
    fn degenerate_kappa_rejected() {
        assert!(WorstCase::new(1.0, &[1.0, 9.0], 4).is_err());
        assert!(WorstCase::new(1.0, &[9.0, 9.0], 1).is_err());
    }

    #[test]
    fn start_point_zeroes_one_block() {
        let w = WorstCase::new(1.0, &[9.0, 16.0], 3).unwrap();
        let x0 = w.start_point(1);
        assert_eq!(&x0[3..], &[0.0, 0.0, 0.0]);
        assert_eq!(&x0[..3], &w.minimizer().unwrap()[..3]);
    }
}
