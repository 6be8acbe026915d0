//! Test functions for the continuous-time model, normalized to unit strong
//! convexity.

use crate::error::{Error, Result};
use crate::problem::Objective;

pub trait Potential: Sync {
    fn dim(&self) -> usize;

    fn value(&self, y: &[f64]) -> f64;

    fn gradient(&self, y: &[f64], out: &mut [f64]);

    /// Gradient Lipschitz constant, equal to `kappa` since `sigma = 1`.
    fn lipschitz(&self) -> f64;

    fn minimizer(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    fn optimal_value(&self) -> f64 {
        0.0
    }
}

/// `f(y) = 0.5 sum_i d_i y_i^2`, rescaled so the smallest `d_i` is 1.
#[derive(Debug, Clone)]
pub struct DiagonalQuadratic {
    diag: Vec<f64>,
}

impl DiagonalQuadratic {
    pub fn new(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() || diag.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidParameter("diagonal entries must be positive".into()));
        }
        let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self { diag: diag.iter().map(|d| d / min).collect() })
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }
}

impl Potential for DiagonalQuadratic {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn value(&self, y: &[f64]) -> f64 {
        0.5 * self.diag.iter().zip(y).map(|(d, y)| d * y * y).sum::<f64>()
    }

    fn gradient(&self, y: &[f64], out: &mut [f64]) {
        for ((o, d), y) in out.iter_mut().zip(&self.diag).zip(y) {
            *o = d * y;
        }
    }

    fn lipschitz(&self) -> f64 {
        self.diag.iter().copied().fold(0.0, f64::max)
    }
}

/// Smooth non-quadratic toy `f(y) = sum_i (0.5 y_i^2 + a_i ln cosh y_i)`.
#[derive(Debug, Clone)]
pub struct LogCoshToy {
    weights: Vec<f64>,
}

impl LogCoshToy {
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
            return Err(Error::InvalidParameter("weights must be nonnegative".into()));
        }
        Ok(Self { weights: weights.to_vec() })
    }
}

fn ln_cosh(y: f64) -> f64 {
    let a = y.abs();
    if a < 20.0 {
        (2.0 * (0.5 * a).sinh().powi(2)).ln_1p()
    } else {
        a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
    }
}

impl Potential for LogCoshToy {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, y: &[f64]) -> f64 {
        self.weights.iter().zip(y).map(|(a, y)| 0.5 * y * y + a * ln_cosh(*y)).sum()
    }

    fn gradient(&self, y: &[f64], out: &mut [f64]) {
        for ((o, a), y) in out.iter_mut().zip(&self.weights).zip(y) {
            *o = y + a * y.tanh();
        }
    }

    fn lipschitz(&self) -> f64 {
        1.0 + self.weights.iter().copied().fold(0.0, f64::max)
    }
}

/// An [`Objective`] divided by its strong-convexity modulus.
pub struct Rescaled<'a> {
    objective: &'a dyn Objective,
    scale: f64,
    minimizer: Vec<f64>,
    optimal: f64,
}

impl<'a> Rescaled<'a> {
    /// Requires a known minimizer and optimal value.
    pub fn new(objective: &'a dyn Objective) -> Result<Self> {
        let minimizer = objective
            .minimizer()
            .ok_or_else(|| Error::InvalidParameter("objective has no known minimizer".into()))?
            .to_vec();
        let optimal = objective
            .optimal_value()
            .ok_or_else(|| Error::InvalidParameter("objective has no known optimal value".into()))?;
        let scale = 1.0 / objective.params().sigma();
        Ok(Self { objective, scale, minimizer, optimal: optimal * scale })
    }
}

impl Potential for Rescaled<'_> {
    fn dim(&self) -> usize {
        self.objective.dim()
    }

    fn value(&self, y: &[f64]) -> f64 {
        self.scale * self.objective.value(y)
    }

    fn gradient(&self, y: &[f64], out: &mut [f64]) {
        self.objective.gradient(y, out);
        for o in out.iter_mut() {
            *o *= self.scale;
        }
    }

    fn lipschitz(&self) -> f64 {
        self.objective.params().kappa()
    }

    fn minimizer(&self) -> Vec<f64> {
        self.minimizer.clone()
    }

    fn optimal_value(&self) -> f64 {
        self.optimal
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::synth_quadratic;

    fn fd_check(p: &dyn Potential, y: &[f64]) -> f64 {
        let mut g = vec![0.0; p.dim()];
        p.gradient(y, &mut g);
        let mut probe = y.to_vec();
        let mut worst: f64 = 0.0;
        for i in 0..y.len() {
            let h = 1e-6;
            probe[i] = y[i] + h;
            let up = p.value(&probe);
            probe[i] = y[i] - h;
            let down = p.value(&probe);
            probe[i] = y[i];
            worst = worst.max(((up - down) / (2.0 * h) - g[i]).abs() / (1.0 + g[i].abs()));
        }
        worst
    }

    #[test]
    fn quadratic_normalized() {
        let q = DiagonalQuadratic::new(&[2.0, 8.0]).unwrap();
        assert_eq!(q.diag(), &[1.0, 4.0]);
        assert_eq!(q.lipschitz(), 4.0);
        assert!(fd_check(&q, &[0.3, -1.2]) < 1e-6);
    }

    #[test]
    fn toy_gradient_and_minimum() {
        let t = LogCoshToy::new(&[3.0, 0.5]).unwrap();
        assert!(fd_check(&t, &[0.7, -2.0]) < 1e-6);
        assert_eq!(t.value(&[0.0, 0.0]), 0.0);
        assert!((ln_cosh(1e-9) - 0.5e-18).abs() < 1e-32);
        for y in [0.3, 5.0, 19.9, 20.1, 30.0] {
            assert!((ln_cosh(y) - y.cosh().ln()).abs() <= 1e-13 * y.cosh().ln());
        }
    }

    #[test]
    fn rescaled_has_unit_modulus() {
        let q = synth_quadratic(3, 2, 25.0, 1).unwrap();
        let r = Rescaled::new(&q).unwrap();
        assert!(fd_check(&r, &[0.5; 6]) < 1e-5);
        assert_eq!(r.lipschitz(), q.params().kappa());
        assert!(r.value(&r.minimizer()).abs() < 1e-12);
    }
}
