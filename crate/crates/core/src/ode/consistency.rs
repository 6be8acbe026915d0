//! Agreement between the discrete scheme and the ODE as the scale shrinks.

use super::integrate::{integrate_sync, OdeConfig};
use super::potential::Potential;
use crate::error::{Error, Result};

/// Expected-step scheme at scale `s`, with `alpha = (1 + s^{-1/2} eta)^{-1}`
/// and `beta = 1 - s^{1/2} / eta`. Returns `y_0..=y_steps`, started from
/// `x_0 = v_0 = y_0`.
pub fn discrete_scheme(
    potential: &dyn Potential,
    y0: &[f64],
    eta: f64,
    s: f64,
    steps: usize,
) -> Vec<Vec<f64>> {
    let kappa = potential.lipschitz();
    let rs = s.sqrt();
    let alpha = 1.0 / (1.0 + eta / rs);
    let beta = 1.0 - rs / eta;
    let x_step = rs / (kappa.sqrt() * eta);
    let v_step = rs / eta;
    let mut v = y0.to_vec();
    let mut y = y0.to_vec();
    let mut grad = vec![0.0; y0.len()];
    let mut out = Vec::with_capacity(steps + 1);
    out.push(y.clone());
    for _ in 0..steps {
        potential.gradient(&y, &mut grad);
        for i in 0..y.len() {
            let x_next = y[i] - x_step * grad[i];
            v[i] = beta * v[i] + (1.0 - beta) * y[i] - v_step * grad[i];
            y[i] = alpha * v[i] + (1.0 - alpha) * x_next;
        }
        out.push(y.clone());
    }
    out
}

/// Initial velocity the scheme converges to: `-kappa^{-1/2} eta^{-1} grad f(y0)`.
pub fn limit_velocity(potential: &dyn Potential, y0: &[f64], eta: f64) -> Vec<f64> {
    let mut g = vec![0.0; y0.len()];
    potential.gradient(y0, &mut g);
    let k = potential.lipschitz().sqrt();
    g.iter().map(|g| -g / (k * eta)).collect()
}

/// Continuous limit of [`discrete_scheme`] as `s -> 0`, written as the
/// first-order system
///
/// ```text
/// Y' = (V - Y) / eta - kappa^{-1/2} grad f(Y) / eta
/// V' = (Y - V) / eta - grad f(Y) / eta
/// ```
///
/// Eliminating `V` gives `Y'' + 2 eta^{-1} Y' + kappa^{-1/2} eta^{-1} H Y'
/// + (1 + kappa^{-1/2}) eta^{-2} grad f = 0` with `H` the Hessian, which
/// coincides with `Y'' + 2 eta^{-1} Y' + 2 eta^{-2} grad f = 0` only for
/// `kappa = 1` and a vanishing Hessian term. Integrated with RK4 from
/// `V(0) = Y(0)`; returns `Y(horizon)`.
pub fn scheme_limit(potential: &dyn Potential, y0: &[f64], eta: f64, horizon: f64, steps: usize) -> Vec<f64> {
    let dim = y0.len();
    let inv_root_kappa = 1.0 / potential.lipschitz().sqrt();
    let mut grad = vec![0.0; dim];
    let mut rhs = |y: &[f64], v: &[f64], dy: &mut [f64], dv: &mut [f64]| {
        potential.gradient(y, &mut grad);
        for i in 0..dim {
            let gap = (v[i] - y[i]) / eta;
            dy[i] = gap - inv_root_kappa * grad[i] / eta;
            dv[i] = -gap - grad[i] / eta;
        }
    };
    let dt = horizon / steps.max(1) as f64;
    let (mut y, mut v) = (y0.to_vec(), y0.to_vec());
    let mut ky = vec![vec![0.0; dim]; 4];
    let mut kv = vec![vec![0.0; dim]; 4];
    let (mut ys, mut vs) = (vec![0.0; dim], vec![0.0; dim]);
    for _ in 0..steps.max(1) {
        for stage in 0..4 {
            let w = match stage {
                0 => 0.0,
                3 => dt,
                _ => 0.5 * dt,
            };
            for i in 0..dim {
                let (py, pv) = if stage == 0 { (0.0, 0.0) } else { (ky[stage - 1][i], kv[stage - 1][i]) };
                ys[i] = y[i] + w * py;
                vs[i] = v[i] + w * pv;
            }
            rhs(&ys, &vs, &mut ky[stage], &mut kv[stage]);
        }
        for i in 0..dim {
            y[i] += dt / 6.0 * (ky[0][i] + 2.0 * ky[1][i] + 2.0 * ky[2][i] + ky[3][i]);
            v[i] += dt / 6.0 * (kv[0][i] + 2.0 * kv[1][i] + 2.0 * kv[2][i] + kv[3][i]);
        }
    }
    y
}

#[derive(Debug, Clone, PartialEq)]
pub struct RichardsonReport {
    /// `s^{1/2}` at the three scales, each half the previous.
    pub root_scales: [f64; 3],
    /// `|y_K - Y(T)|` at each scale.
    pub errors: [f64; 3],
    /// `log2` of the ratio of successive differences between scales.
    pub observed_order: f64,
    /// Error of the first-order extrapolation from the two finest scales.
    pub extrapolated_error: f64,
    /// `|Y_limit(T) - Y(T)|` between the scheme's limit and the analyzed
    /// equation started from [`limit_velocity`].
    pub analyzed_gap: f64,
}

impl RichardsonReport {
    /// Errors shrink with the scale and extrapolation beats the finest run.
    pub fn converging(&self) -> bool {
        self.errors[0] > self.errors[1]
            && self.errors[1] > self.errors[2]
            && self.extrapolated_error < self.errors[2]
    }
}

/// Compares `y_K` at `s^{1/2} = T / K` for `K = coarse_steps, 2K, 4K` with a
/// finely integrated [`scheme_limit`].
pub fn richardson_check(
    potential: &dyn Potential,
    y0: &[f64],
    n_blocks: usize,
    horizon: f64,
    coarse_steps: usize,
) -> Result<RichardsonReport> {
    if coarse_steps == 0 {
        return Err(Error::InvalidParameter("need at least one coarse step".into()));
    }
    let kappa = potential.lipschitz();
    let fine_step = horizon / (coarse_steps * 64) as f64;
    let config = OdeConfig::new(n_blocks, kappa, fine_step, horizon)?;
    let target = scheme_limit(potential, y0, config.eta, horizon, coarse_steps * 64);
    let v0 = limit_velocity(potential, y0, config.eta);
    let analyzed = integrate_sync(potential, y0, &v0, &config)?;
    let analyzed_end = analyzed.ys.last().expect("trajectory has samples");
    let mut finals = Vec::with_capacity(3);
    let mut root_scales = [0.0; 3];
    for (j, mult) in [1usize, 2, 4].into_iter().enumerate() {
        let k = coarse_steps * mult;
        let rs = horizon / k as f64;
        root_scales[j] = rs;
        let ys = discrete_scheme(potential, y0, config.eta, rs * rs, k);
        finals.push(ys[k].clone());
    }
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let errors = [dist(&finals[0], &target), dist(&finals[1], &target), dist(&finals[2], &target)];
    let observed_order = (dist(&finals[0], &finals[1]) / dist(&finals[1], &finals[2])).log2();
    let extrapolated: Vec<f64> = finals[2].iter().zip(&finals[1]).map(|(f, c)| 2.0 * f - c).collect();
    Ok(RichardsonReport {
        root_scales,
        errors,
        observed_order,
        extrapolated_error: dist(&extrapolated, &target),
        analyzed_gap: dist(analyzed_end, &target),
    })
}
