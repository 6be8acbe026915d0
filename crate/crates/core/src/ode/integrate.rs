//! Fixed-step fourth-order integration of the accelerated ODE and its
//! delayed variant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::energy::energy;
use super::potential::Potential;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayMode {
    /// `Y_hat(t) = Y(t - tau)`.
    Constant,
    /// Delay held constant on consecutive windows of length `tau`, each
    /// drawn uniformly from the step grid on `[0, tau]`.
    PiecewiseRandom { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeConfig {
    /// `n kappa^{1/2}`.
    pub eta: f64,
    pub step: f64,
    pub horizon: f64,
    /// Maximum delay in continuous time; 0 for the synchronous equation.
    pub delay: f64,
    pub mode: DelayMode,
}

impl OdeConfig {
    pub fn new(n_blocks: usize, kappa: f64, step: f64, horizon: f64) -> Result<Self> {
        if n_blocks == 0 || !(kappa >= 1.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need n >= 1 and kappa >= 1, got n = {n_blocks}, kappa = {kappa}"
            )));
        }
        if !(step > 0.0 && horizon > 0.0 && step.is_finite() && horizon.is_finite()) {
            return Err(Error::InvalidParameter("step and horizon must be positive".into()));
        }
        Ok(Self {
            eta: n_blocks as f64 * kappa.sqrt(),
            step,
            horizon,
            delay: 0.0,
            mode: DelayMode::Constant,
        })
    }

    /// Sets the delay and shrinks the step so that the delay spans an even
    /// number of at least 10 steps.
    pub fn with_delay(mut self, delay: f64, mode: DelayMode) -> Result<Self> {
        if !(delay >= 0.0 && delay.is_finite()) {
            return Err(Error::InvalidParameter(format!("delay must be nonnegative, got {delay}")));
        }
        self.delay = delay;
        self.mode = mode;
        if delay > 0.0 {
            let mut m = ((delay / self.step).ceil() as usize).max(10);
            m += m % 2;
            self.step = delay / m as f64;
        }
        Ok(self)
    }

    /// Steps per delay window; 0 when synchronous.
    pub fn delay_steps(&self) -> usize {
        if self.delay > 0.0 {
            (self.delay / self.step).round() as usize
        } else {
            0
        }
    }

    pub fn n_steps(&self) -> usize {
        (self.horizon / self.step).round().max(1.0) as usize
    }
}

/// Grid samples `(t_j, Y(t_j), Y'(t_j))` for `t_j = j h`.
#[derive(Debug, Clone)]
pub struct OdeTrajectory {
    pub times: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
    pub vs: Vec<Vec<f64>>,
    pub config: OdeConfig,
    pub x_star: Vec<f64>,
    pub f_star: f64,
    /// Value of `f` at each sample, shifted by `f*`.
    pub f_gaps: Vec<f64>,
}

impl OdeTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `Y(t)` by cubic Hermite interpolation, `Y0` before the start.
    pub fn interpolate(&self, t: f64) -> Vec<f64> {
        if t <= 0.0 {
            return self.ys[0].clone();
        }
        let h = self.config.step;
        let j = ((t / h).floor() as usize).min(self.len() - 2);
        hermite(&self.ys[j], &self.vs[j], &self.ys[j + 1], &self.vs[j + 1], h, t / h - j as f64)
    }
}

fn hermite(ya: &[f64], va: &[f64], yb: &[f64], vb: &[f64], h: f64, theta: f64) -> Vec<f64> {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    (0..ya.len())
        .map(|i| h00 * ya[i] + h10 * h * va[i] + h01 * yb[i] + h11 * h * vb[i])
        .collect()
}

/// `Y'' + 2 eta^{-1} Y' + 2 eta^{-2} grad f(Y) = 0`.
pub fn integrate_sync(potential: &dyn Potential, y0: &[f64], v0: &[f64], config: &OdeConfig) -> Result<OdeTrajectory> {
    let sync = OdeConfig { delay: 0.0, ..config.clone() };
    integrate(potential, y0, v0, &sync)
}

/// The same equation with `grad f` evaluated at the delayed point.
pub fn integrate_delayed(
    potential: &dyn Potential,
    y0: &[f64],
    v0: &[f64],
    config: &OdeConfig,
) -> Result<OdeTrajectory> {
    integrate(potential, y0, v0, config)
}

fn integrate(potential: &dyn Potential, y0: &[f64], v0: &[f64], config: &OdeConfig) -> Result<OdeTrajectory> {
    let dim = potential.dim();
    if y0.len() != dim || v0.len() != dim {
        return Err(Error::InvalidParameter(format!("initial state must have length {dim}")));
    }
    if !(config.eta > 0.0) {
        return Err(Error::InvalidParameter("eta must be positive".into()));
    }
    let m = config.delay_steps();
    if config.delay > 0.0 && config.step > config.delay / 10.0 * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "step {} exceeds a tenth of the delay {}",
            config.step, config.delay
        )));
    }
    let h = config.step;
    let steps = config.n_steps();
    let damp = 2.0 / config.eta;
    let force = 2.0 / (config.eta * config.eta);
    let x_star = potential.minimizer();
    let f_star = potential.optimal_value();
    let mut traj = OdeTrajectory {
        times: Vec::with_capacity(steps + 1),
        ys: Vec::with_capacity(steps + 1),
        vs: Vec::with_capacity(steps + 1),
        config: config.clone(),
        x_star,
        f_star,
        f_gaps: Vec::with_capacity(steps + 1),
    };
    traj.times.push(0.0);
    traj.ys.push(y0.to_vec());
    traj.vs.push(v0.to_vec());
    traj.f_gaps.push(potential.value(y0) - f_star);
    let mut rng = match config.mode {
        DelayMode::PiecewiseRandom { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        DelayMode::Constant => None,
    };
    let mut lag = m;
    let mut grad = vec![0.0; dim];
    let e0 = energy(&traj, 0);
    let mut prev_energy = e0;

    for n in 0..steps {
        if m > 0 && n % m == 0 {
            if let Some(rng) = rng.as_mut() {
                lag = rng.random_range(0..=m);
            }
        }
        let y = traj.ys[n].clone();
        let v = traj.vs[n].clone();
        // Acceleration at a stage: delayed reads come from step n - lag of
        // the stored grid at the same fractional position.
        let mut accel = |theta: f64, ys: &[f64], vs: &[f64], out: &mut Vec<f64>| {
            let point = if lag == 0 {
                ys.to_vec()
            } else if n < lag {
                traj.ys[0].clone()
            } else {
                let j = n - lag;
                hermite(&traj.ys[j], &traj.vs[j], &traj.ys[j + 1], &traj.vs[j + 1], h, theta)
            };
            potential.gradient(&point, &mut grad);
            out.clear();
            out.extend(vs.iter().zip(&grad).map(|(v, g)| -damp * v - force * g));
        };
        let (mut a1, mut a2, mut a3, mut a4) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        accel(0.0, &y, &v, &mut a1);
        let y2: Vec<f64> = (0..dim).map(|i| y[i] + 0.5 * h * v[i]).collect();
        let v2: Vec<f64> = (0..dim).map(|i| v[i] + 0.5 * h * a1[i]).collect();
        accel(0.5, &y2, &v2, &mut a2);
        let y3: Vec<f64> = (0..dim).map(|i| y[i] + 0.5 * h * v2[i]).collect();
        let v3: Vec<f64> = (0..dim).map(|i| v[i] + 0.5 * h * a2[i]).collect();
        accel(0.5, &y3, &v3, &mut a3);
        let y4: Vec<f64> = (0..dim).map(|i| y[i] + h * v3[i]).collect();
        let v4: Vec<f64> = (0..dim).map(|i| v[i] + h * a3[i]).collect();
        accel(1.0, &y4, &v4, &mut a4);
        let y_next: Vec<f64> = (0..dim).map(|i| y[i] + h / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i])).collect();
        let v_next: Vec<f64> = (0..dim).map(|i| v[i] + h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i])).collect();
        if y_next.iter().chain(&v_next).any(|x| !x.is_finite()) {
            return Err(Error::Numeric(format!("trajectory left the finite range at t = {}", (n + 1) as f64 * h)));
        }
        traj.times.push((n + 1) as f64 * h);
        traj.f_gaps.push(potential.value(&y_next) - f_star);
        traj.ys.push(y_next);
        traj.vs.push(v_next);
        if m == 0 {
            let e = energy(&traj, n + 1);
            if e > prev_energy + 1e-6 * (1.0 + prev_energy.abs()) {
                return Err(Error::InvalidParameter(format!(
                    "energy grew from {prev_energy:e} to {e:e} at t = {}; reduce the step size",
                    (n + 1) as f64 * h
                )));
            }
            prev_energy = e;
        }
    }
    Ok(traj)
}
