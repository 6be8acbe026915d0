//! Energies of the continuous-time model and monotonicity checks.

use std::io::Write;

use super::integrate::OdeTrajectory;
use crate::error::{Error, Result};

/// `E(t) = e^{t/eta} (f(Y) - f* + 0.25 |Y - x* + eta Y'|^2)` at sample `i`.
pub fn energy(traj: &OdeTrajectory, i: usize) -> f64 {
    (traj.times[i] / traj.config.eta).exp() * undiscounted_energy(traj, i)
}

/// `f(Y) - f* + 0.25 |Y - x* + eta Y'|^2`, the quantity bounded by
/// `E(0) e^{-t/eta}`.
pub fn undiscounted_energy(traj: &OdeTrajectory, i: usize) -> f64 {
    let eta = traj.config.eta;
    let kinetic: f64 = traj.ys[i]
        .iter()
        .zip(&traj.vs[i])
        .zip(&traj.x_star)
        .map(|((y, v), s)| (y - s + eta * v).powi(2))
        .sum();
    traj.f_gaps[i] + 0.25 * kinetic
}

/// `c(t) = c0 (e^{-rt} + e^{-r tau} / (1 - e^{-r tau}) (e^{-rt} - 1))`.
pub fn delay_weight(t: f64, c0: f64, r: f64, tau: f64) -> f64 {
    let tail = (-r * tau).exp();
    let decay = (-r * t).exp();
    c0 * (decay + tail / (1.0 - tail) * (decay - 1.0))
}

/// Constants of the delayed convergence result: `c0 = 6 kappa^2 tau^2 / eta`
/// and `r = 1 / eta`.
pub fn delayed_constants(kappa: f64, eta: f64, tau: f64) -> (f64, f64) {
    (6.0 * kappa * kappa * tau * tau / eta, 1.0 / eta)
}

/// Largest delay covered by the delayed convergence result,
/// `n kappa^{-1/2} / sqrt(48)`.
pub fn delay_threshold(n_blocks: usize, kappa: f64) -> f64 {
    n_blocks as f64 / kappa.sqrt() / 48f64.sqrt()
}

/// `(A(t_i), D(t_i))` by composite Simpson quadrature over the stored
/// velocities. `Y'` vanishes before the start.
pub fn async_error_terms(traj: &OdeTrajectory, i: usize, c0: f64, r: f64) -> Result<(f64, f64)> {
    if i >= traj.len() {
        return Err(Error::History(format!("sample {i} beyond trajectory of {} samples", traj.len())));
    }
    let m = traj.config.delay_steps();
    if m == 0 {
        return Ok((0.0, 0.0));
    }
    let tau = traj.config.delay;
    if r * tau > 0.5 {
        return Err(Error::InvalidParameter(format!("r tau = {} exceeds 1/2", r * tau)));
    }
    if m % 2 == 1 {
        return Err(Error::InvalidParameter("delay must span an even number of steps".into()));
    }
    let h = traj.config.step;
    let mut a = 0.0;
    let mut d = 0.0;
    for j in 0..=m {
        let w = if j == 0 || j == m { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 };
        let Some(idx) = (i + j).checked_sub(m) else { continue };
        let speed: f64 = traj.vs[idx].iter().map(|v| v * v).sum();
        let age = (m - j) as f64 * h;
        a += w * delay_weight(age, c0, r, tau) * speed;
        d += w * speed;
    }
    Ok((a * h / 3.0, d * h / 3.0))
}

/// `E(t) + e^{t/eta} A(t)` at sample `i`.
pub fn composite_energy(traj: &OdeTrajectory, i: usize, c0: f64, r: f64) -> Result<f64> {
    let (a, _) = async_error_terms(traj, i, c0, r)?;
    Ok(energy(traj, i) + (traj.times[i] / traj.config.eta).exp() * a)
}

/// Largest `(s_{j+1} - s_j) / (1 + |s_j|)` over a series; nonpositive iff
/// the series never increases.
pub fn max_relative_increase(series: &[f64]) -> f64 {
    series
        .windows(2)
        .map(|w| (w[1] - w[0]) / (1.0 + w[0].abs()))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeVerdicts {
    pub energy_increase: f64,
    pub composite_increase: f64,
    pub decay_bound_holds: bool,
    pub energy_monotone: bool,
    pub composite_monotone: bool,
}

/// Per-sample energies and monotonicity verdicts at the given tolerances.
pub fn verdicts(traj: &OdeTrajectory, c0: f64, r: f64, energy_tol: f64, composite_tol: f64) -> Result<OdeVerdicts> {
    let energies: Vec<f64> = (0..traj.len()).map(|i| energy(traj, i)).collect();
    let composite = (0..traj.len()).map(|i| composite_energy(traj, i, c0, r)).collect::<Result<Vec<_>>>()?;
    let e0 = energies[0];
    let decay_bound_holds = (0..traj.len()).all(|i| {
        undiscounted_energy(traj, i) <= e0 * (-traj.times[i] / traj.config.eta).exp() * (1.0 + 1e-9) + 1e-300
    });
    let energy_increase = max_relative_increase(&energies);
    let composite_increase = max_relative_increase(&composite);
    Ok(OdeVerdicts {
        energy_increase,
        composite_increase,
        decay_bound_holds,
        energy_monotone: energy_increase <= energy_tol,
        composite_monotone: composite_increase <= composite_tol,
    })
}

/// Trajectory CSV: `t,f_gap,E,A,composite`.
pub fn write_trajectory_csv<W: Write>(traj: &OdeTrajectory, c0: f64, r: f64, mut out: W) -> Result<()> {
    writeln!(out, "t,f_gap,E,A,composite")?;
    for i in 0..traj.len() {
        let e = energy(traj, i);
        let (a, _) = async_error_terms(traj, i, c0, r)?;
        let comp = e + (traj.times[i] / traj.config.eta).exp() * a;
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", traj.times[i], traj.f_gaps[i], e, a, comp)?;
    }
    Ok(())
}
