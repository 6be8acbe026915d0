//! Dense iterations: RBCD, NU_ACDM and A2BCD.

use crate::problem::{Objective, ProblemParams};
use crate::schedule::Schedule;

/// Three-sequence state. After every step `y = alpha v + (1 - alpha) x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub v: Vec<f64>,
    pub k: u64,
}

impl DenseState {
    /// `x_0 = v_0 = y_0 = start`.
    pub fn new(start: &[f64]) -> Self {
        Self { x: start.to_vec(), y: start.to_vec(), v: start.to_vec(), k: 0 }
    }
}

/// `x <- x - grad_i f(x) / L_i` on block `i` only.
pub fn rbcd_step(oracle: &dyn Objective, x: &mut [f64], block: usize, grad: &mut Vec<f64>) {
    let range = oracle.partition().range(block);
    grad.resize(range.len(), 0.0);
    oracle.block_gradient(block, x, grad);
    let step = 1.0 / oracle.params().block(block);
    for (xi, g) in x[range].iter_mut().zip(grad.iter()) {
        *xi -= step * g;
    }
}

/// One A2BCD iteration from `(x_k, v_k, y_k)`. The block gradient is taken
/// at `delayed_y`, or at `y_k` when `None`.
pub fn a2bcd_step(
    oracle: &dyn Objective,
    schedule: &Schedule,
    state: &mut DenseState,
    block: usize,
    delayed_y: Option<&[f64]>,
    grad: &mut Vec<f64>,
) {
    let params = oracle.params();
    let range = oracle.partition().range(block);
    grad.resize(range.len(), 0.0);
    oracle.block_gradient(block, delayed_y.unwrap_or(&state.y), grad);
    let l_i = params.block(block);
    let x_step = schedule.h / l_i;
    let v_step = 1.0 / (params.sigma().sqrt() * l_i.sqrt());
    advance(state, schedule.alpha, schedule.beta, x_step, v_step, range, grad);
}

/// Coefficients of the synchronous method, computed straight from the
/// problem constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuAcdmCoefficients {
    pub alpha: f64,
    pub beta: f64,
}

impl NuAcdmCoefficients {
    pub fn new(params: &ProblemParams) -> Self {
        let root_sigma = params.sigma().sqrt();
        let s = params.sqrt_sum();
        Self { alpha: 1.0 / (1.0 + s / root_sigma), beta: 1.0 - root_sigma / s }
    }
}

pub fn nu_acdm_step(
    oracle: &dyn Objective,
    coeffs: NuAcdmCoefficients,
    state: &mut DenseState,
    block: usize,
    grad: &mut Vec<f64>,
) {
    let params = oracle.params();
    let range = oracle.partition().range(block);
    grad.resize(range.len(), 0.0);
    oracle.block_gradient(block, &state.y, grad);
    let l_i = params.block(block);
    let v_step = 1.0 / (params.sigma().sqrt() * l_i.sqrt());
    advance(state, coeffs.alpha, coeffs.beta, 1.0 / l_i, v_step, range, grad);
}

fn advance(
    state: &mut DenseState,
    alpha: f64,
    beta: f64,
    x_step: f64,
    v_step: f64,
    range: std::ops::Range<usize>,
    grad: &[f64],
) {
    let DenseState { x, y, v, k } = state;
    for ((xj, vj), yj) in x.iter_mut().zip(v.iter_mut()).zip(y.iter()) {
        *xj = *yj;
        *vj = beta * *vj + (1.0 - beta) * *yj;
    }
    for (j, g) in range.zip(grad) {
        x[j] -= x_step * g;
        v[j] -= v_step * g;
    }
    for ((yj, xj), vj) in y.iter_mut().zip(x.iter()).zip(v.iter()) {
        *yj = alpha * vj + (1.0 - alpha) * xj;
    }
    *k += 1;
}
