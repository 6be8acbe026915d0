//! Iteration coefficients, the Lyapunov constant and asynchronicity-error
//! weights.

use crate::error::{Error, Result};
use crate::problem::ProblemParams;

/// Upper end of the asynchronicity window with a convergence guarantee.
pub const PSI_THEORY_MAX: f64 = 3.0 / 7.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Coefficients of the main convergence result.
    Main,
    /// Alternative schedule for equal block constants, no bound on `psi`.
    Extension,
}

/// What to do when `psi` falls outside `[0, 3/7]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowPolicy {
    #[default]
    Warn,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub alpha: f64,
    pub beta: f64,
    pub h: f64,
}

/// Flat weight level `s` and discount `r` of the asynchronicity-error
/// recurrence `c_{i+1} = r c_i - s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxWeights {
    pub r: f64,
    pub s: f64,
}

/// `psi = 9 S^{-1/2} L_min^{-1/2} L^{3/4} kappa^{1/4} tau`.
pub fn asynchronicity_parameter(params: &ProblemParams, tau: usize) -> f64 {
    9.0 * params.sqrt_sum().powf(-0.5)
        * params.min_block_lipschitz().powf(-0.5)
        * params.lipschitz().powf(0.75)
        * params.kappa().powf(0.25)
        * tau as f64
}

/// Continuous delay threshold `(1/21) S^{1/2} L_min^{1/2} L^{-3/4} kappa^{-1/4}`;
/// `psi <= 3/7` iff `tau` does not exceed it.
pub fn tau_threshold(params: &ProblemParams) -> f64 {
    params.sqrt_sum().sqrt() * params.min_block_lipschitz().sqrt()
        * params.lipschitz().powf(-0.75)
        * params.kappa().powf(-0.25)
        / 21.0
}

/// Largest integer delay whose `psi` stays within the theory window.
pub fn max_tau_in_window(params: &ProblemParams) -> usize {
    let mut tau = tau_threshold(params).floor().max(0.0) as usize;
    while tau > 0 && asynchronicity_parameter(params, tau) > PSI_THEORY_MAX {
        tau -= 1;
    }
    while asynchronicity_parameter(params, tau + 1) <= PSI_THEORY_MAX {
        tau += 1;
    }
    tau
}

pub fn main_coefficients(params: &ProblemParams, psi: f64) -> Coefficients {
    let root_sigma = params.sigma().sqrt();
    let s = params.sqrt_sum();
    Coefficients {
        alpha: 1.0 / (1.0 + (1.0 + psi) * s / root_sigma),
        beta: 1.0 - (1.0 - psi) * root_sigma / s,
        h: 1.0 - 0.5 * root_sigma / params.min_block_lipschitz().sqrt() * psi,
    }
}

/// Alternative schedule, valid when every block constant is equal. Returns
/// `(psi, coefficients)` with `psi = 6 kappa^{1/2} tau / n`.
pub fn extension_coefficients(params: &ProblemParams, tau: usize) -> Result<(f64, Coefficients)> {
    let first = params.block(0);
    if params.block_lipschitz().iter().any(|l| ((l - first) / first).abs() > 1e-12) {
        return Err(Error::InvalidVariant(
            "extension schedule requires equal block Lipschitz constants".into(),
        ));
    }
    let n = params.n_blocks() as f64;
    let psi = 6.0 * params.kappa().sqrt() * tau as f64 / n;
    let root_sigma = params.sigma().sqrt();
    let s = params.sqrt_sum();
    let coeffs = Coefficients {
        alpha: 1.0 / (1.0 + (1.0 + psi) * s / root_sigma),
        beta: 1.0 - root_sigma / (s * (1.0 + psi)),
        h: 1.0 / (1.0 + 0.5 * root_sigma / params.lipschitz().sqrt() * psi),
    };
    Ok((psi, coeffs))
}

/// `c = 2 sigma^{-1/2} S^{-1} (beta (1 - alpha) / alpha + 1)`.
pub fn lyapunov_constant(params: &ProblemParams, alpha: f64, beta: f64) -> f64 {
    2.0 / (params.sigma().sqrt() * params.sqrt_sum()) * (beta * (1.0 - alpha) / alpha + 1.0)
}

pub fn aux_weights(params: &ProblemParams, psi: f64, tau: usize) -> AuxWeights {
    let s_inv = 1.0 / params.sqrt_sum();
    AuxWeights {
        r: 1.0 - params.sigma().sqrt() * s_inv,
        s: 6.0 * s_inv * params.lipschitz().sqrt() * params.kappa().powf(1.5) * tau as f64 / psi,
    }
}

/// Weights `c_1..c_tau`, by the backward recurrence `c_i = (c_{i+1} + s) / r`
/// from `c_{tau+1} = 0`. Empty when `tau == 0` or `psi == 0`.
pub fn async_weights(params: &ProblemParams, psi: f64, tau: usize) -> Vec<f64> {
    if tau == 0 || psi <= 0.0 {
        return Vec::new();
    }
    let AuxWeights { r, s } = aux_weights(params, psi, tau);
    let mut weights = vec![0.0; tau];
    let mut next = 0.0;
    for i in (0..tau).rev() {
        next = (next + s) / r;
        weights[i] = next;
    }
    weights
}

/// One immutable coefficient record per run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub psi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub h: f64,
    pub tau: usize,
    pub c_lyap: f64,
    pub c_weights: Vec<f64>,
    pub variant: Variant,
}

impl Schedule {
    /// Main schedule with `psi` derived from the maximum delay.
    pub fn from_tau(params: &ProblemParams, tau: usize, policy: WindowPolicy) -> Result<Self> {
        Self::from_psi(params, asynchronicity_parameter(params, tau), tau, policy)
    }

    /// Main schedule with `psi` set directly. `tau` only feeds the
    /// asynchronicity-error weights.
    pub fn from_psi(params: &ProblemParams, psi: f64, tau: usize, policy: WindowPolicy) -> Result<Self> {
        if !(psi >= 0.0 && psi.is_finite()) {
            return Err(Error::InvalidParameter(format!("psi must be nonnegative, got {psi}")));
        }
        if psi > PSI_THEORY_MAX && policy == WindowPolicy::Strict {
            return Err(Error::OutsideTheoryWindow { psi });
        }
        let Coefficients { alpha, beta, h } = main_coefficients(params, psi);
        if !(beta > 0.0 && h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "psi = {psi} drives beta = {beta} or h = {h} nonpositive"
            )));
        }
        Ok(Self {
            psi,
            alpha,
            beta,
            h,
            tau,
            c_lyap: lyapunov_constant(params, alpha, beta),
            c_weights: async_weights(params, psi, tau),
            variant: Variant::Main,
        })
    }

    /// Zero-delay schedule (the synchronous accelerated method).
    pub fn synchronous(params: &ProblemParams) -> Self {
        Self::from_tau(params, 0, WindowPolicy::Strict).expect("psi = 0 is always valid")
    }

    /// Equal-constant alternative schedule. The Lyapunov constant and weights
    /// reuse the main formulas with this schedule's `psi`; they carry no
    /// guarantee here.
    pub fn extension(params: &ProblemParams, tau: usize) -> Result<Self> {
        let (psi, Coefficients { alpha, beta, h }) = extension_coefficients(params, tau)?;
        Ok(Self {
            psi,
            alpha,
            beta,
            h,
            tau,
            c_lyap: lyapunov_constant(params, alpha, beta),
            c_weights: async_weights(params, psi, tau),
            variant: Variant::Extension,
        })
    }

    pub fn within_theory_window(&self) -> bool {
        self.variant == Variant::Main && self.psi <= PSI_THEORY_MAX
    }

    /// Sparsified-update coefficients `(D1, D2)` for a block with constant `l_i`.
    pub fn update_coeffs(&self, sigma: f64, l_i: f64) -> (f64, f64) {
        let d2 = 1.0 / (sigma.sqrt() * l_i.sqrt());
        (self.alpha * d2 + self.h * (1.0 - self.alpha) / l_i, d2)
    }
}
