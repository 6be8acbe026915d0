//! Expected-error lower bound on the tridiagonal worst-case problem.

/// Per-block bounds on `E|x_k - x*|^2 / |x_0 - x*|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBound {
    pub per_block: Vec<f64>,
    pub max: f64,
    /// `(1/2) (1 - 4 / (sum_j sqrt(kappa_j) + 2n))^k`, valid at the optimal
    /// sampling distribution.
    pub closed_form: f64,
}

/// `E[q^{2 I}]` where `I ~ Binomial(k, p)`: `(1 - (1 - q^2) p)^k`.
pub fn expected_q_power(q: f64, p: f64, k: usize) -> f64 {
    (1.0 - (1.0 - q * q) * p).powi(k as i32)
}

fn q_of(kappa: f64) -> f64 {
    let root = kappa.sqrt();
    (root - 1.0) / (root + 1.0)
}

/// Sampling distribution minimizing the bound, `p_i ∝ 1 / (1 - q_i^2)`.
pub fn optimal_probabilities(kappas: &[f64]) -> Vec<f64> {
    let w: Vec<f64> = kappas.iter().map(|&k| 1.0 / (1.0 - q_of(k).powi(2))).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

/// Block `i`'s bound is `((1 - (1 - q_i^2) p_i)^k - q_i^{2b}) / (1 - q_i^{2b})`
/// for the start point that zeroes block `i` only.
pub fn lower_bound_ratio(kappas: &[f64], probabilities: &[f64], k: usize, b: usize) -> LowerBound {
    assert_eq!(kappas.len(), probabilities.len());
    let per_block: Vec<f64> = kappas
        .iter()
        .zip(probabilities)
        .map(|(&kappa, &p)| {
            let q2b = q_of(kappa).powi(2 * b as i32);
            (expected_q_power(q_of(kappa), p, k) - q2b) / (1.0 - q2b)
        })
        .collect();
    let max = per_block.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = kappas.len() as f64;
    let root_sum: f64 = kappas.iter().map(|k| k.sqrt()).sum();
    let closed_form = 0.5 * (1.0 - 4.0 / (root_sum + 2.0 * n)).powi(k as i32);
    LowerBound { per_block, max, closed_form }
}
