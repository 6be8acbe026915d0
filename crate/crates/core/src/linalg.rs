//! Small dense helpers shared by the problem constructors.

use rand::Rng;
use rand_distr::StandardNormal;

/// Largest eigenvalue of a symmetric positive semidefinite operator by power
/// iteration, stopping when the Rayleigh quotient changes by less than `tol`
/// relative or after `max_iter` steps. Deterministic start vector.
pub(crate) fn power_iteration(
    dim: usize,
    apply: impl Fn(&[f64], &mut [f64]),
    tol: f64,
    max_iter: usize,
) -> f64 {
    let mut v: Vec<f64> = (0..dim).map(|i| 1.0 + 0.1 * ((i % 7) as f64)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    let mut w = vec![0.0; dim];
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        apply(&v, &mut w);
        let rq: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if wn == 0.0 {
            return 0.0;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
        let done = (rq - estimate).abs() <= tol * rq.abs();
        estimate = rq;
        if done {
            break;
        }
    }
    estimate
}

/// Random orthogonal `n x n` matrix (row-major) from modified Gram-Schmidt on
/// a Gaussian matrix.
pub(crate) fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        loop {
            let mut row: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            for j in 0..i {
                let prev = &q[j * n..(j + 1) * n];
                let dot: f64 = row.iter().zip(prev).map(|(a, b)| a * b).sum();
                row.iter_mut().zip(prev).for_each(|(a, b)| *a -= dot * b);
            }
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                row.iter_mut().for_each(|x| *x /= norm);
                q[i * n..(i + 1) * n].copy_from_slice(&row);
                break;
            }
        }
    }
    q
}

/// `Q^T diag(eigs) Q` for row-major orthogonal `Q`.
pub(crate) fn spectral_compose(q: &[f64], eigs: &[f64]) -> Vec<f64> {
    let n = eigs.len();
    let mut m = vec![0.0; n * n];
    for r in 0..n {
        for c in r..n {
            let v: f64 = (0..n).map(|k| q[k * n + r] * eigs[k] * q[k * n + c]).sum();
            m[r * n + c] = v;
            m[c * n + r] = v;
        }
    }
    m
}
