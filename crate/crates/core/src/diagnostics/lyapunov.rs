use crate::error::{Error, Result};
use crate::problem::{dist_sq, Objective};
use crate::schedule::Schedule;
use crate::solvers::{DenseState, IterateHistory};

/// `A_k = sum_{j=1..tau} c_j |y_{k+1-j} - y_{k-j}|^2` over a history whose
/// newest entry is `y_k`.
pub fn asynchronicity_error(weights: &[f64], history: &IterateHistory) -> Result<f64> {
    if history.depth() < weights.len() {
        return Err(Error::History(format!(
            "need {} past iterates, history holds {}",
            weights.len(),
            history.depth()
        )));
    }
    let mut total = 0.0;
    for (j, c) in weights.iter().enumerate() {
        total += c * dist_sq(history.get(j)?, history.get(j + 1)?);
    }
    Ok(total)
}

#[derive(Debug, Clone)]
pub struct LyapunovMeter {
    c: f64,
    weights: Vec<f64>,
    beta: f64,
    x_star: Vec<f64>,
    f_star: f64,
}

impl LyapunovMeter {
    pub fn new(schedule: &Schedule, x_star: Vec<f64>, f_star: f64) -> Self {
        Self {
            c: schedule.c_lyap,
            weights: schedule.c_weights.clone(),
            beta: schedule.beta,
            x_star,
            f_star,
        }
    }

    /// History depth required by [`LyapunovMeter::rho`].
    pub fn tau(&self) -> usize {
        self.weights.len()
    }

    /// Contraction factor guaranteed in expectation inside the theory window.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn x_star(&self) -> &[f64] {
        &self.x_star
    }

    pub fn f_star(&self) -> f64 {
        self.f_star
    }

    /// `|v_k - x*|^2 + A_k + c (f(x_k) - f*)`, with `f_x = f(x_k)`.
    pub fn rho(&self, v: &[f64], f_x: f64, history: &IterateHistory) -> Result<f64> {
        let a = asynchronicity_error(&self.weights, history)?;
        Ok(dist_sq(v, &self.x_star) + a + self.c * (f_x - self.f_star))
    }
}

pub fn lyapunov(
    meter: &LyapunovMeter,
    oracle: &dyn Objective,
    state: &DenseState,
    history: &IterateHistory,
) -> Result<f64> {
    meter.rho(&state.v, oracle.value(&state.x), history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::synth_quadratic;
    use crate::schedule::WindowPolicy;

    #[test]
    fn zero_at_optimum_with_stationary_history() {
        let q = synth_quadratic(4, 2, 10.0, 1).unwrap();
        let star = q.minimizer().unwrap().to_vec();
        let s = Schedule::from_psi(q.params(), 0.3, 3, WindowPolicy::Strict).unwrap();
        let meter = LyapunovMeter::new(&s, star.clone(), 0.0);
        let history = IterateHistory::new(&star, 3);
        let state = DenseState::new(&star);
        assert_eq!(lyapunov(&meter, &q, &state, &history).unwrap(), 0.0);
    }

    #[test]
    fn synchronous_form_has_no_history_term() {
        let q = synth_quadratic(4, 2, 10.0, 1).unwrap();
        let s = Schedule::synchronous(q.params());
        let meter = LyapunovMeter::new(&s, q.minimizer().unwrap().to_vec(), 0.0);
        let mut history = IterateHistory::new(&[0.0; 8], 0);
        history.push(&[5.0; 8]);
        let v = vec![1.0; 8];
        let fx = 0.7;
        let expect = dist_sq(&v, q.minimizer().unwrap()) + s.c_lyap * fx;
        assert_eq!(meter.rho(&v, fx, &history).unwrap(), expect);
    }

    #[test]
    fn history_term_by_hand() {
        let mut h = IterateHistory::new(&[0.0], 2);
        h.push(&[1.0]);
        h.push(&[3.0]);
        let a = asynchronicity_error(&[2.0, 0.5], &h).unwrap();
        assert_eq!(a, 2.0 * 4.0 + 0.5 * 1.0);
        assert!(asynchronicity_error(&[1.0, 1.0, 1.0], &h).is_err());
    }
}
