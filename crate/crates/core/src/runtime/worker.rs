//! One read/compute/write cycle of the sparsified iteration.

use super::state::SparseState;
use super::transform::{inverse, mat_mul, Mat2, IDENTITY};
use crate::error::{Error, Result};
use crate::problem::Objective;
use crate::schedule::Schedule;

/// Per-run constants shared by every worker.
#[derive(Debug, Clone)]
pub struct UpdatePlan {
    m: Mat2,
    m_inv: Mat2,
    /// `(D1, D2)` per block.
    coeffs: Vec<(f64, f64)>,
    dry_run: bool,
    pub staleness_cap: Option<u64>,
    pub max_iterations: Option<u64>,
}

impl UpdatePlan {
    pub fn new(oracle: &dyn Objective, schedule: &Schedule) -> Self {
        let (a, b) = (schedule.alpha, schedule.beta);
        let m = [1.0 - a * b, a * b, 1.0 - b, b];
        let params = oracle.params();
        let coeffs = params
            .block_lipschitz()
            .iter()
            .map(|&l| schedule.update_coeffs(params.sigma(), l))
            .collect();
        Self { m, m_inv: inverse(&m), coeffs, dry_run: false, staleness_cap: None, max_iterations: None }
    }

    /// All update coefficients zeroed and `M = I`: the full loop runs but the
    /// shared vectors never change.
    pub fn dry(oracle: &dyn Objective) -> Self {
        Self {
            m: IDENTITY,
            m_inv: IDENTITY,
            coeffs: vec![(0.0, 0.0); oracle.partition().n_blocks()],
            dry_run: true,
            staleness_cap: None,
            max_iterations: None,
        }
    }

    pub fn is_dry(&self) -> bool {
        self.dry_run
    }

    pub fn block_coeffs(&self, block: usize) -> (f64, f64) {
        self.coeffs[block]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    /// Update applied as iteration `k_write`, computed from the state after
    /// `k_read` updates.
    Applied { k_write: u64, k_read: u64, restarted: bool },
    /// Throttled: the read was older than the staleness cap allows.
    Discarded { staleness: u64 },
    /// The iteration budget is spent.
    Exhausted,
}

/// Worker-local buffers. Reusable across steps.
pub struct Worker<'a> {
    state: &'a SparseState,
    oracle: &'a dyn Objective,
    plan: &'a UpdatePlan,
    y_hat: Vec<f64>,
    y_block: Vec<f64>,
    grad: Vec<f64>,
    aux: Vec<f64>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl<'a> Worker<'a> {
    pub fn new(state: &'a SparseState, oracle: &'a dyn Objective, plan: &'a UpdatePlan) -> Self {
        let aux_dim = oracle.affine().map_or(0, |a| a.aux_dim());
        let generic = if state.has_aux() { 0 } else { state.dim() };
        Self {
            state,
            oracle,
            plan,
            y_hat: vec![0.0; generic],
            y_block: Vec::new(),
            grad: Vec::new(),
            aux: vec![0.0; aux_dim],
            stamp: vec![0; aux_dim],
            epoch: 0,
        }
    }

    /// Snapshot, block gradient at the reconstructed read point, then the
    /// shared update.
    pub fn step(&mut self, block: usize) -> Result<StepOutcome> {
        let state = self.state;
        let gate = state.gate.read();
        let snap = state.transform.snapshot();
        let b = snap.b;
        let range = self.oracle.partition().range(block);
        self.grad.resize(range.len(), 0.0);
        match (self.oracle.affine(), &state.ap, &state.aq) {
            (Some(aff), Some(ap), Some(aq)) => {
                self.y_block.clear();
                self.y_block
                    .extend(range.clone().map(|j| b[0] * state.p.get(j) + b[1] * state.q.get(j)));
                self.epoch = self.epoch.wrapping_add(1);
                if self.epoch == 0 {
                    self.stamp.fill(0);
                    self.epoch = 1;
                }
                let (aux, stamp, epoch) = (&mut self.aux, &mut self.stamp, self.epoch);
                aff.for_each_block_entry(block, &mut |_, row, _| {
                    if stamp[row] != epoch {
                        stamp[row] = epoch;
                        aux[row] = b[0] * ap.get(row) + b[1] * aq.get(row);
                    }
                });
                let aux = &self.aux;
                aff.block_gradient_from_aux(block, &|r| aux[r], &self.y_block, &mut self.grad);
            }
            _ => {
                for (j, y) in self.y_hat.iter_mut().enumerate() {
                    *y = b[0] * state.p.get(j) + b[1] * state.q.get(j);
                }
                self.oracle.block_gradient(block, &self.y_hat, &mut self.grad);
            }
        }
        if let Some(bad) = self.grad.iter().find(|g| !g.is_finite()) {
            return Err(Error::Numeric(format!("non-finite block gradient {bad} on block {block}")));
        }

        let (inv, k_write, due) = {
            let mut core = state.transform.lock();
            if self.plan.max_iterations.is_some_and(|m| core.k >= m) {
                return Ok(StepOutcome::Exhausted);
            }
            let staleness = core.k - snap.k;
            if self.plan.staleness_cap.is_some_and(|cap| staleness > cap) {
                return Ok(StepOutcome::Discarded { staleness });
            }
            core.b = mat_mul(&self.plan.m, &core.b);
            core.inv = mat_mul(&core.inv, &self.plan.m_inv);
            let k_write = core.k;
            core.k += 1;
            core.since_restart += 1;
            state.transform.publish(&core);
            (core.inv, k_write, core.since_restart >= state.restart_period())
        };

        let (d1, d2) = self.plan.coeffs[block];
        let cp = inv[0] * d1 + inv[1] * d2;
        let cq = inv[2] * d1 + inv[3] * d2;
        for (j, g) in range.clone().zip(&self.grad) {
            state.p.fetch_sub(j, cp * g);
            state.q.fetch_sub(j, cq * g);
        }
        if let (Some(aff), Some(ap), Some(aq)) = (self.oracle.affine(), &state.ap, &state.aq) {
            let grad = &self.grad;
            aff.for_each_block_entry(block, &mut |col, row, a| {
                let ag = a * grad[col];
                ap.fetch_sub(row, cp * ag);
                aq.fetch_sub(row, cq * ag);
            });
        }
        drop(gate);

        let restarted = due && !self.plan.dry_run && state.restart_if_due()?;
        Ok(StepOutcome::Applied { k_write, k_read: snap.k, restarted })
    }
}
