//! Shared sparsified state: `(y, v) = B (p, q)` with `B` a product of
//! 2x2 averaging matrices.

use std::sync::atomic::{AtomicU64, Ordering};

use parking_lot::{RwLock, RwLockWriteGuard};

use super::atomic::AtomicVec;
use super::transform::{det, Mat2, SharedTransform, TransformSnapshot, IDENTITY};
use crate::error::{Error, Result};
use crate::problem::Objective;

/// Below this `|det B|` the transform is too degenerate to invert.
pub const MIN_DET: f64 = 1e-280;
const MAX_RESTART_PERIOD: u64 = 1000;
/// Entries of `(p, q)` grow like `det(B)^{-1}`, and rebuilding `y` from
/// them loses that factor in relative accuracy.
const MAX_INVERSE_GROWTH: f64 = 1e4;

/// `min(1000, largest R with (beta (1 - alpha))^{-R} < 1e4)`.
pub fn restart_period(alpha: f64, beta: f64) -> u64 {
    let shrink = beta * (1.0 - alpha);
    if !(shrink > 0.0 && shrink < 1.0) {
        return MAX_RESTART_PERIOD;
    }
    let limit = MAX_INVERSE_GROWTH.ln() / -shrink.ln();
    let mut r = (limit.ceil() as u64).min(MAX_RESTART_PERIOD + 1);
    while r > 1 && shrink.powi(-(r as i32)) >= MAX_INVERSE_GROWTH {
        r -= 1;
    }
    r.clamp(1, MAX_RESTART_PERIOD)
}

/// `y = B11 p + B12 q`, `v = B21 p + B22 q`.
pub fn recover_yv(b: &Mat2, p: &[f64], q: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = det(b);
    if !(d.abs() >= MIN_DET) {
        return Err(Error::Numeric(format!("transform determinant {d:e} is degenerate; restart overdue")));
    }
    let y = p.iter().zip(q).map(|(p, q)| b[0] * p + b[1] * q).collect();
    let v = p.iter().zip(q).map(|(p, q)| b[2] * p + b[3] * q).collect();
    Ok((y, v))
}

pub struct SparseState {
    pub(crate) p: AtomicVec,
    pub(crate) q: AtomicVec,
    pub(crate) ap: Option<AtomicVec>,
    pub(crate) aq: Option<AtomicVec>,
    pub(crate) transform: SharedTransform,
    pub(crate) gate: RwLock<()>,
    restart_period: u64,
    restarts: AtomicU64,
}

impl SparseState {
    /// Starts from `(y, v)` with `B = I`. Auxiliary products are kept when the
    /// oracle exposes an affine gradient.
    pub fn new(oracle: &dyn Objective, y: &[f64], v: &[f64], restart_period: u64) -> Self {
        let (ap, aq) = match oracle.affine() {
            Some(aff) => {
                let mut ay = vec![0.0; aff.aux_dim()];
                let mut av = vec![0.0; aff.aux_dim()];
                aff.aux_product(y, &mut ay);
                aff.aux_product(v, &mut av);
                (Some(AtomicVec::from_slice(&ay)), Some(AtomicVec::from_slice(&av)))
            }
            None => (None, None),
        };
        Self {
            p: AtomicVec::from_slice(y),
            q: AtomicVec::from_slice(v),
            ap,
            aq,
            transform: SharedTransform::new(),
            gate: RwLock::new(()),
            restart_period: restart_period.max(1),
            restarts: AtomicU64::new(0),
        }
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn restart_period(&self) -> u64 {
        self.restart_period
    }

    pub fn restarts(&self) -> u64 {
        self.restarts.load(Ordering::Relaxed)
    }

    pub fn transform(&self) -> TransformSnapshot {
        self.transform.snapshot()
    }

    pub fn iterations(&self) -> u64 {
        self.transform.snapshot().k
    }

    pub fn has_aux(&self) -> bool {
        self.ap.is_some()
    }

    /// Raw `(p, q)` copies.
    pub fn pq(&self) -> (Vec<f64>, Vec<f64>) {
        (self.p.to_vec(), self.q.to_vec())
    }

    /// Raw `(Ap, Aq)` copies, if maintained.
    pub fn aux(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        Some((self.ap.as_ref()?.to_vec(), self.aq.as_ref()?.to_vec()))
    }

    /// `(y, v, k)` from a quiescent read of the shared state.
    pub fn recover(&self) -> Result<(Vec<f64>, Vec<f64>, u64)> {
        let _g = self.gate.write();
        let snap = self.transform.snapshot();
        let (y, v) = recover_yv(&snap.b, &self.p.to_vec(), &self.q.to_vec())?;
        Ok((y, v, snap.k))
    }

    /// `(y, v, k)` without stopping writers; an inconsistent read.
    pub fn recover_live(&self) -> Result<(Vec<f64>, Vec<f64>, u64)> {
        let (snap, p, q) = {
            let _g = self.gate.read();
            let snap = self.transform.snapshot();
            (snap, self.p.to_vec(), self.q.to_vec())
        };
        let (y, v) = recover_yv(&snap.b, &p, &q)?;
        Ok((y, v, snap.k))
    }

    /// `p <- y, q <- v, Ap <- Ay, Aq <- Av, B <- I`. Waits for in-flight
    /// updates to finish.
    pub fn restart(&self) -> Result<()> {
        let gate = self.gate.write();
        self.restart_quiesced(&gate)
    }

    /// Restarts only if the period has elapsed since the last restart.
    pub(crate) fn restart_if_due(&self) -> Result<bool> {
        let gate = self.gate.write();
        if self.transform.lock().since_restart < self.restart_period {
            return Ok(false);
        }
        self.restart_quiesced(&gate)?;
        Ok(true)
    }

    fn restart_quiesced(&self, _gate: &RwLockWriteGuard<'_, ()>) -> Result<()> {
        let mut core = self.transform.lock();
        let b = core.b;
        let d = det(&b);
        if !(d.abs() >= MIN_DET) {
            return Err(Error::Numeric(format!("transform determinant {d:e} is degenerate at restart")));
        }
        remix(&self.p, &self.q, &b);
        if let (Some(ap), Some(aq)) = (&self.ap, &self.aq) {
            remix(ap, aq, &b);
        }
        core.b = IDENTITY;
        core.inv = IDENTITY;
        core.since_restart = 0;
        self.transform.publish(&core);
        self.restarts.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }
}

fn remix(p: &AtomicVec, q: &AtomicVec, b: &Mat2) {
    for j in 0..p.len() {
        let (pj, qj) = (p.get(j), q.get(j));
        p.set(j, b[0] * pj + b[1] * qj);
        q.set(j, b[2] * pj + b[3] * qj);
    }
}
