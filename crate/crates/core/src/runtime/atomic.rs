//! Shared `f64` vectors with per-scalar atomic access.

use std::sync::atomic::{AtomicU64, Ordering};

/// Fixed-length vector of `f64` stored as atomic bit patterns. Whole-vector
/// reads are not consistent; each scalar is.
#[derive(Debug)]
pub struct AtomicVec {
    cells: Box<[AtomicU64]>,
}

impl AtomicVec {
    pub fn from_slice(values: &[f64]) -> Self {
        Self { cells: values.iter().map(|v| AtomicU64::new(v.to_bits())).collect() }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        f64::from_bits(self.cells[i].load(Ordering::Relaxed))
    }

    #[inline]
    pub fn set(&self, i: usize, value: f64) {
        self.cells[i].store(value.to_bits(), Ordering::Relaxed);
    }

    /// Atomic `self[i] -= delta`.
    #[inline]
    pub fn fetch_sub(&self, i: usize, delta: f64) {
        let cell = &self.cells[i];
        let mut current = cell.load(Ordering::Relaxed);
        loop {
            let next = (f64::from_bits(current) - delta).to_bits();
            match cell.compare_exchange_weak(current, next, Ordering::Relaxed, Ordering::Relaxed) {
                Ok(_) => return,
                Err(seen) => current = seen,
            }
        }
    }

    pub fn read_into(&self, out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(self.cells.iter()) {
            *o = f64::from_bits(c.load(Ordering::Relaxed));
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.read_into(&mut out);
        out
    }

    pub fn store_from(&self, values: &[f64]) {
        assert_eq!(values.len(), self.len(), "length mismatch");
        for (c, v) in self.cells.iter().zip(values) {
            c.store(v.to_bits(), Ordering::Relaxed);
        }
    }
}
