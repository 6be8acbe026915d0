//! The 2x2 sparsifying transform `B` and its inverse, published through a
//! sequence lock so readers always see a matching pair.

use std::sync::atomic::{fence, AtomicU64, Ordering};

use parking_lot::{Mutex, MutexGuard};

pub type Mat2 = [f64; 4];

pub const IDENTITY: Mat2 = [1.0, 0.0, 0.0, 1.0];

/// Row-major `a * b`.
pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

pub fn det(a: &Mat2) -> f64 {
    a[0] * a[3] - a[1] * a[2]
}

pub fn inverse(a: &Mat2) -> Mat2 {
    let d = det(a);
    [a[3] / d, -a[1] / d, -a[2] / d, a[0] / d]
}

/// Consistent view of the transform at one iteration count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformSnapshot {
    pub b: Mat2,
    pub inv: Mat2,
    /// Updates applied so far.
    pub k: u64,
    /// Updates folded into `b` since the last restart.
    pub since_restart: u64,
    pub version: u64,
}

/// `M^j` for the averaging matrix `M = [[1 - a b, a b], [1 - b, b]]`, from
/// its eigendecomposition (eigenvalues 1 and `b (1 - a)`). `j` may be
/// negative.
pub fn averaging_power(alpha: f64, beta: f64, j: i64) -> Mat2 {
    let (ab, one_b) = (alpha * beta, 1.0 - beta);
    let gamma = (beta * (1.0 - alpha)).powf(j as f64);
    let v = [1.0, ab, 1.0, -one_b];
    let scaled = [v[0], v[1] * gamma, v[2], v[3] * gamma];
    mat_mul(&scaled, &inverse(&v))
}

impl TransformSnapshot {
    /// Largest relative deviation of `b` and `inv` from `M^j` and `M^{-j}`
    /// with `j = since_restart`. Near rounding level for a snapshot taken
    /// from one publish; a pair mixed across publishes is off by a factor of
    /// `b (1 - a)` in one eigendirection.
    pub fn pairing_defect(&self, alpha: f64, beta: f64) -> f64 {
        let j = self.since_restart as i64;
        let rel = |got: &Mat2, want: &Mat2| {
            let scale = want.iter().fold(0.0f64, |m, w| m.max(w.abs()));
            got.iter().zip(want).fold(0.0f64, |m, (g, w)| m.max((g - w).abs())) / scale
        };
        rel(&self.b, &averaging_power(alpha, beta, j)).max(rel(&self.inv, &averaging_power(alpha, beta, -j)))
    }
}

/// Authoritative copy, mutated only under the lock.
#[derive(Debug, Clone)]
pub struct TransformCore {
    pub b: Mat2,
    pub inv: Mat2,
    pub k: u64,
    pub since_restart: u64,
}

pub struct SharedTransform {
    core: Mutex<TransformCore>,
    version: AtomicU64,
    words: [AtomicU64; 10],
}

impl SharedTransform {
    pub fn new() -> Self {
        let t = Self {
            core: Mutex::new(TransformCore { b: IDENTITY, inv: IDENTITY, k: 0, since_restart: 0 }),
            version: AtomicU64::new(0),
            words: Default::default(),
        };
        t.publish(&t.core.lock());
        t
    }

    pub fn lock(&self) -> MutexGuard<'_, TransformCore> {
        self.core.lock()
    }

    /// Makes `core` visible to readers. Call with the lock held.
    pub fn publish(&self, core: &TransformCore) {
        self.version.fetch_add(1, Ordering::Relaxed);
        fence(Ordering::Release);
        for (w, v) in self.words.iter().zip(core.b.iter().chain(core.inv.iter())) {
            w.store(v.to_bits(), Ordering::Relaxed);
        }
        self.words[8].store(core.k, Ordering::Relaxed);
        self.words[9].store(core.since_restart, Ordering::Relaxed);
        self.version.fetch_add(1, Ordering::Release);
    }

    pub fn snapshot(&self) -> TransformSnapshot {
        loop {
            let before = self.version.load(Ordering::Acquire);
            if before % 2 == 1 {
                std::hint::spin_loop();
                continue;
            }
            let mut raw = [0u64; 10];
            for (r, w) in raw.iter_mut().zip(&self.words) {
                *r = w.load(Ordering::Relaxed);
            }
            fence(Ordering::Acquire);
            if self.version.load(Ordering::Relaxed) == before {
                let f = |i: usize| f64::from_bits(raw[i]);
                return TransformSnapshot {
                    b: [f(0), f(1), f(2), f(3)],
                    inv: [f(4), f(5), f(6), f(7)],
                    k: raw[8],
                    since_restart: raw[9],
                    version: before,
                };
            }
        }
    }
}

impl Default for SharedTransform {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_pair() {
        let m = [0.9, 0.1, 0.2, 0.7];
        let p = mat_mul(&m, &inverse(&m));
        for (a, b) in p.iter().zip(IDENTITY.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn averaging_power_matches_repeated_products() {
        let (alpha, beta) = (0.05, 0.97);
        let m = [1.0 - alpha * beta, alpha * beta, 1.0 - beta, beta];
        let (mut b, mut inv) = (IDENTITY, IDENTITY);
        let m_inv = inverse(&m);
        for j in 1..=300i64 {
            b = mat_mul(&m, &b);
            inv = mat_mul(&inv, &m_inv);
            let snap = TransformSnapshot { b, inv, k: j as u64, since_restart: j as u64, version: 0 };
            assert!(snap.pairing_defect(alpha, beta) < 1e-10, "j = {j}");
        }
        assert_eq!(averaging_power(alpha, beta, 0), IDENTITY);
    }

    #[test]
    fn pairing_defect_flags_mixed_publishes() {
        let (alpha, beta) = (0.05, 0.97);
        for j in [1i64, 10, 200] {
            let snap = TransformSnapshot {
                b: averaging_power(alpha, beta, j),
                inv: averaging_power(alpha, beta, -(j + 1)),
                k: j as u64,
                since_restart: j as u64,
                version: 0,
            };
            assert!(snap.pairing_defect(alpha, beta) > 1e-3);
        }
    }

    #[test]
    fn snapshots_never_mix_versions() {
        let t = SharedTransform::new();
        std::thread::scope(|s| {
            s.spawn(|| {
                for i in 1..20_000u64 {
                    let mut core = t.lock();
                    let v = i as f64;
                    core.b = [v; 4];
                    core.inv = [-v; 4];
                    core.k = i;
                    t.publish(&core);
                }
            });
            for _ in 0..2 {
                s.spawn(|| {
                    for _ in 0..20_000 {
                        let snap = t.snapshot();
                        if snap.k == 0 {
                            assert_eq!(snap.b, IDENTITY);
                            continue;
                        }
                        let v = snap.k as f64;
                        assert!(snap.b.iter().all(|x| *x == v));
                        assert!(snap.inv.iter().all(|x| *x == -v));
                    }
                });
            }
        });
    }
}
