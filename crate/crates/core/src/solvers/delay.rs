//! Delay schedules for the deterministic simulator and the iterate history
//! they read from.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// How stale each block of the gradient argument is at iteration `k`.
/// Delays are clamped to `min(tau, k)`.
#[derive(Debug, Clone, PartialEq)]
pub enum DelaySchedule {
    Zero,
    Constant(usize),
    /// Independent uniform draws on `0..=tau` per `(k, block)`.
    UniformRandom { tau: usize, seed: u64 },
    /// A recorded sequence, replayed cyclically. Every block shares the
    /// delay of its iteration.
    Recorded { tau: usize, delays: Vec<usize> },
}

impl DelaySchedule {
    pub fn recorded(delays: Vec<usize>) -> Result<Self> {
        if delays.is_empty() {
            return Err(Error::InvalidParameter("recorded delay sequence is empty".into()));
        }
        let tau = delays.iter().copied().max().unwrap_or(0);
        Ok(Self::Recorded { tau, delays })
    }

    pub fn tau(&self) -> usize {
        match self {
            Self::Zero => 0,
            Self::Constant(t) => *t,
            Self::UniformRandom { tau, .. } | Self::Recorded { tau, .. } => *tau,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.tau() == 0
    }

    pub fn delay(&self, k: u64, block: usize) -> usize {
        let raw = match self {
            Self::Zero => 0,
            Self::Constant(t) => *t,
            Self::UniformRandom { tau, seed } => {
                let h = splitmix64(splitmix64(seed ^ splitmix64(k)) ^ block as u64);
                (h % (*tau as u64 + 1)) as usize
            }
            Self::Recorded { delays, .. } => delays[(k % delays.len() as u64) as usize],
        };
        raw.min(k.min(usize::MAX as u64) as usize)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Ring of the most recent `depth + 1` iterates, newest first. Seeded with
/// copies of the start point so reads before the start return `y_0`.
#[derive(Debug, Clone)]
pub struct IterateHistory {
    ring: VecDeque<Vec<f64>>,
}

impl IterateHistory {
    pub fn new(start: &[f64], depth: usize) -> Self {
        Self { ring: (0..=depth).map(|_| start.to_vec()).collect() }
    }

    pub fn depth(&self) -> usize {
        self.ring.len() - 1
    }

    pub fn push(&mut self, y: &[f64]) {
        let mut slot = self.ring.pop_back().expect("history never empty");
        slot.copy_from_slice(y);
        self.ring.push_front(slot);
    }

    /// The iterate `back` steps ago; `back = 0` is the newest.
    pub fn get(&self, back: usize) -> Result<&[f64]> {
        self.ring.get(back).map(Vec::as_slice).ok_or_else(|| {
            Error::History(format!("requested {back} steps back, depth {}", self.depth()))
        })
    }

    /// Fills `out` block by block from the delayed iterates.
    pub fn assemble(
        &self,
        delays: &DelaySchedule,
        k: u64,
        offsets: &[usize],
        out: &mut [f64],
    ) -> Result<()> {
        for (b, w) in offsets.windows(2).enumerate() {
            let src = self.get(delays.delay(k, b))?;
            out[w[0]..w[1]].copy_from_slice(&src[w[0]..w[1]]);
        }
        Ok(())
    }
}
