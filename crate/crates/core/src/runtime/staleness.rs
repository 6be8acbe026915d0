//! Observed staleness of applied updates.

use std::io::Write;

/// Histogram of `k_write - k_read` over applied updates, plus the sequence
/// of observed delays in write order (truncated to a cap) for replay.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StalenessRecord {
    pub histogram: Vec<u64>,
    pub discarded: u64,
    pub sequence: Vec<usize>,
    pub truncated: bool,
}

impl StalenessRecord {
    pub fn writes(&self) -> u64 {
        self.histogram.iter().sum()
    }

    /// Largest observed staleness, the estimate of `tau`.
    pub fn max(&self) -> usize {
        self.histogram.iter().rposition(|&c| c > 0).unwrap_or(0)
    }

    pub fn mean(&self) -> f64 {
        let n = self.writes();
        if n == 0 {
            return 0.0;
        }
        self.histogram.iter().enumerate().map(|(s, &c)| s as f64 * c as f64).sum::<f64>() / n as f64
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "staleness,count")?;
        for (s, c) in self.histogram.iter().enumerate() {
            writeln!(out, "{s},{c}")?;
        }
        Ok(())
    }

    pub(crate) fn merge(parts: Vec<WorkerLog>) -> Self {
        let mut record = StalenessRecord::default();
        let mut events = Vec::new();
        let mut cutoff = u64::MAX;
        for part in parts {
            if part.truncated {
                cutoff = cutoff.min(part.events.last().map_or(0, |&(k, _)| k));
            }
            if part.histogram.len() > record.histogram.len() {
                record.histogram.resize(part.histogram.len(), 0);
            }
            for (s, c) in part.histogram.iter().enumerate() {
                record.histogram[s] += c;
            }
            record.discarded += part.discarded;
            record.truncated |= part.truncated;
            events.extend(part.events);
        }
        events.sort_unstable_by_key(|&(k, _)| k);
        // Each worker keeps its own earliest writes; only the common prefix
        // is complete.
        record.sequence =
            events.iter().take_while(|&&(k, _)| k <= cutoff).map(|&(_, s)| s as usize).collect();
        record
    }
}

#[derive(Debug, Default)]
pub(crate) struct WorkerLog {
    pub histogram: Vec<u64>,
    pub discarded: u64,
    pub events: Vec<(u64, u32)>,
    pub truncated: bool,
    limit: usize,
}

impl WorkerLog {
    pub fn new(limit: usize) -> Self {
        Self { limit, ..Default::default() }
    }

    pub fn applied(&mut self, k_write: u64, k_read: u64) {
        let s = (k_write - k_read) as usize;
        if s >= self.histogram.len() {
            self.histogram.resize(s + 1, 0);
        }
        self.histogram[s] += 1;
        if self.events.len() < self.limit {
            self.events.push((k_write, s.min(u32::MAX as usize) as u32));
        } else {
            self.truncated = true;
        }
    }
}
