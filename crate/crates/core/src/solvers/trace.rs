//! Checkpointed run records and their CSV form.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub k: u64,
    pub seconds: f64,
    pub f_x_gap: f64,
    pub f_y_gap: f64,
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub checkpoints: Vec<Checkpoint>,
    pub seed: u64,
    /// Flat `key = value` snapshot of the run configuration.
    pub config: Vec<(String, String)>,
}

pub const CSV_HEADER: &str = "k,seconds,f_x_gap,f_y_gap,rho";

impl Trace {
    pub fn new(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn with_config(mut self, key: &str, value: impl ToString) -> Self {
        self.set_config(key, value);
        self
    }

    pub fn set_config(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.config.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.config.push((key.to_string(), value)),
        }
    }

    pub fn config_value(&self, key: &str) -> Option<&str> {
        self.config.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Appends a checkpoint; `k` must exceed the previous one.
    pub fn push(&mut self, checkpoint: Checkpoint) {
        if let Some(last) = self.checkpoints.last() {
            assert!(checkpoint.k > last.k, "checkpoint iterations must increase");
        }
        self.checkpoints.push(checkpoint);
    }

    pub fn last(&self) -> Option<&Checkpoint> {
        self.checkpoints.last()
    }

    pub fn final_gap(&self) -> Option<f64> {
        self.last().map(|c| c.f_y_gap)
    }

    /// First checkpoint whose `f(y) - f*` is at most `eps`.
    pub fn first_below(&self, eps: f64) -> Option<&Checkpoint> {
        self.checkpoints.iter().find(|c| c.f_y_gap <= eps)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for c in &self.checkpoints {
            write!(out, "{},{:.16e},{:.16e},{:.16e},", c.k, c.seconds, c.f_x_gap, c.f_y_gap)?;
            match c.rho {
                Some(r) => writeln!(out, "{r:.16e}")?,
                None => writeln!(out)?,
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }

    /// Parses checkpoints written by [`Trace::write_csv`]. Seed and config
    /// are not part of the CSV and come back empty.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut trace = Trace::default();
        let mut lines = reader.lines().enumerate();
        match lines.next() {
            Some((_, Ok(h))) if h.trim() == CSV_HEADER => {}
            Some((_, Err(e))) => return Err(e.into()),
            _ => return Err(Error::Parse { line: 1, message: "missing trace header".into() }),
        }
        for (idx, line) in lines {
            let line = line?;
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::Parse { line: line_no, message: "expected 5 fields".into() });
            }
            let num = |s: &str| -> Result<f64> {
                s.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad number {s:?}"),
                })
            };
            let k = fields[0].trim().parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad iteration {:?}", fields[0]),
            })?;
            if trace.last().is_some_and(|c| c.k >= k) {
                return Err(Error::Parse { line: line_no, message: "iterations must increase".into() });
            }
            let rho = if fields[4].trim().is_empty() { None } else { Some(num(fields[4])?) };
            trace.checkpoints.push(Checkpoint {
                k,
                seconds: num(fields[1])?,
                f_x_gap: num(fields[2])?,
                f_y_gap: num(fields[3])?,
                rho,
            });
        }
        Ok(trace)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Trace {
        let mut t = Trace::new(3).with_config("solver", "a2bcd");
        t.push(Checkpoint { k: 0, seconds: 0.0, f_x_gap: 1.0, f_y_gap: 1.0, rho: Some(2.5) });
        t.push(Checkpoint {
            k: 10,
            seconds: 0.125,
            f_x_gap: 0.1 + 0.2,
            f_y_gap: 1.0 / 3.0,
            rho: None,
        });
        t
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = sample();
        let csv = t.to_csv_string();
        assert!(csv.starts_with("k,seconds,f_x_gap,f_y_gap,rho\n0,"));
        assert!(csv.lines().nth(2).unwrap().ends_with(','));
        let back = Trace::read_csv(csv.as_bytes()).unwrap();
        assert_eq!(back.checkpoints, t.checkpoints);
    }

    #[test]
    #[should_panic]
    fn push_rejects_non_increasing() {
        let mut t = sample();
        t.push(Checkpoint { k: 10, seconds: 0.0, f_x_gap: 0.0, f_y_gap: 0.0, rho: None });
    }

    #[test]
    fn read_rejects_bad_rows() {
        assert!(Trace::read_csv("k,x\n".as_bytes()).is_err());
        let bad = format!("{CSV_HEADER}\n1,0,0,0\n");
        assert!(matches!(Trace::read_csv(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn config_overwrites() {
        let mut t = sample();
        t.set_config("solver", "rbcd");
        assert_eq!(t.config_value("solver"), Some("rbcd"));
        assert_eq!(t.config.len(), 1);
    }
}
