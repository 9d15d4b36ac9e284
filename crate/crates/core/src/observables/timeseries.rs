use std::io::Write;

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Named real channels sampled on a shared, strictly increasing time axis.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    channels: Vec<(String, Vec<f64>)>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Params("time axis must be strictly increasing".into()));
        }
        Ok(TimeSeries {
            times,
            channels: Vec::new(),
        })
    }

    /// `count` equally spaced times on `[start, end]`.
    pub fn uniform(start: f64, end: f64, count: usize) -> Result<Self> {
        if count < 2 || !(end > start) {
            return Err(Error::Params(format!(
                "need count >= 2 and end > start, got {count} on [{start}, {end}]"
            )));
        }
        let step = (end - start) / (count - 1) as f64;
        Self::new((0..count).map(|k| start + k as f64 * step).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.times.len() {
            return Err(Error::Params(format!(
                "channel `{name}` has {} values for {} times",
                values.len(),
                self.times.len()
            )));
        }
        self.channels.push((name, values));
        Ok(())
    }

    /// Evaluates `f` at every time and stores the returned values under
    /// `names`, in order.
    pub fn sample<const N: usize, F>(&mut self, names: [&str; N], exec: Execution, f: F) -> Result<()>
    where
        F: Fn(f64) -> [f64; N] + Sync + Send,
    {
        let rows = exec.map_slice(&self.times, |&t| f(t));
        for (c, name) in names.iter().enumerate() {
            let values = rows.iter().map(|r| r[c]).collect();
            self.push(*name, values)?;
        }
        Ok(())
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn channel_names(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|(n, _)| n.as_str())
    }

    /// CSV with header `tau_lambda_over_c,<channels>`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "tau_lambda_over_c")?;
        for (name, _) in &self.channels {
            write!(out, ",{name}")?;
        }
        writeln!(out)?;
        for (k, t) in self.times.iter().enumerate() {
            write!(out, "{t:.16e}")?;
            for (_, v) in &self.channels {
                write!(out, ",{:.16e}", v[k])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}
