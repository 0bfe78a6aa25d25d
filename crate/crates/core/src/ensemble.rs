//! Replicated sample paths on a shared time grid, with CSV and JSON I/O.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite_paths::SimConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMeta {
    pub config: Option<SimConfig>,
    pub generator: String,
    pub version: String,
    /// Gaussian sampler actually used (chaos route).
    pub sampler: Option<String>,
    /// Factor applied by empirical normalization, if requested.
    pub normalization_scale: Option<f64>,
    pub warnings: Vec<String>,
}

impl Default for EnsembleMeta {
    fn default() -> Self {
        Self {
            config: None,
            generator: crate::rng::GENERATOR_NAME.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            sampler: None,
            normalization_scale: None,
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEnsemble {
    pub t_grid: Vec<f64>,
    /// `values[replicate][time index]`.
    pub values: Vec<Vec<f64>>,
    pub meta: EnsembleMeta,
}

impl PathEnsemble {
    pub fn new(t_grid: Vec<f64>, values: Vec<Vec<f64>>, meta: EnsembleMeta) -> Result<Self> {
        if let Some((i, row)) = values
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != t_grid.len())
        {
            return Err(Error::Usage(format!(
                "replicate {i} has {} values for a grid of {}",
                row.len(),
                t_grid.len()
            )));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(
                "ensemble contains non-finite values".into(),
            ));
        }
        Ok(Self {
            t_grid,
            values,
            meta,
        })
    }

    /// An ensemble without provenance, for tests and ad-hoc analysis.
    pub fn bare(t_grid: Vec<f64>, values: Vec<Vec<f64>>) -> Self {
        Self::new(t_grid, values, EnsembleMeta::default()).expect("consistent dimensions")
    }

    pub fn replicates(&self) -> usize {
        self.values.len()
    }

    pub fn time_index(&self, t: f64) -> Result<usize> {
        self.t_grid
            .iter()
            .position(|&s| (s - t).abs() <= 1e-12 * t.abs().max(1.0))
            .ok_or_else(|| Error::Usage(format!("t = {t} is not on the ensemble grid")))
    }

    /// Values of every replicate at grid time `t`.
    pub fn column(&self, t: f64) -> Result<Vec<f64>> {
        let k = self.time_index(t)?;
        Ok(self.values.iter().map(|row| row[k]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "replicate,t,value")?;
        for (i, row) in self.values.iter().enumerate() {
            for (t, v) in self.t_grid.iter().zip(row) {
                writeln!(out, "{i},{t:.16e},{v:.16e}")?;
            }
        }
        Ok(())
    }

    /// Reads the CSV layout written by [`write_csv`](Self::write_csv). The
    /// result carries default metadata.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Usage(format!("CSV line {line}: {msg}"));
        let mut lines = input.lines();
        match lines.next() {
            Some(Ok(h)) if h.trim() == "replicate,t,value" => {}
            _ => return Err(bad(1, "expected header replicate,t,value")),
        }
        let mut t_grid: Vec<f64> = Vec::new();
        let mut values: Vec<Vec<f64>> = Vec::new();
        for (k, line) in lines.enumerate() {
            let line = line.map_err(|e| bad(k + 2, &e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let (Some(r), Some(t), Some(v), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad(k + 2, "expected three fields"));
            };
            let r: usize = r
                .trim()
                .parse()
                .map_err(|_| bad(k + 2, "bad replicate index"))?;
            let t: f64 = t.trim().parse().map_err(|_| bad(k + 2, "bad time"))?;
            let v: f64 = v.trim().parse().map_err(|_| bad(k + 2, "bad value"))?;
            if r == values.len() {
                values.push(Vec::new());
            } else if r + 1 != values.len() {
                return Err(bad(k + 2, "replicates must appear in order"));
            }
            let row = values.last_mut().expect("pushed above");
            if r == 0 {
                t_grid.push(t);
            } else if t_grid.get(row.len()) != Some(&t) {
                return Err(bad(k + 2, "time grid differs between replicates"));
            }
            row.push(v);
        }
        Self::new(t_grid, values, EnsembleMeta::default())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self)
            .map_err(|e| Error::Numerical(format!("JSON encoding failed: {e}")))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Usage(format!("invalid ensemble JSON: {e}")))
    }
}
