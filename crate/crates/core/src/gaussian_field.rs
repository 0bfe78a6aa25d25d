//! Stationary Gaussian sequences by circulant embedding, and exact fBm.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::covering::hitting_prob;
use crate::error::{Error, Result};

/// Largest grid accepted by the dense factorizations.
pub const MAX_DENSE_POINTS: usize = 8192;

/// Relative eigenvalue tolerance for the circulant embedding.
pub const EIGEN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceGrid {
    pub delta: f64,
    /// `r(0), r(Δ), …, r((n−1)Δ)`.
    pub values: Vec<f64>,
}

impl CovarianceGrid {
    pub fn new(delta: f64, values: Vec<f64>) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::Parameter(format!(
                "grid step must be positive, got {delta}"
            )));
        }
        let Some(&r0) = values.first() else {
            return Err(Error::Usage("covariance grid is empty".into()));
        };
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::Parameter(format!("r(0) must be positive, got {r0}")));
        }
        if let Some((k, v)) = values.iter().enumerate().find(|(_, v)| !(v.abs() <= r0)) {
            return Err(Error::Parameter(format!(
                "|r({k})| = {} exceeds r(0) = {r0}",
                v.abs()
            )));
        }
        Ok(Self { delta, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Autocovariance `p_ε(kΔ)` of the unit-variance field attached to the covering.
pub fn cov_grid_p_eps(beta: f64, eps: f64, delta: f64, n: usize) -> Result<CovarianceGrid> {
    if n < 2 {
        return Err(Error::Usage(format!(
            "covariance grid needs n >= 2 points, got {n}"
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::Parameter(format!(
            "grid step must be positive, got {delta}"
        )));
    }
    let values = (0..n)
        .map(|k| hitting_prob(beta, eps, k as f64 * delta))
        .collect::<Result<Vec<_>>>()?;
    CovarianceGrid::new(delta, values)
}

/// Packed lower-triangular Cholesky factor, row-major.
#[derive(Clone)]
struct Cholesky {
    n: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    fn factor(
        n: usize,
        entry: impl Fn(usize, usize) -> f64,
    ) -> std::result::Result<Self, (usize, f64)> {
        let row = |i: usize| i * (i + 1) / 2;
        let mut lower = vec![0.0; n * (n + 1) / 2];
        for i in 0..n {
            for j in 0..=i {
                let (ri, rj) = (row(i), row(j));
                let dot: f64 = lower[ri..ri + j]
                    .iter()
                    .zip(&lower[rj..rj + j])
                    .map(|(a, b)| a * b)
                    .sum();
                let s = entry(i, j) - dot;
                if i == j {
                    if !(s > 0.0) {
                        return Err((i, s));
                    }
                    lower[ri + i] = s.sqrt();
                } else {
                    lower[ri + j] = s / lower[rj + j];
                }
            }
        }
        Ok(Self { n, lower })
    }

    fn apply(&self, z: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let r = i * (i + 1) / 2;
                self.lower[r..=r + i]
                    .iter()
                    .zip(z)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

#[derive(Clone)]
enum Method {
    Circulant {
        scale: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
    Cholesky(Cholesky),
}

/// A reusable sampler for one covariance grid. Construction does the
/// factorization; every draw is independent given the generator.
#[derive(Clone)]
pub struct StationarySampler {
    n: usize,
    method: Method,
}

impl std::fmt::Debug for StationarySampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StationarySampler")
            .field("n", &self.n)
            .field("method", &self.method_name())
            .finish()
    }
}

fn circulant_spectrum(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let m = 2 * (n - 1);
    let mut buf: Vec<Complex64> = (0..m)
        .map(|k| Complex64::new(values[if k < n { k } else { m - k }], 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    buf.iter().map(|c| c.re).collect()
}

impl StationarySampler {
    /// Circulant embedding, falling back to a dense Cholesky factor when the
    /// embedding has eigenvalues below `−EIGEN_TOL · max`.
    pub fn new(cov: &CovarianceGrid) -> Result<Self> {
        let n = cov.len();
        if n == 1 {
            return Self::cholesky(cov);
        }
        let lambda = circulant_spectrum(&cov.values);
        let max = lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = lambda.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -EIGEN_TOL * max {
            log::warn!(
                "circulant embedding not nonnegative (min eigenvalue {min:e}, max {max:e}); \
                 falling back to dense Cholesky"
            );
            return Self::cholesky(cov).map_err(|e| match e {
                Error::Numerical(msg) => {
                    Error::Numerical(format!("{msg}; most negative circulant eigenvalue {min:e}"))
                }
                other => other,
            });
        }
        let m = lambda.len();
        let clamped: Vec<f64> = lambda.iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        let renorm = cov.values[0] * m as f64 / total;
        let scale = clamped
            .iter()
            .map(|&l| (l * renorm / m as f64).sqrt())
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        Ok(Self {
            n,
            method: Method::Circulant { scale, fft },
        })
    }

    /// Dense Cholesky of the `n × n` Toeplitz matrix.
    pub fn cholesky(cov: &CovarianceGrid) -> Result<Self> {
        let n = cov.len();
        if n > MAX_DENSE_POINTS {
            return Err(Error::Capacity(format!(
                "dense factorization limited to {MAX_DENSE_POINTS} points, got {n}"
            )));
        }
        let chol = Cholesky::factor(n, |i, j| cov.values[i - j]).map_err(|(i, s)| {
            Error::Numerical(format!(
                "covariance not positive definite at pivot {i} ({s:e})"
            ))
        })?;
        Ok(Self {
            n,
            method: Method::Cholesky(chol),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn method_name(&self) -> &'static str {
        match self.method {
            Method::Circulant { .. } => "circulant",
            Method::Cholesky(_) => "cholesky",
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.method {
            Method::Circulant { scale, fft } => {
                let mut buf: Vec<Complex64> = scale
                    .iter()
                    .map(|&s| {
                        let a: f64 = rng.sample(StandardNormal);
                        let b: f64 = rng.sample(StandardNormal);
                        Complex64::new(s * a, s * b)
                    })
                    .collect();
                fft.process(&mut buf);
                buf[..self.n].iter().map(|c| c.re).collect()
            }
            Method::Cholesky(chol) => {
                let z: Vec<f64> = (0..self.n).map(|_| rng.sample(StandardNormal)).collect();
                chol.apply(&z)
            }
        }
    }
}

/// One path with autocovariance `cov`. Prefer [`StationarySampler`] for
/// repeated draws.
pub fn sample_stationary<R: Rng + ?Sized>(cov: &CovarianceGrid, rng: &mut R) -> Result<Vec<f64>> {
    Ok(StationarySampler::new(cov)?.sample(rng))
}

/// Exact fractional Brownian motion on a fixed grid starting at 0.
#[derive(Clone)]
pub struct FbmSampler {
    hurst: f64,
    chol: Cholesky,
}

impl FbmSampler {
    pub fn new(hurst: f64, t_grid: &[f64]) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::Parameter(format!(
                "Hurst index {hurst} outside (0, 1)"
            )));
        }
        if t_grid.first() != Some(&0.0) {
            return Err(Error::Usage("fBm grid must start at t = 0".into()));
        }
        if t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Usage("fBm grid must be strictly increasing".into()));
        }
        if t_grid.len() > MAX_DENSE_POINTS {
            return Err(Error::Capacity(format!(
                "fBm grid limited to {MAX_DENSE_POINTS} points, got {}",
                t_grid.len()
            )));
        }
        let ts = &t_grid[1..];
        let h2 = 2.0 * hurst;
        let chol = Cholesky::factor(ts.len(), |i, j| {
            let (a, b) = (ts[i], ts[j]);
            0.5 * (a.powf(h2) + b.powf(h2) - (a - b).abs().powf(h2))
        })
        .map_err(|(i, s)| {
            Error::Numerical(format!(
                "fBm covariance not positive definite at pivot {i} ({s:e})"
            ))
        })?;
        Ok(Self { hurst, chol })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z: Vec<f64> = (0..self.chol.n)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let mut out = Vec::with_capacity(self.chol.n + 1);
        out.push(0.0);
        out.extend(self.chol.apply(&z));
        out
    }
}

pub fn sample_fbm<R: Rng + ?Sized>(hurst: f64, t_grid: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    Ok(FbmSampler::new(hurst, t_grid)?.sample(rng))
}
