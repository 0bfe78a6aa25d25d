//! Moment estimates, fBm covariance comparison and Kolmogorov–Smirnov tests.
//!
//! Standard errors are plain central-limit ones computed across replicates.
//! Replicates are independent even when each path is long-range dependent, so
//! these errors are valid for ensemble averages (not for time averages along
//! one path).

use serde::{Deserialize, Serialize};

use crate::ensemble::PathEnsemble;
use crate::error::{Error, Result};

/// `sqrt(−ln(α/2)/2)` at α = 0.01.
pub const KS_CRITICAL_1PCT: f64 = 1.627_607_105_591_101;

/// Number of standard errors tolerated by [`CheckReport::evaluate`].
pub const Z_LIMIT: f64 = 3.0;

/// Sum in a fixed pairwise order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Unbiased sample variance; 0 for fewer than two values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let dev: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    pairwise_sum(&dev) / (xs.len() - 1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Mean of `xs` with its standard error.
pub fn mean_estimate(xs: &[f64]) -> Estimate {
    Estimate {
        estimate: mean(xs),
        std_error: (sample_variance(xs) / xs.len() as f64).sqrt(),
    }
}

/// Sample variance with a delta-method standard error.
pub fn variance_estimate(xs: &[f64]) -> Estimate {
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    let n = xs.len() as f64;
    let e = mean_estimate(&sq);
    Estimate {
        estimate: e.estimate * n / (n - 1.0),
        std_error: e.std_error * n / (n - 1.0),
    }
}

/// Ratio of means `mean(a)/mean(b)` of paired samples, with a delta-method
/// standard error.
pub fn ratio_estimate(a: &[f64], b: &[f64]) -> Estimate {
    let (ma, mb) = (mean(a), mean(b));
    let r = ma / mb;
    let lin: Vec<f64> = a.iter().zip(b).map(|(x, y)| x / ma - y / mb).collect();
    let se = r.abs() * (sample_variance(&lin) / a.len() as f64).sqrt();
    Estimate {
        estimate: r,
        std_error: se,
    }
}

/// Raw `r`-th moment of `xs`.
pub fn moment_of(xs: &[f64], r: u32) -> Estimate {
    let pw: Vec<f64> = xs.iter().map(|x| x.powi(r as i32)).collect();
    mean_estimate(&pw)
}

/// One validation check in the shared report schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub quantity: String,
    pub t: Option<f64>,
    pub estimate: f64,
    pub std_error: f64,
    pub target: f64,
    /// `(estimate − target)/std_error`; absent when the error is zero.
    pub z: Option<f64>,
    /// Relative tolerance, or absolute when `budget_kind` says so.
    pub budget: f64,
    pub budget_kind: BudgetKind,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetKind {
    Relative,
    Absolute,
    /// `|z| ≤ 3` is not accepted on its own; the relative budget must hold.
    Strict,
}

pub type MomentReport = CheckReport;

impl CheckReport {
    /// Pass when `|z| ≤ 3` or the relative error is within `budget`.
    pub fn evaluate(
        quantity: impl Into<String>,
        t: Option<f64>,
        est: Estimate,
        target: f64,
        budget: f64,
    ) -> Self {
        let z = (est.std_error > 0.0).then(|| (est.estimate - target) / est.std_error);
        let rel_ok = (est.estimate - target).abs() <= budget * target.abs();
        let z_ok = z.is_some_and(|z| z.abs() <= Z_LIMIT);
        Self {
            quantity: quantity.into(),
            t,
            estimate: est.estimate,
            std_error: est.std_error,
            target,
            z,
            budget,
            budget_kind: BudgetKind::Relative,
            pass: rel_ok || z_ok || est.estimate == target,
        }
    }

    /// Pass when `|estimate − target| ≤ 3·std_error + budget·|target|`.
    pub fn within_band(
        quantity: impl Into<String>,
        t: Option<f64>,
        est: Estimate,
        target: f64,
        budget: f64,
    ) -> Self {
        let mut r = Self::evaluate(quantity, t, est, target, budget);
        r.pass = (est.estimate - target).abs() <= Z_LIMIT * est.std_error + budget * target.abs();
        r
    }

    /// Pass only when the relative error is within `budget`.
    pub fn strict(
        quantity: impl Into<String>,
        t: Option<f64>,
        est: Estimate,
        target: f64,
        budget: f64,
    ) -> Self {
        let mut r = Self::evaluate(quantity, t, est, target, budget);
        r.budget_kind = BudgetKind::Strict;
        r.pass = (est.estimate - target).abs() <= budget * target.abs();
        r
    }

    /// Deterministic comparison with an absolute tolerance.
    pub fn absolute(
        quantity: impl Into<String>,
        t: Option<f64>,
        value: f64,
        target: f64,
        tol: f64,
    ) -> Self {
        Self {
            quantity: quantity.into(),
            t,
            estimate: value,
            std_error: 0.0,
            target,
            z: None,
            budget: tol,
            budget_kind: BudgetKind::Absolute,
            pass: (value - target).abs() <= tol,
        }
    }
}

/// Sample `r`-th moment of the ensemble at grid time `t`.
pub fn ensemble_moment(ens: &PathEnsemble, t: f64, r: u32) -> Result<Estimate> {
    if r == 0 {
        return Err(Error::Usage("moment order must be at least 1".into()));
    }
    Ok(moment_of(&ens.column(t)?, r))
}

/// fBm covariance `½(t₁^{2H} + t₂^{2H} − |t₁ − t₂|^{2H})`.
pub fn fbm_covariance(hurst: f64, t1: f64, t2: f64) -> f64 {
    let h2 = 2.0 * hurst;
    0.5 * (t1.powf(h2) + t2.powf(h2) - (t1 - t2).abs().powf(h2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariancePair {
    pub t1: f64,
    pub t2: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub rmse: f64,
    pub pairs: Vec<CovariancePair>,
}

pub fn covariance_vs_fbm(
    ens: &PathEnsemble,
    hurst: f64,
    pairs: &[(f64, f64)],
) -> Result<CovarianceReport> {
    let mut out = Vec::with_capacity(pairs.len());
    for &(t1, t2) in pairs {
        let (a, b) = (ens.column(t1)?, ens.column(t2)?);
        let (ma, mb) = (mean(&a), mean(&b));
        let prods: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).collect();
        let n = prods.len() as f64;
        let e = mean_estimate(&prods);
        out.push(CovariancePair {
            t1,
            t2,
            estimate: e.estimate * n / (n - 1.0).max(1.0),
            std_error: e.std_error,
            target: fbm_covariance(hurst, t1, t2),
        });
    }
    let sq: Vec<f64> = out
        .iter()
        .map(|p| (p.estimate - p.target).powi(2))
        .collect();
    let rmse = if out.is_empty() {
        0.0
    } else {
        mean(&sq).sqrt()
    };
    Ok(CovarianceReport { rmse, pairs: out })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical: f64,
    pub pass: bool,
}

const KS_MIN_SAMPLES: usize = 100;

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample Kolmogorov–Smirnov test at the 1% level (asymptotic critical value).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.len() < KS_MIN_SAMPLES || b.len() < KS_MIN_SAMPLES {
        return Err(Error::Usage(format!(
            "KS test needs at least {KS_MIN_SAMPLES} samples per side, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (a, b) = (sorted(a), sorted(b));
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let critical = KS_CRITICAL_1PCT * ((n + m) / (n * m)).sqrt();
    Ok(KsResult {
        statistic: d,
        critical,
        pass: d <= critical,
    })
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF at the 1% level.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    if xs.len() < KS_MIN_SAMPLES {
        return Err(Error::Usage(format!(
            "KS test needs at least {KS_MIN_SAMPLES} samples, got {}",
            xs.len()
        )));
    }
    let v = sorted(xs);
    let n = v.len() as f64;
    let d = v
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let critical = KS_CRITICAL_1PCT / n.sqrt();
    Ok(KsResult {
        statistic: d,
        critical,
        pass: d <= critical,
    })
}
