//! Hermite process sample paths by three independent routes.
//!
//! * `chaos`: Hermite polynomial of the stationary Gaussian field with
//!   covariance `p_ε`, integrated in time.
//! * `atoms`: the multiple Wiener-Itô integral over the space of shifted
//!   regenerative sets, discretized by `M` sampled atoms with Gaussian weights.
//! * `timedomain`: the moving-average kernel `∫_0^t ∏ (s − x_j)_+^{β/2−1} ds`
//!   against white noise on a graded cell mesh.
//!
//! `fbm_exact` draws fractional Brownian motion with the same Hurst index and
//! serves as the reference law for `p = 1`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::{drift_d_eps, hitting_prob, make_atom, ShiftedAtom};
use crate::ensemble::{EnsembleMeta, PathEnsemble};
use crate::error::{Error, Result};
use crate::gaussian_field::{cov_grid_p_eps, FbmSampler, StationarySampler};
use crate::interval_set::intersect_into;
use crate::local_time::local_time_prefactor;
use crate::rng::{stream, SimRng};
use crate::specfun::{eps_over_e_pow, hermite_poly, ln_factorial, ln_gamma, HermiteParams};
use crate::stats::sample_variance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Chaos,
    Atoms,
    Timedomain,
    FbmExact,
}

impl Route {
    pub const ALL: [Route; 4] = [
        Route::Chaos,
        Route::Atoms,
        Route::Timedomain,
        Route::FbmExact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Route::Chaos => "chaos",
            Route::Atoms => "atoms",
            Route::Timedomain => "timedomain",
            Route::FbmExact => "fbm_exact",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Route::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown route '{s}' (expected chaos, atoms, timedomain or fbm_exact)"
                ))
            })
    }
}

/// How the chaos route evaluates its scale factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftMode {
    /// `d_ε` replaced by its small-ε equivalent `Γ(β)(ε/e)^{1−β}`.
    #[default]
    Asymptotic,
    /// Closed-form `d_ε` with the limiting mass `1/Γ(2−β)` of the shift measure.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: HermiteParams,
    pub route: Route,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    /// Number of atoms `M`.
    pub atoms: Option<usize>,
    /// Left truncation `X` of the time-domain mesh.
    pub x_cut: Option<f64>,
    pub horizon: f64,
    pub t_grid: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub drift_mode: DriftMode,
    /// Rescale the ensemble so the sample variance matches `t^{2H}` at the
    /// reference time (1 if on the grid, else the last grid time).
    #[serde(default)]
    pub normalize: bool,
}

pub const DEFAULT_CHAOS_EPS: f64 = 5e-3;
pub const DEFAULT_CHAOS_DELTA: f64 = 1e-3;
pub const DEFAULT_ATOMS_EPS: f64 = 1e-3;
pub const DEFAULT_ATOMS_M: usize = 256;
pub const DEFAULT_TIMEDOMAIN_DELTA: f64 = 2.5e-3;
pub const DEFAULT_X_CUT: f64 = 1e12;

/// Growth ratio of the cell widths beyond `2T` in the time-domain mesh.
const MESH_GROWTH: f64 = 1.05;

pub fn default_t_grid() -> Vec<f64> {
    (0..=20).map(|k| f64::from(k) / 20.0).collect()
}

impl SimConfig {
    /// Route defaults on `[0, 1]` with the standard output grid.
    pub fn preset(params: HermiteParams, route: Route) -> Self {
        let mut cfg = SimConfig {
            params,
            route,
            eps: None,
            delta: None,
            atoms: None,
            x_cut: None,
            horizon: 1.0,
            t_grid: default_t_grid(),
            replicates: 1000,
            seed: 0,
            drift_mode: DriftMode::Asymptotic,
            normalize: false,
        };
        match route {
            Route::Chaos => {
                cfg.eps = Some(DEFAULT_CHAOS_EPS);
                cfg.delta = Some(DEFAULT_CHAOS_DELTA);
            }
            Route::Atoms => {
                cfg.eps = Some(DEFAULT_ATOMS_EPS);
                cfg.atoms = Some(DEFAULT_ATOMS_M);
            }
            Route::Timedomain => {
                cfg.delta = Some(DEFAULT_TIMEDOMAIN_DELTA);
                cfg.x_cut = Some(DEFAULT_X_CUT);
            }
            Route::FbmExact => {}
        }
        cfg
    }

    fn require(&self, name: &str, v: Option<f64>) -> Result<f64> {
        match v {
            Some(x) if x > 0.0 && x.is_finite() => Ok(x),
            Some(x) => Err(Error::Config(format!("{name} must be positive, got {x}"))),
            None => Err(Error::Config(format!(
                "route {} requires {name}",
                self.route
            ))),
        }
    }

    pub fn eps(&self) -> Result<f64> {
        self.require("eps", self.eps)
    }

    pub fn delta(&self) -> Result<f64> {
        self.require("delta", self.delta)
    }

    pub fn x_cut(&self) -> Result<f64> {
        self.require("x_cut", self.x_cut)
    }

    pub fn atom_count(&self) -> Result<usize> {
        let m = self
            .atoms
            .ok_or_else(|| Error::Config("route atoms requires the atom count M".into()))?;
        let p = self.params.p as usize;
        if m < 4 * p {
            return Err(Error::Config(format!(
                "atom count M = {m} must be at least 4p = {}",
                4 * p
            )));
        }
        Ok(m)
    }

    pub fn t_max(&self) -> f64 {
        self.t_grid.last().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicate count must be at least 1".into()));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::Config(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.t_grid.is_empty() {
            return Err(Error::Config("t_grid is empty".into()));
        }
        if self
            .t_grid
            .iter()
            .any(|&t| !(0.0..=self.horizon).contains(&t))
        {
            return Err(Error::Config(format!(
                "t_grid must lie in [0, {}]",
                self.horizon
            )));
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("t_grid must be strictly increasing".into()));
        }
        match self.route {
            Route::Chaos => {
                let (eps, delta) = (self.eps()?, self.delta()?);
                if delta > eps {
                    return Err(Error::Config(format!(
                        "chaos route needs delta <= eps, got delta = {delta}, eps = {eps}"
                    )));
                }
            }
            Route::Atoms => {
                self.eps()?;
                if self.params.p > 3 {
                    return Err(Error::Config(format!(
                        "atoms route supports p <= 3, got p = {}",
                        self.params.p
                    )));
                }
                self.atom_count()?;
            }
            Route::Timedomain => {
                if self.params.p > 2 {
                    return Err(Error::Unsupported(format!(
                        "time-domain route supports p <= 2, got p = {}",
                        self.params.p
                    )));
                }
                self.delta()?;
                self.x_cut()?;
            }
            Route::FbmExact => {}
        }
        Ok(())
    }
}

fn run_replicates<F>(cfg: &SimConfig, draw: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&mut SimRng) -> Result<Vec<f64>> + Sync,
{
    (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|i| draw(&mut stream(cfg.seed, i)))
        .collect()
}

fn finish(
    cfg: &SimConfig,
    mut values: Vec<Vec<f64>>,
    sampler: Option<String>,
    warnings: Vec<String>,
) -> Result<PathEnsemble> {
    let mut meta = EnsembleMeta {
        config: Some(cfg.clone()),
        sampler,
        warnings,
        ..EnsembleMeta::default()
    };
    if cfg.normalize {
        let k = cfg
            .t_grid
            .iter()
            .position(|&t| t == 1.0)
            .unwrap_or(cfg.t_grid.len() - 1);
        let t_ref = cfg.t_grid[k];
        let col: Vec<f64> = values.iter().map(|r| r[k]).collect();
        let var = sample_variance(&col);
        if var > 0.0 && t_ref > 0.0 {
            let scale = (t_ref.powf(2.0 * cfg.params.hurst) / var).sqrt();
            values.iter_mut().flatten().for_each(|v| *v *= scale);
            meta.normalization_scale = Some(scale);
        }
    }
    PathEnsemble::new(cfg.t_grid.clone(), values, meta)
}

fn warn(warnings: &mut Vec<String>, msg: String) {
    log::warn!("{msg}");
    warnings.push(msg);
}

/// Number of left-endpoint grid points `jΔ` strictly below `t`.
fn points_below(t: f64, delta: f64) -> usize {
    (t / delta - 1e-9).ceil().max(0.0) as usize
}

/// Number of midpoints `(m + ½)Δ` strictly below `t`.
fn midpoints_below(t: f64, delta: f64) -> usize {
    (t / delta - 0.5 - 1e-9).ceil().max(0.0) as usize
}

// ---------------------------------------------------------------- chaos

/// `κ_ε` of the chaos route for the configured drift mode.
pub fn chaos_kappa(cfg: &SimConfig) -> Result<f64> {
    let eps = cfg.eps()?;
    let HermiteParams {
        beta, beta_p, p, ..
    } = cfg.params;
    let pf = f64::from(p);
    Ok(match cfg.drift_mode {
        DriftMode::Asymptotic => {
            (0.5 * pf * (ln_gamma(beta) + ln_gamma(2.0 - beta)) - ln_gamma(beta_p)).exp()
                * eps_over_e_pow(eps, 0.5 * pf * (beta - 1.0))
        }
        DriftMode::Exact => {
            let d = drift_d_eps(beta, eps)?;
            (0.5 * pf * (d.ln() + ln_gamma(2.0 - beta)) - ln_gamma(beta_p)).exp()
                * eps_over_e_pow(eps, beta_p - 1.0)
        }
    })
}

pub fn simulate_chaos(cfg: &SimConfig) -> Result<PathEnsemble> {
    cfg.validate()?;
    let (eps, delta) = (cfg.eps()?, cfg.delta()?);
    let mut warnings = Vec::new();
    if delta > eps / 4.0 {
        warn(&mut warnings, format!("grid step {delta} exceeds eps/4 = {}; the kink of the covariance is under-resolved", eps / 4.0));
    }
    let counts: Vec<usize> = cfg.t_grid.iter().map(|&t| points_below(t, delta)).collect();
    let n = counts.iter().copied().max().unwrap_or(0).max(2);
    let sampler = StationarySampler::new(&cov_grid_p_eps(cfg.params.beta, eps, delta, n)?)?;
    let scale = cfg.params.c_const * chaos_kappa(cfg)? * delta;
    let p = cfg.params.p;
    let values = run_replicates(cfg, |rng| {
        let g = sampler.sample(rng);
        let mut prefix = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &x in &g {
            acc += hermite_poly(p, x);
            prefix.push(acc);
        }
        Ok(counts.iter().map(|&c| scale * prefix[c]).collect())
    })?;
    finish(
        cfg,
        values,
        Some(sampler.method_name().to_string()),
        warnings,
    )
}

/// Exact variance of the discretized chaos path at `t`:
/// `(cκΔ)² p! Σ_{j,l<N} p_ε(|j−l|Δ)^p`.
pub fn chaos_expected_variance(cfg: &SimConfig, t: f64) -> Result<f64> {
    let (eps, delta) = (cfg.eps()?, cfg.delta()?);
    let n = points_below(t, delta);
    let p = cfg.params.p as i32;
    let mut sum = n as f64;
    for k in 1..n {
        sum += 2.0 * (n - k) as f64 * hitting_prob(cfg.params.beta, eps, k as f64 * delta)?.powi(p);
    }
    let scale = cfg.params.c_const * chaos_kappa(cfg)? * delta;
    Ok(scale * scale * ln_factorial(cfg.params.p).exp() * sum)
}

// ---------------------------------------------------------------- atoms

/// The atoms drawn for replicate `index`, exactly as the atoms route draws them.
pub fn atoms_for_replicate(cfg: &SimConfig, index: u64) -> Result<Vec<ShiftedAtom>> {
    cfg.validate()?;
    let mut rng = stream(cfg.seed, index);
    draw_atoms(cfg, &mut rng)
}

fn draw_atoms(cfg: &SimConfig, rng: &mut SimRng) -> Result<Vec<ShiftedAtom>> {
    let (eps, m) = (cfg.eps()?, cfg.atom_count()?);
    (0..m)
        .map(|_| make_atom(cfg.params.beta, eps, cfg.horizon, cfg.horizon, rng))
        .collect()
}

/// `out[k] += w · λ(S ∩ [0, times[k]])` for a canonical interval list `S`.
fn add_profile(intervals: &[(f64, f64)], times: &[f64], w: f64, out: &mut [f64]) {
    let mut idx = 0;
    let mut closed = 0.0;
    for (o, &t) in out.iter_mut().zip(times) {
        while idx < intervals.len() && intervals[idx].1 <= t {
            closed += intervals[idx].1 - intervals[idx].0;
            idx += 1;
        }
        let partial = match intervals.get(idx) {
            Some(&(l, _)) if l < t => t - l,
            _ => 0.0,
        };
        *o += w * (closed + partial);
    }
}

pub fn simulate_atoms(cfg: &SimConfig) -> Result<PathEnsemble> {
    cfg.validate()?;
    let eps = cfg.eps()?;
    let m = cfg.atom_count()?;
    let p = cfg.params.p;
    let t_max = cfg.t_max();
    let coef = cfg.params.c_const_t(cfg.horizon)?
        * (m as f64).powf(-0.5 * f64::from(p))
        * ln_factorial(p).exp()
        * local_time_prefactor(&cfg.params, eps);
    let times = &cfg.t_grid;
    let values = run_replicates(cfg, |rng| {
        let atoms = draw_atoms(cfg, rng)?;
        let g: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let live: Vec<(f64, &[(f64, f64)])> = atoms
            .iter()
            .zip(&g)
            .filter(|(a, _)| a.shift < t_max)
            .map(|(a, &w)| (w, a.shifted_set.intervals()))
            .filter(|(_, s)| !s.is_empty())
            .collect();
        let mut out = vec![0.0; times.len()];
        let mut pair = Vec::new();
        let mut triple = Vec::new();
        match p {
            1 => {
                for &(w, s) in &live {
                    add_profile(s, times, w, &mut out);
                }
            }
            2 => {
                for (i, &(wi, si)) in live.iter().enumerate() {
                    for &(wj, sj) in &live[i + 1..] {
                        pair.clear();
                        intersect_into(si, sj, &mut pair);
                        if pair.first().is_some_and(|&(l, _)| l < t_max) {
                            add_profile(&pair, times, wi * wj, &mut out);
                        }
                    }
                }
            }
            _ => {
                for (i, &(wi, si)) in live.iter().enumerate() {
                    for (j, &(wj, sj)) in live.iter().enumerate().skip(i + 1) {
                        pair.clear();
                        intersect_into(si, sj, &mut pair);
                        if !pair.first().is_some_and(|&(l, _)| l < t_max) {
                            continue;
                        }
                        for &(wk, sk) in &live[j + 1..] {
                            triple.clear();
                            intersect_into(&pair, sk, &mut triple);
                            if triple.first().is_some_and(|&(l, _)| l < t_max) {
                                add_profile(&triple, times, wi * wj * wk, &mut out);
                            }
                        }
                    }
                }
            }
        }
        out.iter_mut().for_each(|v| *v *= coef);
        Ok(out)
    })?;
    finish(cfg, values, None, Vec::new())
}

// ---------------------------------------------------------------- time domain

const GL8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_3),
];

/// Cells of the white-noise mesh: width `Δ` on `[−min(X, 2T), t_max]`, then
/// widths growing geometrically out to `−X`.
pub fn timedomain_cells(delta: f64, x_cut: f64, horizon: f64, t_max: f64) -> Vec<(f64, f64)> {
    let right = points_below(t_max, delta).max(1);
    let uniform_reach = x_cut.min(2.0 * horizon);
    let left = (uniform_reach / delta - 1e-9).ceil() as i64;
    let mut cells: Vec<(f64, f64)> = (-left..right as i64)
        .map(|j| ((j as f64 * delta).max(-x_cut), (j + 1) as f64 * delta))
        .collect();
    let mut edge = -(left as f64) * delta;
    let mut width = delta;
    let mut far = Vec::new();
    while edge > -x_cut {
        width *= MESH_GROWTH;
        let next = (edge - width).max(-x_cut);
        far.push((next, edge));
        edge = next;
    }
    far.reverse();
    far.append(&mut cells);
    far
}

/// Cell average of `h_t(x) = (2/β)[(t−x)_+^{β/2} − (−x)_+^{β/2}]`.
fn h_cell_average(beta: f64, t: f64, (x0, x1): (f64, f64)) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let g = beta / 2.0;
    if x1 <= -2.0 * t {
        let (c, half) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
        let h = |x: f64| (2.0 / beta) * (-x).powf(g) * (g * (t / -x).ln_1p()).exp_m1();
        return GL8
            .iter()
            .map(|&(u, w)| w * (h(c - half * u) + h(c + half * u)))
            .sum::<f64>()
            / 2.0;
    }
    let anti = |s: f64| {
        let a = (s - x0).max(0.0).powf(g + 1.0);
        let b = (s - x1).max(0.0).powf(g + 1.0);
        (a - b) / (g + 1.0)
    };
    (2.0 / beta) * (anti(t) - anti(0.0)) / (x1 - x0)
}

/// Cell average of `(s − x)_+^{β/2−1}`.
fn k_cell_average(beta: f64, s: f64, (x0, x1): (f64, f64)) -> f64 {
    let g = beta / 2.0;
    let w = x1 - x0;
    if s <= x0 {
        0.0
    } else if s < x1 {
        (s - x0).powf(g) / (g * w)
    } else {
        let d = s - x1;
        if d == 0.0 {
            w.powf(g) / (g * w)
        } else {
            d.powf(g) * (g * (w / d).ln_1p()).exp_m1() / (g * w)
        }
    }
}

/// Upper bound on the variance lost by cutting the noise at `−X`, at time `t`.
pub fn timedomain_truncation_bound(params: &HermiteParams, x_cut: f64, t: f64) -> Result<f64> {
    let beta = params.beta;
    let p = params.p;
    let (a_prev, h_prev) = if p == 1 {
        (1.0, 1.0)
    } else {
        let lower = HermiteParams::new(beta, p - 1)?;
        (lower.a_const, lower.hurst)
    };
    let pf = f64::from(p);
    Ok(
        pf * pf * (params.a_const / a_prev).powi(2) * x_cut.powf(beta - 1.0) / (1.0 - beta)
            * t.powf(2.0 * h_prev),
    )
}

struct TimeDomainPlan {
    cells: Vec<(f64, f64)>,
    sqrt_w: Vec<f64>,
    /// p = 1: `rows[k]` holds the cell averages of `h_{t_k}`.
    /// p = 2: `rows[m]` holds the cell averages of the kernel at `s_m`.
    rows: Vec<Vec<f64>>,
    counts: Vec<usize>,
}

fn timedomain_plan(cfg: &SimConfig) -> Result<TimeDomainPlan> {
    let (delta, x_cut) = (cfg.delta()?, cfg.x_cut()?);
    let beta = cfg.params.beta;
    let cells = timedomain_cells(delta, x_cut, cfg.horizon, cfg.t_max());
    let sqrt_w = cells.iter().map(|&(a, b)| (b - a).sqrt()).collect();
    let (rows, counts) = if cfg.params.p == 1 {
        let rows = cfg
            .t_grid
            .iter()
            .map(|&t| cells.iter().map(|&c| h_cell_average(beta, t, c)).collect())
            .collect();
        (rows, Vec::new())
    } else {
        let counts: Vec<usize> = cfg
            .t_grid
            .iter()
            .map(|&t| midpoints_below(t, delta))
            .collect();
        let s_count = counts.iter().copied().max().unwrap_or(0);
        let rows = (0..s_count)
            .map(|m| {
                let s = (m as f64 + 0.5) * delta;
                cells.iter().map(|&c| k_cell_average(beta, s, c)).collect()
            })
            .collect();
        (rows, counts)
    };
    Ok(TimeDomainPlan {
        cells,
        sqrt_w,
        rows,
        counts,
    })
}

pub fn simulate_timedomain(cfg: &SimConfig) -> Result<PathEnsemble> {
    cfg.validate()?;
    let plan = timedomain_plan(cfg)?;
    let mut warnings = Vec::new();
    let t_max = cfg.t_max();
    let bound = timedomain_truncation_bound(&cfg.params, cfg.x_cut()?, t_max)?;
    if t_max > 0.0 && bound > 0.01 * t_max.powf(2.0 * cfg.params.hurst) {
        warn(
            &mut warnings,
            format!(
                "left truncation X = {} may lose up to {bound:.3e} of the variance at t = {t_max}",
                cfg.x_cut()?
            ),
        );
    }
    let a = cfg.params.a_const;
    let delta = cfg.delta()?;
    let values = run_replicates(cfg, |rng| {
        let xi: Vec<f64> = plan
            .sqrt_w
            .iter()
            .map(|&s| s * rng.sample::<f64, _>(StandardNormal))
            .collect();
        if cfg.params.p == 1 {
            return Ok(plan
                .rows
                .iter()
                .map(|row| a * row.iter().zip(&xi).map(|(h, x)| h * x).sum::<f64>())
                .collect());
        }
        let mut prefix = Vec::with_capacity(plan.rows.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for row in &plan.rows {
            let (mut y, mut d) = (0.0, 0.0);
            for (k, x) in row.iter().zip(&xi) {
                let v = k * x;
                y += v;
                d += v * v;
            }
            acc += y * y - d;
            prefix.push(acc);
        }
        Ok(plan.counts.iter().map(|&c| a * delta * prefix[c]).collect())
    })?;
    finish(cfg, values, None, warnings)
}

/// Exact variance of the discretized time-domain path at every grid time.
#[allow(clippy::needless_range_loop)]
pub fn timedomain_expected_variance(cfg: &SimConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let plan = timedomain_plan(cfg)?;
    let a = cfg.params.a_const;
    let w: Vec<f64> = plan.cells.iter().map(|&(x0, x1)| x1 - x0).collect();
    if cfg.params.p == 1 {
        return Ok(plan
            .rows
            .iter()
            .map(|row| a * a * row.iter().zip(&w).map(|(h, w)| w * h * h).sum::<f64>())
            .collect());
    }
    let delta = cfg.delta()?;
    let s = plan.rows.len();
    // gram[m][m'] = Σ_i w_i k_i(s_m) k_i(s_m'), filled for m' ≤ m.
    let mut gram = vec![vec![0.0; s]; s];
    for m in 0..s {
        for m2 in 0..=m {
            gram[m][m2] = plan.rows[m]
                .iter()
                .zip(&plan.rows[m2])
                .zip(&w)
                .map(|((x, y), w)| w * x * y)
                .sum();
        }
    }
    Ok(plan
        .counts
        .iter()
        .map(|&c| {
            let mut frob = 0.0;
            for m in 0..c {
                for m2 in 0..c {
                    let g = if m2 <= m { gram[m][m2] } else { gram[m2][m] };
                    frob += g * g;
                }
            }
            let diag: f64 = (0..plan.cells.len())
                .map(|i| {
                    let kii: f64 = plan.rows[..c].iter().map(|r| r[i] * r[i]).sum();
                    w[i] * w[i] * kii * kii
                })
                .sum();
            2.0 * a * a * delta * delta * (frob - diag)
        })
        .collect())
}

// ---------------------------------------------------------------- fBm

pub fn simulate_fbm(cfg: &SimConfig) -> Result<PathEnsemble> {
    cfg.validate()?;
    let has_zero = cfg.t_grid[0] == 0.0;
    let mut grid = Vec::with_capacity(cfg.t_grid.len() + 1);
    if !has_zero {
        grid.push(0.0);
    }
    grid.extend_from_slice(&cfg.t_grid);
    let sampler = FbmSampler::new(cfg.params.hurst, &grid)?;
    let values = run_replicates(cfg, |rng| {
        let mut path = sampler.sample(rng);
        if !has_zero {
            path.remove(0);
        }
        Ok(path)
    })?;
    finish(cfg, values, Some("cholesky".into()), Vec::new())
}

/// Run the configured route. Identical configurations give bit-identical
/// ensembles whatever the size of the worker pool.
pub fn simulate(cfg: &SimConfig) -> Result<PathEnsemble> {
    match cfg.route {
        Route::Chaos => simulate_chaos(cfg),
        Route::Atoms => simulate_atoms(cfg),
        Route::Timedomain => simulate_timedomain(cfg),
        Route::FbmExact => simulate_fbm(cfg),
    }
}
