//! Local time of intersected shifted regenerative sets.
//!
//! For `p` independent atoms the intersection of their shifted uncovered sets
//! is (approximately) a `β_p`-stable regenerative set started at the largest
//! shift. Its Lebesgue measure, scaled by `(ε/e)^{β_p−1}/Γ(β_p)`, approximates
//! the local time. The moment oracles give the `ε → 0` moments in closed form
//! and by direct quadrature of the simplex integral.

use serde::Serialize;

use crate::covering::ShiftedAtom;
use crate::error::{Error, Result};
use crate::interval_set::{intersect_into, measure_profile_of, IntervalSet};
use crate::quadrature::{integrate_gaps, Endpoints};
use crate::specfun::{eps_over_e_pow, ln_factorial, ln_gamma, HermiteParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalTimeConfig {
    pub params: HermiteParams,
    pub eps: f64,
    pub t_grid: Vec<f64>,
    pub horizon: f64,
}

impl LocalTimeConfig {
    pub fn new(params: HermiteParams, eps: f64, t_grid: Vec<f64>, horizon: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
        }
        if !(horizon > 0.0) {
            return Err(Error::Parameter(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if t_grid.iter().any(|&t| !(0.0..=horizon).contains(&t)) {
            return Err(Error::Usage(format!("t_grid must lie in [0, {horizon}]")));
        }
        if t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Usage("t_grid must be strictly increasing".into()));
        }
        Ok(Self {
            params,
            eps,
            t_grid,
            horizon,
        })
    }

    /// `(ε/e)^{β_p−1} / Γ(β_p)`.
    pub fn prefactor(&self) -> f64 {
        local_time_prefactor(&self.params, self.eps)
    }
}

pub(crate) fn local_time_prefactor(params: &HermiteParams, eps: f64) -> f64 {
    eps_over_e_pow(eps, params.beta_p - 1.0) * (-ln_gamma(params.beta_p)).exp()
}

fn intersection(atoms: &[ShiftedAtom]) -> Result<Vec<(f64, f64)>> {
    let w = atoms[0].shifted_set.window_end();
    if atoms.iter().any(|a| a.shifted_set.window_end() != w) {
        return Err(Error::Usage("atoms live on different windows".into()));
    }
    let mut acc = atoms[0].shifted_set.intervals().to_vec();
    let mut buf = Vec::new();
    for a in &atoms[1..] {
        buf.clear();
        intersect_into(&acc, a.shifted_set.intervals(), &mut buf);
        std::mem::swap(&mut acc, &mut buf);
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}

fn check_arity(atoms: &[ShiftedAtom], cfg: &LocalTimeConfig) -> Result<()> {
    if atoms.len() != cfg.params.p as usize {
        return Err(Error::Usage(format!(
            "local time of order p = {} needs exactly {} atoms, got {}",
            cfg.params.p,
            cfg.params.p,
            atoms.len()
        )));
    }
    Ok(())
}

pub fn approx_local_time(atoms: &[ShiftedAtom], cfg: &LocalTimeConfig, t: f64) -> Result<f64> {
    check_arity(atoms, cfg)?;
    if !(0.0..=cfg.horizon).contains(&t) {
        return Err(Error::Usage(format!(
            "t = {t} outside [0, {}]",
            cfg.horizon
        )));
    }
    let set = intersection(atoms)?;
    Ok(cfg.prefactor() * measure_profile_of(&set, &[t])[0])
}

/// [`approx_local_time`] at every point of `cfg.t_grid`, from one sweep.
pub fn approx_local_time_profile(atoms: &[ShiftedAtom], cfg: &LocalTimeConfig) -> Result<Vec<f64>> {
    check_arity(atoms, cfg)?;
    let set = intersection(atoms)?;
    let k = cfg.prefactor();
    Ok(measure_profile_of(&set, &cfg.t_grid)
        .into_iter()
        .map(|m| k * m)
        .collect())
}

/// Kingman sausage estimates `λ((F ∩ [0,t]) + [−1/(2n), 1/(2n)]) / l(n)` with
/// `l(n) = n^{β−1}/Γ(2−β)`, one per level `n`.
pub fn kingman_local_time(
    set: &IntervalSet,
    beta_loc: f64,
    t: f64,
    levels: &[u64],
) -> Result<Vec<f64>> {
    if !(beta_loc > 0.0 && beta_loc < 1.0) {
        return Err(Error::Parameter(format!(
            "beta = {beta_loc} outside (0, 1)"
        )));
    }
    if !(t >= 0.0) || t > set.window_end() {
        return Err(Error::Usage(format!(
            "t = {t} outside [0, {}]",
            set.window_end()
        )));
    }
    let part = set.truncate(t);
    let ln_g = ln_gamma(2.0 - beta_loc);
    levels
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::Usage("sausage level n must be at least 1".into()));
            }
            let nf = n as f64;
            let scale = ((1.0 - beta_loc) * nf.ln() + ln_g).exp();
            Ok(part.sausage_measure(1.0 / nf) * scale)
        })
        .collect()
}

/// `E[L_t^r]` of the limiting local time:
/// `r! Γ(2−β)^p Γ(β)^p t^{(r−1)β_p+1} / (Γ((r−1)β_p+2) Γ(β_p))`.
pub fn moment_oracle_closed(params: &HermiteParams, r: u32, t: f64) -> f64 {
    if r == 0 {
        return 1.0;
    }
    let (beta, bp, pf) = (params.beta, params.beta_p, f64::from(params.p));
    let expo = f64::from(r - 1) * bp + 1.0;
    let ln = ln_factorial(r) + pf * (ln_gamma(2.0 - beta) + ln_gamma(beta))
        - ln_gamma(expo + 1.0)
        - ln_gamma(bp);
    (ln + expo * t.ln()).exp()
}

const NUMERIC_TOL: f64 = 1e-11;

/// The same moments by nested quadrature of the simplex integral, with the
/// shifts averaged against `(1−β)v^{−β}` on `[0, 1]`.
///
/// Cost grows like `(15·depth)^{r}`; `r ≤ 3` is supported.
pub fn moment_oracle_numeric(params: &HermiteParams, r: u32, t: f64) -> Result<f64> {
    if r > 3 {
        return Err(Error::Unsupported(format!(
            "numeric moment oracle supports r <= 3, got r = {r}"
        )));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    if r == 0 {
        return Ok(1.0);
    }
    let (beta, bp) = (params.beta, params.beta_p);
    let p = params.p as i32;

    // Density of the first point of the intersection: ∫ (1−β) v^{−β} (x−v)^{β−1} dv.
    let first_hit = |x: f64| -> f64 {
        if x <= 1.0 {
            integrate_gaps(
                |_, v, gap| (1.0 - beta) * v.powf(-beta) * gap.powf(beta - 1.0),
                0.0,
                x,
                Endpoints::new(1.0 - beta, beta),
                NUMERIC_TOL,
            )
        } else {
            integrate_gaps(
                |_, v, gap| (1.0 - beta) * v.powf(-beta) * (gap + (x - 1.0)).powf(beta - 1.0),
                0.0,
                1.0,
                Endpoints::new(1.0 - beta, 1.0),
                NUMERIC_TOL,
            )
        }
    };

    // tail(k, d) = ∫_0^d (d−u)^{β_p−1} tail(k−1, u) du, tail(0, ·) = 1;
    // `d` is the distance to the end of the window.
    fn tail(k: u32, d: f64, bp: f64) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let left = f64::from(k - 1) * bp + 1.0;
        integrate_gaps(
            |_, u, gap| gap.powf(bp - 1.0) * tail(k - 1, u, bp),
            0.0,
            d,
            Endpoints::new(left, bp),
            NUMERIC_TOL,
        )
    }

    let outer = |x: f64, right_gap: f64| first_hit(x).powi(p) * tail(r - 1, right_gap, bp);
    let right = f64::from(r - 1) * bp + 1.0;
    let body = if t <= 1.0 {
        integrate_gaps(
            |x, _, g| outer(x, g),
            0.0,
            t,
            Endpoints::new(1.0, right),
            NUMERIC_TOL,
        )
    } else {
        integrate_gaps(
            |x, _, _| outer(x, t - x),
            0.0,
            1.0,
            Endpoints::REGULAR,
            NUMERIC_TOL,
        ) + integrate_gaps(
            |x, _, g| outer(x, g),
            1.0,
            t,
            Endpoints::new(1.0, right),
            NUMERIC_TOL,
        )
    };
    Ok((ln_factorial(r) - f64::from(r) * ln_gamma(bp)).exp() * body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::make_atom;
    use crate::rng::stream;
    use crate::specfun::{derive_params, gamma};

    fn cfg(beta: f64, p: u32, eps: f64) -> LocalTimeConfig {
        let params = derive_params(beta, p).unwrap();
        LocalTimeConfig::new(params, eps, vec![0.0, 0.25, 0.5, 0.75, 1.0], 1.0).unwrap()
    }

    #[test]
    fn wrong_arity_is_usage_error() {
        let c = cfg(0.8, 2, 0.01);
        let mut rng = stream(1, 0);
        let a = make_atom(0.8, 0.01, 1.0, 1.0, &mut rng).unwrap();
        assert!(matches!(
            approx_local_time(&[a], &c, 0.5),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn zero_before_largest_shift_and_monotone() {
        let c = cfg(0.8, 2, 0.01);
        let mut rng = stream(2, 0);
        for _ in 0..300 {
            let atoms: Vec<_> = (0..2)
                .map(|_| make_atom(0.8, 0.01, 1.0, 1.0, &mut rng).unwrap())
                .collect();
            let vmax = atoms.iter().map(|a| a.shift).fold(0.0, f64::max);
            if vmax > 0.0 {
                assert_eq!(approx_local_time(&atoms, &c, 0.999 * vmax).unwrap(), 0.0);
            }
            assert_eq!(approx_local_time(&atoms, &c, 0.0).unwrap(), 0.0);
            let prof = approx_local_time_profile(&atoms, &c).unwrap();
            assert!(prof.windows(2).all(|w| w[0] <= w[1]));
            for (&t, &l) in c.t_grid.iter().zip(&prof) {
                assert_eq!(approx_local_time(&atoms, &c, t).unwrap(), l);
            }
        }
    }

    #[test]
    fn kingman_examples() {
        let beta: f64 = 0.4;
        let full = IntervalSet::full(1.0).unwrap();
        let point = IntervalSet::new(1.0, [(0.3, 0.3)]).unwrap();
        for n in [10u64, 100, 1000] {
            let nf = n as f64;
            let g = gamma(2.0 - beta).unwrap();
            let f = kingman_local_time(&full, beta, 0.7, &[n]).unwrap()[0];
            assert!((f - g * nf.powf(1.0 - beta) * (0.7 + 1.0 / nf)).abs() < 1e-12 * f);
            let s = kingman_local_time(&point, beta, 0.7, &[n]).unwrap()[0];
            assert!((s - g * nf.powf(-beta)).abs() < 1e-12 * s);
        }
    }

    #[test]
    fn closed_moment_examples() {
        let p = derive_params(0.6, 1).unwrap();
        assert_eq!(moment_oracle_closed(&p, 0, 0.7), 1.0);
        let want = gamma(1.4).unwrap() * 0.7;
        assert!((moment_oracle_closed(&p, 1, 0.7) - want).abs() < 1e-14);
        for (beta, pp) in [(0.6, 1), (0.8, 2), (0.9, 3)] {
            let params = derive_params(beta, pp).unwrap();
            let fact: f64 = (1..=pp).map(f64::from).product();
            let v = fact * moment_oracle_closed(&params, 2, 1.0) * params.c_const.powi(2);
            assert!((v - 1.0).abs() < 1e-12);
            for r in 1..4 {
                let ratio =
                    moment_oracle_closed(&params, r, 0.3) / moment_oracle_closed(&params, r, 1.0);
                let expo = f64::from(r - 1) * params.beta_p + 1.0;
                assert!((ratio - 0.3f64.powf(expo)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn numeric_oracle_matches_closed_form() {
        for (beta, p, r, t) in [
            (0.5, 1, 1, 1.0),
            (0.3, 1, 2, 0.8),
            (0.8, 2, 2, 1.0),
            (0.7, 1, 3, 1.0),
        ] {
            let params = derive_params(beta, p).unwrap();
            let num = moment_oracle_numeric(&params, r, t).unwrap();
            let closed = moment_oracle_closed(&params, r, t);
            assert!(
                (num - closed).abs() < 1e-6,
                "{beta} {p} {r}: {num} vs {closed}"
            );
        }
        let params = derive_params(0.5, 1).unwrap();
        let v = moment_oracle_numeric(&params, 1, 1.0).unwrap();
        assert!((v - gamma(1.5).unwrap()).abs() < 1e-6);
        let half = moment_oracle_numeric(&params, 2, 0.5).unwrap()
            / moment_oracle_numeric(&params, 2, 1.0).unwrap();
        assert!((half - 0.5f64.powf(params.beta_p + 1.0)).abs() < 1e-6);
        assert!(matches!(
            moment_oracle_numeric(&params, 4, 1.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn mean_local_time_is_near_closed_form() {
        let c = cfg(0.5, 1, 1e-3);
        let mut rng = stream(3, 0);
        let n = 50_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| {
                let a = make_atom(0.5, 1e-3, 1.0, 1.0, &mut rng).unwrap();
                approx_local_time(&[a], &c, 1.0).unwrap()
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        let target = gamma(1.5).unwrap();
        assert!(
            (mean - target).abs() <= 3.0 * se + 0.1 * target,
            "{mean} vs {target}"
        );
    }
}
