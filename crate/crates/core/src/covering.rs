//! Poisson random interval covering and the closed forms attached to it.
//!
//! Points `(y, z)` of a Poisson process with intensity `(1−β) dy z^{−2} dz`,
//! restricted to `z ≥ ε`, define open intervals `(y, y + z)`. The part of
//! `[0, W]` left uncovered is a regenerative set whose law converges to the
//! β-stable one as `ε → 0`.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval_set::IntervalSet;
use crate::rng::open_unit;
use crate::specfun::{eps_over_e_pow, gamma, reg_lower_inc_gamma};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringSample {
    pub eps: f64,
    pub window_end: f64,
    /// Poisson points `(y, z)`: left endpoint and length of each covering interval.
    pub points: Vec<(f64, f64)>,
    pub uncovered: IntervalSet,
}

/// A covering sample together with an independent shift `v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftedAtom {
    pub set: CoveringSample,
    pub shift: f64,
    pub shifted_set: IntervalSet,
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("beta = {beta} outside (0, 1)")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

pub fn sample_covering<R: Rng + ?Sized>(
    beta: f64,
    eps: f64,
    window_end: f64,
    rng: &mut R,
) -> Result<CoveringSample> {
    check_beta(beta)?;
    check_positive("eps", eps)?;
    check_positive("window end", window_end)?;
    let mean = (1.0 - beta) * window_end / eps;
    let count = Poisson::new(mean)
        .map_err(|e| Error::Parameter(format!("Poisson mean {mean}: {e}")))?
        .sample(rng) as usize;
    let points: Vec<(f64, f64)> = (0..count)
        .map(|_| {
            let y = rng.random::<f64>() * window_end;
            let z = eps / open_unit(rng);
            (y, z)
        })
        .collect();
    let cover: Vec<(f64, f64)> = points.iter().map(|&(y, z)| (y, y + z)).collect();
    let uncovered = IntervalSet::complement_of_open_cover(window_end, &cover)?;
    debug_assert!(uncovered.contains(0.0));
    Ok(CoveringSample {
        eps,
        window_end,
        points,
        uncovered,
    })
}

/// `P(x ∈ R_ε)`.
pub fn hitting_prob(beta: f64, eps: f64, x: f64) -> Result<f64> {
    check_beta(beta)?;
    check_positive("eps", eps)?;
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("x must be nonnegative, got {x}")));
    }
    Ok(hitting_prob_unchecked(beta, eps, x))
}

pub(crate) fn hitting_prob_unchecked(beta: f64, eps: f64, x: f64) -> f64 {
    if x <= eps {
        ((beta - 1.0) * x / eps).exp()
    } else {
        eps_over_e_pow(eps, 1.0 - beta) * x.powf(beta - 1.0)
    }
}

/// Renewal density of the covering subordinator; `eps = 0` gives the stable limit.
pub fn f_eps(beta: f64, eps: f64, x: f64) -> f64 {
    if !(x >= 0.0) {
        return 0.0;
    }
    if eps > 0.0 && x <= eps {
        ((x / eps - 1.0).exp() * eps).powf(beta - 1.0)
    } else {
        x.powf(beta - 1.0)
    }
}

/// `d_ε = ∫_0^∞ e^{−x} p_ε(x) dx`, in closed form.
pub fn drift_d_eps(beta: f64, eps: f64) -> Result<f64> {
    check_beta(beta)?;
    check_positive("eps", eps)?;
    let k = 1.0 + (1.0 - beta) / eps;
    let near = -(-k * eps).exp_m1() / k;
    let far =
        eps_over_e_pow(eps, 1.0 - beta) * gamma(beta)? * (1.0 - reg_lower_inc_gamma(beta, eps)?);
    Ok(near + far)
}

/// Inverse CDF of the shift law `P(V ≤ v) = (v/T)^{1−β}` on `[0, T]`.
pub fn shift_from_uniform(beta: f64, horizon: f64, u: f64) -> f64 {
    horizon * u.powf(1.0 / (1.0 - beta))
}

pub fn sample_shift_v<R: Rng + ?Sized>(beta: f64, horizon: f64, rng: &mut R) -> Result<f64> {
    check_beta(beta)?;
    check_positive("horizon", horizon)?;
    Ok(shift_from_uniform(beta, horizon, rng.random::<f64>()))
}

pub fn make_atom<R: Rng + ?Sized>(
    beta: f64,
    eps: f64,
    horizon: f64,
    window_end: f64,
    rng: &mut R,
) -> Result<ShiftedAtom> {
    if window_end < horizon {
        return Err(Error::Usage(format!(
            "window end {window_end} is shorter than the horizon {horizon}"
        )));
    }
    let set = sample_covering(beta, eps, window_end, rng)?;
    let shift = sample_shift_v(beta, horizon, rng)?;
    let shifted_set = set.uncovered.shift_clip(shift)?;
    Ok(ShiftedAtom {
        set,
        shift,
        shifted_set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Endpoints};
    use crate::rng::stream;
    use std::f64::consts::E;

    fn binomial_ok(hits: usize, n: usize, p: f64, k: f64) -> bool {
        let freq = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        (freq - p).abs() <= k * se + 1e-12
    }

    #[test]
    fn mean_point_count_matches_intensity() {
        let mut rng = stream(11, 0);
        let n = 100_000;
        let total: usize = (0..n)
            .map(|_| {
                sample_covering(0.5, 0.1, 1.0, &mut rng)
                    .unwrap()
                    .points
                    .len()
            })
            .sum();
        let mean = total as f64 / n as f64;
        let se = (5.0f64 / n as f64).sqrt();
        assert!((mean - 5.0).abs() <= 3.0 * se, "mean {mean}");
    }

    #[test]
    fn sample_invariants() {
        let mut rng = stream(12, 0);
        for _ in 0..2000 {
            let s = sample_covering(0.4, 0.05, 2.0, &mut rng).unwrap();
            assert!(s.uncovered.contains(0.0));
            assert!(s
                .points
                .iter()
                .all(|&(y, z)| z >= 0.05 && (0.0..=2.0).contains(&y)));
            let cover: Vec<_> = s.points.iter().map(|&(y, z)| (y, y + z)).collect();
            assert_eq!(
                s.uncovered,
                IntervalSet::complement_of_open_cover(2.0, &cover).unwrap()
            );
        }
    }

    #[test]
    fn hitting_frequency_at_fixed_point() {
        let mut rng = stream(13, 0);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| {
                sample_covering(0.5, 0.1, 0.2, &mut rng)
                    .unwrap()
                    .uncovered
                    .contains(0.05)
            })
            .count();
        assert!(binomial_ok(hits, n, (-0.25f64).exp(), 3.0));
    }

    #[test]
    fn hitting_frequency_grid() {
        let xs: Vec<f64> = (0..20).map(|i| 0.01 + 2.99 * i as f64 / 19.0).collect();
        let n = 20_000;
        let mut good = 0;
        let mut total = 0;
        for (k, &(beta, eps)) in [(0.3, 0.1), (0.7, 0.05)].iter().enumerate() {
            let mut counts = vec![0usize; xs.len()];
            let mut rng = stream(14, k as u64);
            for _ in 0..n {
                let s = sample_covering(beta, eps, 3.0, &mut rng).unwrap();
                for (c, &x) in counts.iter_mut().zip(&xs) {
                    *c += usize::from(s.uncovered.contains(x));
                }
            }
            for (&c, &x) in counts.iter().zip(&xs) {
                total += 1;
                good += usize::from(binomial_ok(c, n, hitting_prob(beta, eps, x).unwrap(), 3.0));
            }
        }
        assert!(good as f64 >= 0.95 * total as f64, "{good}/{total}");
    }

    #[test]
    fn hitting_prob_examples() {
        assert_eq!(hitting_prob(0.3, 0.2, 0.0).unwrap(), 1.0);
        for &(beta, eps) in &[(0.3f64, 0.05f64), (0.5, 0.1), (0.9, 2.0)] {
            let left = (beta - 1.0).exp();
            let at = hitting_prob(beta, eps, eps).unwrap();
            let right = eps_over_e_pow(eps, 1.0 - beta) * eps.powf(beta - 1.0);
            assert!((at - left).abs() < 1e-14 && (right - left).abs() < 1e-14);
        }
        let v = hitting_prob(0.5, E, 4.0 * E).unwrap();
        assert!((v - (4.0 * E).powf(-0.5)).abs() < 1e-14);
        assert!((v - 0.3033).abs() < 1e-4);
        assert!(matches!(
            hitting_prob(0.5, 0.1, -1e-3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn hitting_prob_is_nonincreasing() {
        let mut prev = 1.0;
        for i in 0..=30_000 {
            let x = i as f64 * 1e-4;
            let v = hitting_prob(0.6, 0.07, x).unwrap();
            assert!(v <= prev && v > 0.0);
            prev = v;
        }
    }

    #[test]
    fn f_eps_examples_and_identity() {
        assert_eq!(f_eps(0.5, 0.1, -0.3), 0.0);
        assert_eq!(f_eps(0.5, 0.1, 0.4), 0.4f64.powf(-0.5));
        assert_eq!(f_eps(0.5, 0.0, 0.4), 0.4f64.powf(-0.5));
        let (a, b, c) = (
            f_eps(0.5, 0.1, 0.05),
            f_eps(0.5, 0.01, 0.05),
            0.05f64.powf(-0.5),
        );
        assert!(a <= b && b <= c);
        for &(beta, eps) in &[(0.2, 0.01), (0.5, 0.1), (0.85, 1.3)] {
            for i in 0..200 {
                let x = i as f64 * eps / 50.0;
                let want = eps_over_e_pow(eps, beta - 1.0) * hitting_prob(beta, eps, x).unwrap();
                let got = f_eps(beta, eps, x);
                assert!((got - want).abs() <= 1e-13 * want, "{beta} {eps} {x}");
            }
        }
    }

    fn drift_by_quadrature(beta: f64, eps: f64) -> f64 {
        let f = |x: f64| (-x).exp() * hitting_prob(beta, eps, x).unwrap();
        let near = integrate(f, 0.0, eps, Endpoints::REGULAR, 1e-15);
        let mid = integrate(f, eps, 1.0, Endpoints::REGULAR, 1e-15);
        let far = integrate(f, 1.0, 60.0, Endpoints::REGULAR, 1e-15);
        near + mid + far
    }

    #[test]
    fn drift_matches_quadrature() {
        for &(beta, eps) in &[(0.5, 0.01), (0.3, 0.1), (0.8, 1e-3), (0.5, 1.0)] {
            let closed = drift_d_eps(beta, eps).unwrap();
            let quad = drift_by_quadrature(beta, eps);
            assert!(
                (closed - quad).abs() <= 1e-9 * quad,
                "{beta} {eps}: {closed} vs {quad}"
            );
        }
    }

    #[test]
    fn drift_asymptotic_ratio() {
        for &beta in &[0.3, 0.5, 0.8] {
            for &eps in &[1e-1, 1e-2, 1e-3] {
                let ratio = drift_d_eps(beta, eps).unwrap()
                    / (gamma(beta).unwrap() * eps_over_e_pow(eps, 1.0 - beta));
                assert!(
                    (ratio - 1.0).abs() <= 2.0 * eps.powf(beta),
                    "{beta} {eps} {ratio}"
                );
            }
        }
    }

    #[test]
    fn drift_at_unit_eps_is_below_one() {
        let k = 1.5;
        let near = -(-k * 1.0f64).exp_m1() / k;
        let d = drift_d_eps(0.5, 1.0).unwrap();
        assert!(near > 0.0 && d > near && d < 1.0);
    }

    #[test]
    fn shift_inverse_cdf() {
        assert_eq!(shift_from_uniform(0.3, 2.0, 1.0), 2.0);
        assert_eq!(shift_from_uniform(0.3, 2.0, 0.0), 0.0);
        assert!((shift_from_uniform(0.5, 1.0, 0.5) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn shift_law_passes_ks() {
        let (beta, horizon) = (0.4, 2.0);
        let mut rng = stream(15, 0);
        let n = 100_000;
        let mut v: Vec<f64> = (0..n)
            .map(|_| sample_shift_v(beta, horizon, &mut rng).unwrap())
            .collect();
        v.sort_by(f64::total_cmp);
        let cdf = |x: f64| (x / horizon).powf(1.0 - beta);
        let d = v
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - f)
            })
            .fold(0.0, f64::max);
        assert!(d < 1.6276 / (n as f64).sqrt(), "D = {d}");
    }

    #[test]
    fn atom_requires_window_covering_horizon() {
        let mut rng = stream(16, 0);
        assert!(matches!(
            make_atom(0.5, 0.1, 2.0, 1.0, &mut rng),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn atom_shift_semantics() {
        let mut rng = stream(17, 0);
        for _ in 0..500 {
            let a = make_atom(0.5, 0.05, 1.0, 1.0, &mut rng).unwrap();
            assert_eq!(a.shifted_set, a.set.uncovered.shift_clip(a.shift).unwrap());
            let t = 0.5 * a.shift;
            assert_eq!(a.shifted_set.measure_on(0.0, t).unwrap(), 0.0);
        }
        let s = sample_covering(0.5, 0.05, 1.0, &mut rng).unwrap();
        assert_eq!(s.uncovered.shift_clip(0.0).unwrap(), s.uncovered);
    }

    #[test]
    fn atom_membership_matches_shifted_hitting_probability() {
        let (beta, eps, horizon, x): (f64, f64, f64, f64) = (0.5, 0.05, 1.0, 0.3);
        let density = |v: f64| (1.0 - beta) * horizon.powf(beta - 1.0) * v.powf(-beta);
        let f = |v: f64| hitting_prob(beta, eps, x - v).unwrap() * density(v);
        let target = integrate(f, 0.0, x - eps, Endpoints::new(1.0 - beta, 1.0), 1e-12)
            + integrate(f, x - eps, x, Endpoints::REGULAR, 1e-12);
        let mut rng = stream(18, 0);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| {
                make_atom(beta, eps, horizon, horizon, &mut rng)
                    .unwrap()
                    .shifted_set
                    .contains(x)
            })
            .count();
        assert!(
            binomial_ok(hits, n, target, 3.0),
            "{} vs {target}",
            hits as f64 / n as f64
        );
    }
}
