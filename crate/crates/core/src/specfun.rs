//! Special functions and the closed-form constants attached to a Hermite
//! process of order `p` and memory parameter `β`.
//!
//! Every gamma ratio is evaluated in log space: for `p ≥ 3` the individual
//! factors `Γ(β)^p`, `p!` and friends leave the comfortable range of `f64`
//! long before their ratios do.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 671.0 / 128.0;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS_COEF: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// `ln Γ(x)` for `x > 0`, no argument check.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let tmp = x + LANCZOS_G;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut ser = LANCZOS_C0;
    let mut y = x;
    for c in LANCZOS_COEF {
        y += 1.0;
        ser += c / y;
    }
    tmp + (SQRT_2PI * ser / x).ln()
}

/// Natural logarithm of the gamma function on the positive half-line.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma(x))
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    log_gamma(x).map(f64::exp)
}

pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

pub(crate) fn ln_factorial(n: u32) -> f64 {
    ln_gamma(f64::from(n) + 1.0)
}

/// Regularized lower incomplete gamma function `P(a, x) = γ(a, x) / Γ(a)`.
///
/// Series expansion below `x < a + 1`, Lentz continued fraction above.
pub fn reg_lower_inc_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!(
            "incomplete gamma requires a > 0, got {a}"
        )));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!(
            "incomplete gamma requires x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let log_prefix = a * x.ln() - x - ln_gamma(a);
    let p = if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        sum * log_prefix.exp()
    } else {
        1.0 - upper_continued_fraction(a, x) * log_prefix.exp()
    };
    Ok(p.clamp(0.0, 1.0))
}

fn upper_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Probabilists' Hermite polynomial `He_p(x)`.
pub fn hermite_poly(p: u32, x: f64) -> f64 {
    match p {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for k in 1..p {
                let next = x * cur - f64::from(k) * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// A validated `(β, p)` pair together with every scalar derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteParams {
    pub p: u32,
    pub beta: f64,
    /// Stability index of the intersection of `p` independent β-stable sets, `(β − 1)p + 1`.
    pub beta_p: f64,
    pub hurst: f64,
    /// Normalization of the time-domain (moving-average) representation.
    pub a_const: f64,
    /// Normalization of the frequency-domain representation.
    pub b_const: f64,
    /// Normalization of the local-time representation.
    pub c_const: f64,
}

impl HermiteParams {
    pub fn new(beta: f64, p: u32) -> Result<Self> {
        derive_params(beta, p)
    }

    /// Lower end `1 − 1/p` of the admissible open interval for β.
    pub fn beta_lower_bound(p: u32) -> f64 {
        1.0 - 1.0 / f64::from(p.max(1))
    }

    /// `c_{p,β,T}` for the representation driven by shifts on `[0, T]`.
    pub fn c_const_t(&self, horizon: f64) -> Result<f64> {
        scale_const_t(self, horizon)
    }
}

pub fn derive_params(beta: f64, p: u32) -> Result<HermiteParams> {
    if p == 0 {
        return Err(Error::Parameter("order p must be at least 1".into()));
    }
    let lower = HermiteParams::beta_lower_bound(p);
    if !(beta > lower && beta < 1.0) {
        return Err(Error::Parameter(format!(
            "beta = {beta} outside the open interval ({}, 1) required for p = {p}",
            if p == 1 {
                "0".to_string()
            } else {
                format!("{}/{p}", p - 1)
            }
        )));
    }
    let pf = f64::from(p);
    let beta_p = (beta - 1.0) * pf + 1.0;
    let hurst = 1.0 - pf * (1.0 - beta) / 2.0;
    let ln_pfact = ln_factorial(p);

    let ln_a2 = hurst.ln() + beta_p.ln() - ln_pfact - pf * ln_beta(beta / 2.0, 1.0 - beta);
    let spectral = ln_gamma(1.0 - beta) + (beta * PI / 2.0).sin().ln();
    let ln_b2 = hurst.ln() + beta_p.ln() - ln_pfact - pf * spectral;
    let ln_c2 = ln_gamma(beta_p) + ln_gamma(beta_p + 2.0)
        - (2.0f64.ln() + ln_pfact + pf * (ln_gamma(beta) + ln_gamma(2.0 - beta)));

    let params = HermiteParams {
        p,
        beta,
        beta_p,
        hurst,
        a_const: (0.5 * ln_a2).exp(),
        b_const: (0.5 * ln_b2).exp(),
        c_const: (0.5 * ln_c2).exp(),
    };
    for (name, v) in [
        ("a", params.a_const),
        ("b", params.b_const),
        ("c", params.c_const),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Numerical(format!(
                "constant {name} evaluated to {v}"
            )));
        }
    }
    Ok(params)
}

/// `T^{p(1−β)/2} c_{p,β}`.
pub fn scale_const_t(params: &HermiteParams, horizon: f64) -> Result<f64> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Domain(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let exponent = f64::from(params.p) * (1.0 - params.beta) / 2.0;
    Ok(horizon.powf(exponent) * params.c_const)
}

/// `(ε/e)^s`, evaluated without forming ε/e explicitly.
pub(crate) fn eps_over_e_pow(eps: f64, s: f64) -> f64 {
    (s * (eps.ln() - 1.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Stirling series after shifting the argument past 30; independent of Lanczos.
    fn ln_gamma_stirling(x: f64) -> f64 {
        let mut shift = 0.0;
        let mut z = x;
        while z < 30.0 {
            shift += z.ln();
            z += 1.0;
        }
        let z2 = z * z;
        let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
            - 1.0 / (1680.0 * z * z2 * z2 * z2)
            + 1.0 / (1188.0 * z * z2 * z2 * z2 * z2);
        (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift
    }

    #[test]
    fn log_gamma_examples() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-15);
        assert!((log_gamma(5.0).unwrap() - 24f64.ln()).abs() < 1e-13);
        assert!((log_gamma(0.5).unwrap() - 0.5 * PI.ln()).abs() < 1e-14);
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-2.5), Err(Error::Domain(_))));
    }

    #[test]
    fn log_gamma_matches_stirling_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let x = 10f64.powf(rng.random_range(-3.0..3.0));
            let got = ln_gamma(x);
            let want = ln_gamma_stirling(x);
            // lnΓ vanishes at 1 and 2, so the relative criterion switches to absolute there.
            let scale = want.abs().max(0.05);
            assert!(
                (got - want).abs() <= 1e-12 * scale,
                "x={x} got={got} want={want}"
            );
        }
    }

    #[test]
    fn log_gamma_recurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..2000 {
            let x = rng.random_range(1e-3..50.0);
            let lhs = ln_gamma(x + 1.0);
            let rhs = x.ln() + ln_gamma(x);
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "x={x}");
        }
    }

    #[test]
    fn incomplete_gamma_examples() {
        for x in [0.0, 0.1, 0.7, 1.0, 2.5, 10.0, 40.0] {
            let got = reg_lower_inc_gamma(1.0, x).unwrap();
            assert!((got - (1.0 - (-x).exp())).abs() < 1e-14, "x={x}");
        }
        assert_eq!(reg_lower_inc_gamma(2.3, 0.0).unwrap(), 0.0);
        assert!((reg_lower_inc_gamma(0.5, 50.0).unwrap() - 1.0).abs() < 1e-10);
        assert!(reg_lower_inc_gamma(0.0, 1.0).is_err());
        assert!(reg_lower_inc_gamma(1.0, -1.0).is_err());
    }

    #[test]
    fn incomplete_gamma_half_is_erf() {
        // P(1/2, x) = erf(√x); erf from a Simpson rule on 2/√π e^{-u²}.
        for x in [0.01f64, 0.3, 1.0, 2.0, 4.5] {
            let b = x.sqrt();
            let n = 20_000;
            let h = b / n as f64;
            let f = |u: f64| 2.0 / PI.sqrt() * (-u * u).exp();
            let mut s = f(0.0) + f(b);
            for i in 1..n {
                s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            let erf = s * h / 3.0;
            assert!(
                (reg_lower_inc_gamma(0.5, x).unwrap() - erf).abs() < 1e-10,
                "x={x}"
            );
        }
    }

    #[test]
    fn incomplete_gamma_monotone() {
        for a in [0.2, 0.5, 1.7, 6.0] {
            let mut prev = 0.0;
            for i in 0..400 {
                let x = i as f64 * 0.05;
                let v = reg_lower_inc_gamma(a, x).unwrap();
                assert!(v >= prev - 1e-15);
                prev = v;
            }
        }
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_poly(0, 7.3), 1.0);
        assert_eq!(hermite_poly(2, 0.0), -1.0);
        assert_eq!(hermite_poly(3, 2.0), 2.0);
        assert_eq!(hermite_poly(4, 1.0), 1.0 - 6.0 + 3.0);
    }

    #[test]
    fn hermite_orthogonality_by_quadrature() {
        let n = 40_000;
        let (a, b) = (-14.0, 14.0);
        let h = (b - a) / n as f64;
        let phi = |x: f64| (-x * x / 2.0).exp() / (2.0 * PI).sqrt();
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        for m in 0..=4u32 {
            for k in 0..=4u32 {
                let f = |x: f64| hermite_poly(m, x) * hermite_poly(k, x) * phi(x);
                let mut s = f(a) + f(b);
                for i in 1..n {
                    s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                let integral = s * h / 3.0;
                let want = if m == k { fact[k as usize] } else { 0.0 };
                assert!((integral - want).abs() < 1e-8, "m={m} k={k} got {integral}");
            }
        }
    }

    #[test]
    fn derive_params_examples() {
        let p = derive_params(0.8, 2).unwrap();
        assert!((p.beta_p - 0.6).abs() < 1e-15);
        assert!((p.hurst - 0.8).abs() < 1e-15);
        let p = derive_params(0.5, 1).unwrap();
        assert!((p.c_const - 3f64.sqrt() / 2.0).abs() < 1e-13);
        match derive_params(0.5, 2) {
            Err(Error::Parameter(msg)) => assert!(msg.contains("(1/2, 1)"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(derive_params(1.0, 1).is_err());
        assert!(derive_params(0.0, 1).is_err());
        assert!(derive_params(0.9, 0).is_err());
    }

    #[test]
    fn a_const_p1_matches_fbm_moving_average() {
        // p = 1: a² = H(2H−1)/B(H−1/2, 2−2H), with β = 2H − 1.
        let params = derive_params(0.6, 1).unwrap();
        let h = params.hurst;
        let b = (ln_beta(h - 0.5, 2.0 - 2.0 * h)).exp();
        assert!((params.a_const.powi(2) - h * (2.0 * h - 1.0) / b).abs() < 1e-13);
    }

    #[test]
    fn scale_const_examples() {
        let params = derive_params(0.5, 1).unwrap();
        assert_eq!(scale_const_t(&params, 1.0).unwrap(), params.c_const);
        let want = 4f64.powf(0.25) * 3f64.sqrt() / 2.0;
        assert!((scale_const_t(&params, 4.0).unwrap() - want).abs() < 1e-13);
        let params = derive_params(0.8, 2).unwrap();
        let c = scale_const_t(&params, 2.0).unwrap();
        let c_oracle = ((ln_gamma_stirling(0.6) + ln_gamma_stirling(2.6)
            - 2f64.ln()
            - 2f64.ln()
            - 2.0 * (ln_gamma_stirling(0.8) + ln_gamma_stirling(1.2)))
            / 2.0)
            .exp();
        assert!((c - 2f64.powf(0.2) * c_oracle).abs() < 1e-12);
        assert!(scale_const_t(&params, 0.0).is_err());
    }

    #[test]
    fn parameter_grid_identities() {
        for p in 1..=5u32 {
            let lo = HermiteParams::beta_lower_bound(p);
            for k in 1..20 {
                let beta = lo + (1.0 - lo) * k as f64 / 20.0;
                let hp = derive_params(beta, p).unwrap();
                assert!(hp.beta_p > 0.0 && hp.beta_p < 1.0);
                assert!(hp.hurst > 0.5 && hp.hurst < 1.0);
                assert!((hp.beta_p + 1.0 - 2.0 * hp.hurst).abs() < 1e-14);
                for c in [hp.a_const, hp.b_const, hp.c_const] {
                    assert!(c.is_finite() && c > 0.0);
                }
                let pf = f64::from(p);
                let ln_ident = 2.0 * hp.c_const.ln()
                    + ln_factorial(p)
                    + 2f64.ln()
                    + pf * (ln_gamma(beta) + ln_gamma(2.0 - beta))
                    - ln_gamma(hp.beta_p)
                    - ln_gamma(hp.beta_p + 2.0);
                assert!(ln_ident.exp_m1().abs() < 1e-12, "p={p} beta={beta}");
            }
        }
    }
}
