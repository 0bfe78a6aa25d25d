//! End-to-end checks of the path routes at small scale.

use hermite_core::ensemble::PathEnsemble;
use hermite_core::hermite_paths::{simulate, Route, SimConfig};
use hermite_core::specfun::derive_params;
use hermite_core::stats::{ks_two_sample, variance_estimate};

fn config(beta: f64, p: u32, route: Route, reps: usize, seed: u64) -> SimConfig {
    let mut c = SimConfig::preset(derive_params(beta, p).unwrap(), route);
    c.replicates = reps;
    c.seed = seed;
    c.t_grid = vec![0.0, 0.5, 1.0];
    c
}

#[test]
fn every_route_starts_at_zero_and_has_unit_scale() {
    for (route, p, reps) in [(Route::Chaos, 2, 2000), (Route::Timedomain, 2, 2000), (Route::FbmExact, 1, 2000), (Route::Atoms, 2, 200)] {
        let mut c = config(0.8, p, route, reps, 11);
        if route == Route::Atoms {
            c.atoms = Some(64);
        }
        let ens = simulate(&c).unwrap();
        assert_eq!(ens.replicates(), reps);
        assert!(ens.column(0.0).unwrap().iter().all(|&v| v == 0.0), "{route}");
        let v = variance_estimate(&ens.column(1.0).unwrap());
        assert!((v.estimate - 1.0).abs() <= 4.0 * v.std_error + 0.1, "{route}: {v:?}");
        assert_eq!(ens.meta.config.as_ref().unwrap().route, route);
    }
}

#[test]
fn chaos_matches_exact_fbm_for_order_one() {
    let a = simulate(&config(0.7, 1, Route::Chaos, 1500, 3)).unwrap();
    let b = simulate(&config(0.7, 1, Route::FbmExact, 1500, 4)).unwrap();
    for t in [0.5, 1.0] {
        assert!(ks_two_sample(&a.column(t).unwrap(), &b.column(t).unwrap()).unwrap().pass);
    }
}

#[test]
fn seeds_separate_and_reproduce() {
    let c = config(0.8, 2, Route::Chaos, 20, 5);
    let a = simulate(&c).unwrap();
    assert_eq!(a, simulate(&c).unwrap());
    let other = simulate(&config(0.8, 2, Route::Chaos, 20, 6)).unwrap();
    assert_ne!(a.values, other.values);
    // Replicate i does not depend on how many replicates were requested.
    let longer = simulate(&config(0.8, 2, Route::Chaos, 30, 5)).unwrap();
    assert_eq!(a.values[..], longer.values[..20]);
}

#[test]
fn ensemble_json_round_trip_keeps_provenance() {
    let ens = simulate(&config(0.75, 1, Route::Timedomain, 5, 9)).unwrap();
    let back = PathEnsemble::from_json(&ens.to_json().unwrap()).unwrap();
    assert_eq!(back, ens);
    assert_eq!(back.meta.generator, ens.meta.generator);
}
