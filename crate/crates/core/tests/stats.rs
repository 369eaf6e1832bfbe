use patchkit::md::estimate_diffusivity_from_gap;
use patchkit::spectral::estimate_diffusivity;
use patchkit::stats::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = 0.0;
    (0..n)
        .map(|_| {
            x = phi * x + rng.gen_range(-1.0..1.0);
            x
        })
        .collect()
}

#[test]
fn window_mean_uses_a_closed_window() {
    let t = [0.0, 1.0, 2.0, 3.0, 4.0];
    let v = [10.0, 1.0, 2.0, 3.0, 50.0];
    assert_eq!(window_mean(&t, &v, 1.0, 3.0).unwrap(), 2.0);
    assert!(window_mean(&t, &v, 5.0, 6.0).is_err());
    assert!(window_mean(&t, &v[..4], 0.0, 1.0).is_err());
    assert!(mean::<f64>(&[]).is_err());
}

#[test]
fn exact_exponential_e_folds_at_its_timescale() {
    let dt = 0.02;
    let acf: Vec<f64> = (0..200).map(|i| (-(i as f64) * dt / 0.37).exp()).collect();
    let tau = e_folding_lag(&acf, dt).unwrap();
    // linear interpolation error is second order in dt
    assert!((tau - 0.37).abs() < 2e-4, "{tau}");
    assert!(e_folding_lag(&acf[..10], dt).is_err());
}

#[test]
fn autocorrelation_rejects_degenerate_input() {
    assert!(autocorrelation(&[1.0, 1.0, 1.0, 1.0], 2).is_err());
    assert!(autocorrelation(&[1.0, 2.0], 2).is_err());
    assert!(autocorrelation(&[1.0, 2.0, 3.0], 0).is_err());
}

#[test]
fn ar1_autocorrelation_is_geometric() {
    let phi = 0.9;
    let xs = ar1(phi, 200_000, 7);
    let acf = autocorrelation(&xs, 10).unwrap();
    assert_eq!(acf[0], 1.0);
    for (k, c) in acf.iter().enumerate() {
        assert!((c - phi.powi(k as i32)).abs() < 0.02, "lag {k}: {c}");
    }
}

#[test]
fn gap_estimator_recovers_a_synthetic_relaxation_rate() {
    let (dt, tau) = (0.02f64, 0.5);
    let phi = (-dt / tau).exp();
    let series: Vec<Vec<f64>> = (0..8).map(|s| ar1(phi, 20_000, s)).collect();
    let est = estimate_diffusivity_from_gap(&series, dt, 4.0, 3.5).unwrap();
    assert_eq!(est.acf.len(), 200);
    assert!((est.timescale - tau).abs() < 0.1 * tau, "{}", est.timescale);
    assert!((est.rate * est.timescale - 1.0).abs() < 1e-14);
    assert!((est.diffusivity - est.rate * estimate_diffusivity(3.5)).abs() < 1e-14);
    assert!(estimate_diffusivity_from_gap::<f64>(&[], dt, 4.0, 3.5).is_err());
    assert!(estimate_diffusivity_from_gap(&series, 4.0, 4.0, 3.5).is_err());
}

proptest! {
    #[test]
    fn linear_fit_is_exact_on_lines(
        slope in -10.0f64..10.0,
        intercept in -10.0f64..10.0,
        xs in prop::collection::vec(-50.0f64..50.0, 3..40),
    ) {
        prop_assume!(xs.iter().any(|&x| (x - xs[0]).abs() > 1e-3));
        let ys: Vec<f64> = xs.iter().map(|x| slope * x + intercept).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        prop_assert!((fit.slope - slope).abs() <= 1e-9);
        prop_assert!((fit.intercept - intercept).abs() <= 1e-8);
    }

    #[test]
    fn autocorrelation_ignores_a_constant_offset(
        xs in prop::collection::vec(-5.0f64..5.0, 20..200),
        shift in -100.0f64..100.0,
    ) {
        let lags = 10;
        prop_assume!(xs.iter().any(|&x| (x - xs[0]).abs() > 1e-6));
        let a = autocorrelation(&xs, lags).unwrap();
        let moved: Vec<f64> = xs.iter().map(|x| x + shift).collect();
        let b = autocorrelation(&moved, lags).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-8);
        }
    }
}
