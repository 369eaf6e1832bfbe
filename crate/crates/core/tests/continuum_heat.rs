use patchkit::continuum::*;

fn cfg(n: usize, t_end: f64) -> HeatConfig<f64> {
    HeatConfig { diffusivity: 0.5, big_h: 7.0, n, dt: None, t_end, output_interval: 1.0 }
}

#[test]
fn linear_ramp_is_stationary() {
    let ramp = |x: f64| 0.5 + (x + 7.0) / 14.0;
    let out = solve_heat_reference(&cfg(64, 5.0), |_| 0.5, |_| 1.5, ramp).unwrap();
    let last = out.last().unwrap();
    for (x, v) in last.x.iter().zip(&last.values) {
        assert!((v - ramp(*x)).abs() < 1e-10);
    }
}

#[test]
fn oversized_step_is_rejected() {
    let mut c = cfg(64, 1.0);
    c.dt = Some(0.6 * c.dx() * c.dx() / c.diffusivity);
    assert!(solve_heat_reference(&c, |_| 0.0, |_| 0.0, |_| 0.0).is_err());
}

#[test]
fn mismatched_initial_condition_is_rejected() {
    assert!(solve_heat_reference(&cfg(16, 1.0), |_| 0.0, |_| 0.0, |_| 1.0).is_err());
}
