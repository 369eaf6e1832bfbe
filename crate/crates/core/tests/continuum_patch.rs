use patchkit::continuum::*;
use patchkit::geometry::{MacroDomain, PatchGeometry};

#[test]
fn equilibrium_examples() {
    let (h, hh) = (3.5f64, 7.0f64);
    assert_eq!(equilibrium_profile(0.0, 12.0, 0.5, 1.5, h, hh), 1.0);
    let below = equilibrium_profile(h / 4.0 - 1e-12, 12.0, 0.5, 1.5, h, hh);
    let above = equilibrium_profile(h / 4.0 + 1e-12, 12.0, 0.5, 1.5, h, hh);
    assert!((below - 1.046875).abs() < 1e-10 && (above - 1.046875).abs() < 1e-10);
    let at_3q = [
        equilibrium_profile(0.75 * h - 1e-12, 30.0, 0.5, 1.5, h, hh),
        equilibrium_profile(0.75 * h + 1e-12, 30.0, 0.5, 1.5, h, hh),
    ];
    assert!((at_3q[0] - at_3q[1]).abs() < 1e-10);
    let ends = [
        equilibrium_profile(h, 30.0, 0.5, 1.5, h, hh),
        equilibrium_profile(-h, 30.0, 0.5, 1.5, h, hh),
    ];
    assert!((ends[0] - 1.0).abs() < 1e-12 && (ends[1] - 1.0).abs() < 1e-12);
}

#[test]
fn uncontrolled_constant_stays_constant() {
    let geom = PatchGeometry::<f64>::new(1.0, 2.0).unwrap();
    let mut cfg = ControlledPdeConfig::new(geom, MacroDomain::Dirichlet { patches: 1, left: 0.5, right: 1.5 }, 32);
    cfg.mu = 0.0;
    let run = solve_controlled_patch_pde(&cfg, |_| 0.5, |_| 1.5, |_| 0.7).unwrap();
    assert!(run.final_field.values.iter().all(|v| (v - 0.7).abs() < 1e-14));
}

#[test]
fn n_must_be_multiple_of_eight() {
    let geom = PatchGeometry::<f64>::new(1.0, 2.0).unwrap();
    let cfg = ControlledPdeConfig::new(geom, MacroDomain::Dirichlet { patches: 1, left: 0.0, right: 0.0 }, 30);
    assert!(solve_controlled_patch_pde(&cfg, |_| 0.0, |_| 0.0, |_| 0.0).is_err());
}

#[test]
fn coarse_steady_state_is_close_to_closed_form() {
    let geom = PatchGeometry::<f64>::new(3.5, 7.0).unwrap();
    let mut cfg = ControlledPdeConfig::new(geom, MacroDomain::Dirichlet { patches: 1, left: 0.5, right: 1.5 }, 128);
    cfg.diffusivity = 0.5;
    cfg.t_end = 200.0;
    cfg.output_interval = 1.0;
    let (f, ok) = steady_controlled_patch(&cfg, 0.5, 1.5, 1e-10).unwrap();
    assert!(ok);
    let err = f
        .x
        .iter()
        .zip(&f.values)
        .map(|(&x, v)| (v - equilibrium_profile(x, 30.0, 0.5, 1.5, 3.5, 7.0)).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-3, "{err}");
}
