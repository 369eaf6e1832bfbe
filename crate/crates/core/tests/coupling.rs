use patchkit::coupling::*;
use patchkit::geometry::*;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn core_to_center_examples() {
    assert!(close(core_to_center(1.0, 1.0, 1.0, 3.5, 7.0), 1.0, 1e-15));
    // h/4H = 1/8
    assert!(close(core_to_center(1.0, 0.5, 1.5, 3.5, 7.0), 1.0, 1e-15));
    let expect = 1.0 / (1.0 - 1.0 / 192.0);
    assert!(close(core_to_center(1.0, 0.0, 0.0, 3.5, 7.0), expect, 1e-15));
    assert!(close(expect, 1.005236, 1e-6));
}

#[test]
fn parabolic_interpolant_examples() {
    let (tl, t0, tr, hh) = (0.3, 0.9, 1.7, 7.0);
    assert!(close(parabolic_interpolant(tl, t0, tr, hh, -hh), tl, 1e-14));
    assert!(close(parabolic_interpolant(tl, t0, tr, hh, 0.0), t0, 1e-14));
    assert!(close(parabolic_interpolant(tl, t0, tr, hh, hh), tr, 1e-14));
    assert!(close(parabolic_interpolant(0.5, 1.0, 1.5, 7.0, 3.5), 1.25, 1e-14));
    assert!(close(parabolic_interpolant(0.0, 1.0, 0.0, 7.0, 3.5), 0.75, 1e-14));
}

#[test]
fn action_targets_examples() {
    let t = action_targets(1.0, 1.0, 1.0, 3.5, 7.0);
    assert_eq!((t.minus, t.plus), (1.0, 1.0));
    let t = action_targets(1.0, 0.5, 1.5, 3.5, 7.0);
    assert!(close(t.minus, 0.875, 1e-15) && close(t.plus, 1.125, 1e-15));
    assert!(close(t.plus - t.minus, 0.25, 1e-15));
    let t = action_targets(1.0, 1.64, 1.64, 3.5, 7.0);
    let expect = 1.0 + 13.0 / 6.0 * 1.28 / 64.0;
    assert!(close(t.minus, expect, 1e-14) && close(t.plus, expect, 1e-14));
    assert!(close(expect, 1.043333333, 1e-9));
}

fn gain() -> ControlGain<f64> {
    ControlGain { mu: 30.0, diffusivity: 0.5, h: 3.5, temp_floor: 1e-6 }
}

#[test]
fn control_acceleration_examples() {
    let temps = RegionTemperatures { left: 1.0, core: 1.0, right: 1.0 };
    let at_setpoint = CouplingTargets { center: 1.0, minus: 1.0, plus: 1.0 };
    let a = control_acceleration([1.0, 2.0, 3.0], Region::RightAction, &temps, &at_setpoint, &gain());
    assert_eq!(a, [0.0, 0.0, 0.0]);

    let targets = CouplingTargets { center: 1.0, minus: 0.875, plus: 1.125 };
    let a = control_acceleration([1.0, 0.0, 0.0], Region::RightAction, &temps, &targets, &gain());
    let expect = 0.5 * 30.0 * 0.125 / (2.0 * 12.25);
    assert!(close(a[0], expect, 1e-15) && a[1] == 0.0 && a[2] == 0.0);
    assert!(close(a[0], 0.0765306, 1e-7));

    for region in [Region::Core, Region::Buffer] {
        let a = control_acceleration([1.0, -1.0, 0.5], region, &temps, &targets, &gain());
        assert_eq!(a, [0.0; 3]);
    }
    // left action region mirrors with its own target
    let a = control_acceleration([0.0, 1.0, 0.0], Region::LeftAction, &temps, &targets, &gain());
    assert!(close(a[1], -expect, 1e-15));
}

#[test]
fn control_denominator_is_floored() {
    let temps = RegionTemperatures { left: 0.0, core: 1.0, right: 0.0 };
    let targets = CouplingTargets { center: 1.0, minus: 0.875, plus: 1.125 };
    let a = control_acceleration([1.0, 0.0, 0.0], Region::RightAction, &temps, &targets, &gain());
    assert!(a[0].is_finite() && a[0] > 0.0);
}

fn amps(values: Vec<f64>, gamma: f64, r: f64) -> CoreAmplitudes<f64> {
    CoreAmplitudes { values, gamma, r, boundary: AmplitudeBoundary::Periodic }
}

#[test]
fn lagrange_uncoupled_returns_core_value() {
    let a = amps(vec![0.3, -1.2, 2.5, 0.7, 1.1, -0.4], 0.0, 0.5);
    for j in 0..6 {
        let (m, p) = lagrange_action_targets(&a, j).unwrap();
        assert_eq!((m, p), (a.values[j], a.values[j]));
    }
}

#[test]
fn lagrange_reproduces_linear_and_quadratic() {
    let dirichlet = |vals: Vec<f64>, l: f64, r: f64, ratio: f64| CoreAmplitudes {
        values: vals,
        gamma: 1.0,
        r: ratio,
        boundary: AmplitudeBoundary::Dirichlet { left: l, right: r },
    };
    // U_j = j on patches j = 1..=6, synonyms U_0 = 0 and U_7 = 7
    let lin = dirichlet((1..=6).map(|j| j as f64).collect(), 0.0, 7.0, 0.3);
    for idx in 2..4 {
        let j = (idx + 1) as f64;
        let (m, p) = lagrange_action_targets(&lin, idx).unwrap();
        assert!(close(m, j - 0.15, 1e-12) && close(p, j + 0.15, 1e-12));
    }
    let quad = dirichlet((1..=6).map(|j| (j * j) as f64).collect(), 0.0, 49.0, 1.0);
    for idx in 2..4 {
        let j = (idx + 1) as f64;
        let (m, p) = lagrange_action_targets(&quad, idx).unwrap();
        assert!(close(m, (j - 0.5).powi(2), 1e-12) && close(p, (j + 0.5).powi(2), 1e-12));
    }
}

#[test]
fn lagrange_out_of_range_is_config_error() {
    let a = CoreAmplitudes {
        values: vec![1.0, 2.0, 3.0],
        gamma: 1.0,
        r: 0.5,
        boundary: AmplitudeBoundary::Dirichlet { left: 0.0, right: 4.0 },
    };
    assert!(lagrange_action_targets(&a, 0).is_err());
    assert!(lagrange_action_targets(&a, 5).is_err());
    let (m, p) = lagrange_action_targets_near_boundary(&a, 0).unwrap();
    assert!(close(m, 1.0 - 0.25, 1e-12) && close(p, 1.0 + 0.25, 1e-12));
}

/// Five-point Gauss-Legendre average of `f` over `[a, b]`; exact for the quadratics used here.
fn gauss_average(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let nodes = [
        (0.0, 128.0 / 225.0),
        (0.5384693101056831, 0.4786286704993665),
        (-0.5384693101056831, 0.4786286704993665),
        (0.9061798459386640, 0.2369268850561891),
        (-0.9061798459386640, 0.2369268850561891),
    ];
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    nodes.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() / 2.0
}

proptest! {
    #[test]
    fn action_targets_are_region_averages_of_interpolant(
        tl in 0.1f64..3.0, t0 in 0.1f64..3.0, tr in 0.1f64..3.0,
        h in 0.5f64..5.0, ratio in 0.05f64..1.0,
    ) {
        let big_h = h / ratio;
        let profile = |x: f64| parabolic_interpolant(tl, t0, tr, big_h, x);
        let t_core = gauss_average(profile, -h / 4.0, h / 4.0);
        // the core mean maps back to the centre value
        prop_assert!((core_to_center(t_core, tl, tr, h, big_h) - t0).abs() < 1e-12);
        let t = targets_from_core(t_core, tl, tr, h, big_h);
        let right = gauss_average(profile, h / 4.0, 3.0 * h / 4.0);
        let left = gauss_average(profile, -3.0 * h / 4.0, -h / 4.0);
        prop_assert!((t.plus - right).abs() < 1e-12);
        prop_assert!((t.minus - left).abs() < 1e-12);
    }

    #[test]
    fn lagrange_exact_for_quadratics(
        c0 in -2.0f64..2.0, c1 in -2.0f64..2.0, c2 in -2.0f64..2.0, r in 0.01f64..1.0,
    ) {
        let poly = |s: f64| c0 + c1 * s + c2 * s * s;
        let a = amps((0..9).map(|j| poly(j as f64)).collect::<Vec<_>>(), 1.0, r);
        for j in 2..7 {
            let (m, p) = lagrange_action_targets(&a, j).unwrap();
            let x = j as f64;
            prop_assert!((m - poly(x - r / 2.0)).abs() < 1e-12);
            prop_assert!((p - poly(x + r / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn control_heats_cold_regions(t_meas in 0.01f64..3.0, t_target in 0.01f64..3.0,
                                  q in proptest::array::uniform3(-2.0f64..2.0)) {
        prop_assume!((t_meas - t_target).abs() > 1e-9);
        prop_assume!(q.iter().any(|v| v.abs() > 1e-6));
        let temps = RegionTemperatures { left: t_meas, core: 1.0, right: t_meas };
        let targets = CouplingTargets { center: 1.0, minus: t_target, plus: t_target };
        for region in [Region::LeftAction, Region::RightAction] {
            let a = control_acceleration(q, region, &temps, &targets, &gain());
            let power: f64 = a.iter().zip(q).map(|(ai, qi)| ai * qi).sum();
            prop_assert_eq!(power > 0.0, t_meas < t_target);
        }
    }
}
