use patchkit::coupling::targets_from_core;
use patchkit::geometry::Region;
use patchkit::md::*;
use patchkit::ode::OdeSystem;
use proptest::prelude::*;

fn small(seed: u64) -> SimConfig<f64> {
    let mut cfg = SimConfig::new(27, seed);
    cfg.t_end = 0.3;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forces_ignore_whole_period_shifts(seed in 0u64..1000, k in prop::array::uniform3(-3i32..=3)) {
        let cfg = small(seed);
        let state = init_atoms(&cfg).unwrap();
        let mut shifted = state.clone();
        for p in &mut shifted.positions {
            for a in 0..3 {
                p[a] += f64::from(k[a]) * cfg.side;
            }
        }
        let (f0, _) = compute_forces(&state, &cfg).unwrap();
        let (f1, _) = compute_forces(&shifted, &cfg).unwrap();
        for (a, b) in f0.iter().zip(&f1) {
            for c in 0..3 {
                prop_assert!((a[c] - b[c]).abs() <= 1e-12 * (1.0 + a[c].abs()), "{} vs {}", a[c], b[c]);
            }
        }
    }

    #[test]
    fn pair_forces_sum_to_zero(seed in 0u64..1000, jitter in prop::collection::vec(-0.4f64..0.4, 81)) {
        let cfg = small(seed);
        let mut state = init_atoms(&cfg).unwrap();
        for (p, d) in state.positions.iter_mut().zip(jitter.chunks(3)) {
            for a in 0..3 {
                p[a] += d[a];
            }
        }
        let (f, _) = compute_forces(&state, &cfg).unwrap();
        let scale: f64 = f.iter().flatten().map(|x| x.abs()).sum::<f64>() + 1.0;
        for a in 0..3 {
            let s: f64 = f.iter().map(|v| v[a]).sum();
            prop_assert!(s.abs() <= 1e-13 * scale, "net force {s}");
        }
    }

    #[test]
    fn isolated_runs_conserve_momentum(seed in 0u64..1000) {
        let tr = integrate(&small(seed)).unwrap();
        let p0 = tr.records[0].momentum;
        for r in &tr.records {
            for a in 0..3 {
                prop_assert!((r.momentum[a] - p0[a]).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn control_pushes_action_atoms_along_or_against_their_velocity(seed in 0u64..500, mu in 1.0f64..60.0) {
        let mut cfg = SimConfig::new(216, seed);
        cfg.mu = mu;
        let geom = cfg.geometry().unwrap();
        let state = init_atoms(&cfg).unwrap();
        let y = state.to_flat();
        let n = state.len();

        let mut free_cfg = cfg.clone();
        free_cfg.mu = 0.0;
        let mut controlled = PatchDynamics::new(&cfg).unwrap();
        let mut free = PatchDynamics::new(&free_cfg).unwrap();
        let (mut dc, mut df) = (vec![0.0; y.len()], vec![0.0; y.len()]);
        controlled.rhs(0.0, &y, &mut dc).unwrap();
        free.rhs(0.0, &y, &mut df).unwrap();

        let temps = region_temperatures(&state, &geom).unwrap();
        let targets = targets_from_core(temps.core, cfg.temp_left, cfg.temp_right, geom.half_width(), geom.macro_length());
        let wrapped = state.wrapped_positions(cfg.side);
        for i in 0..n {
            let q = state.velocities[i];
            let extra: Vec<f64> = (0..3).map(|a| dc[3 * n + 3 * i + a] - df[3 * n + 3 * i + a]).collect();
            let dot: f64 = (0..3).map(|a| extra[a] * q[a]).sum();
            let cross = [
                extra[1] * q[2] - extra[2] * q[1],
                extra[2] * q[0] - extra[0] * q[2],
                extra[0] * q[1] - extra[1] * q[0],
            ];
            let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!(norm(&cross) <= 1e-9 * (1.0 + norm(&extra) * norm(&q)));
            let expected = match geom.classify(wrapped[i][0]) {
                Region::LeftAction => (targets.minus - temps.left).signum(),
                Region::RightAction => (targets.plus - temps.right).signum(),
                _ => 0.0,
            };
            if expected == 0.0 {
                prop_assert!(norm(&extra) <= 1e-12);
            } else if norm(&q) > 1e-9 {
                prop_assert!(dot * expected > 0.0, "dot {dot}, expected sign {expected}");
            }
        }
    }
}

#[test]
fn same_seed_gives_bitwise_identical_trajectories() {
    let mut cfg = SimConfig::new(64, 11);
    cfg.mu = 30.0;
    cfg.t_end = 0.4;
    let a = integrate(&cfg).unwrap();
    let b = integrate(&cfg).unwrap();
    assert_eq!(a.final_state, b.final_state);
    for (x, y) in a.records.iter().zip(&b.records) {
        assert_eq!(x.aux.to_row().map(f64::to_bits), y.aux.to_row().map(f64::to_bits));
    }
    cfg.seed = 12;
    assert_ne!(integrate(&cfg).unwrap().final_state, a.final_state);
}

#[test]
fn single_precision_patch_runs() {
    let mut cfg = SimConfig::<f32>::new(27, 3);
    cfg.t_end = 0.2;
    cfg.record_energies = true;
    let tr = integrate(&cfg).unwrap();
    let e0 = tr.records[0].energies.unwrap().total;
    let e1 = tr.records.last().unwrap().energies.unwrap().total;
    assert!(((e1 - e0) / e0).abs() < 1e-3);
}
