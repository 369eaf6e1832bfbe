use patchkit::md::*;
use patchkit::Error;
use std::ops::ControlFlow;

#[test]
fn short_isolated_run_conserves_momentum_and_energy() {
    let mut cfg = SimConfig::<f64>::new(27, 5);
    cfg.t_end = 0.2;
    cfg.record_energies = true;
    let traj = integrate(&cfg).unwrap();
    assert_eq!(traj.records.len(), 3);
    let e0 = traj.records[0].energies.unwrap().total;
    for r in &traj.records {
        for p in r.momentum {
            assert!(p.abs() < 1e-12);
        }
        assert!(((r.energies.unwrap().total - e0) / e0).abs() < 1e-6);
    }
}

#[test]
fn observer_can_abort() {
    let mut cfg = SimConfig::<f64>::new(8, 1);
    cfg.t_end = 1.0;
    let err = integrate_with(&cfg, |r| {
        if r.t > 0.25 {
            ControlFlow::Break("enough".into())
        } else {
            ControlFlow::Continue(())
        }
    })
    .unwrap_err();
    assert!(matches!(err, Error::Aborted { .. }));
}

#[test]
fn adaptive_mode_reaches_the_end() {
    let mut cfg = SimConfig::<f64>::new(27, 2);
    cfg.t_end = 0.3;
    cfg.record_energies = true;
    cfg.integrator = Integrator::Adaptive { rtol: 1e-8, atol: 1e-10, initial_dt: 1e-3 };
    let traj = integrate(&cfg).unwrap();
    let last = traj.records.last().unwrap();
    assert!((last.t - 0.3).abs() < 1e-12);
    let e0 = traj.records[0].energies.unwrap().total;
    assert!(((last.energies.unwrap().total - e0) / e0).abs() < 1e-5);
}

#[test]
fn empty_action_region_is_reported() {
    let mut cfg = SimConfig::<f64>::new(1, 0);
    cfg.side = 4.0;
    cfg.macro_half_width = 4.0;
    cfg.mu = 10.0;
    cfg.t_end = 0.01;
    assert!(matches!(integrate(&cfg), Err(Error::RegionEmpty { .. })));
}
