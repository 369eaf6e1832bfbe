use patchkit::md::*;
use patchkit::geometry::*;
use patchkit::Error;

fn cfg() -> SimConfig<f64> {
    SimConfig::new(2, 0)
}

#[test]
fn lone_atom_has_no_energy() {
    let s = AtomState { positions: vec![[0.0; 3]], velocities: vec![[0.0; 3]], t: 0.0 };
    let e = energies(&s, &cfg());
    assert_eq!((e.kinetic, e.potential, e.total), (0.0, 0.0, 0.0));
}

#[test]
fn pair_at_equilibrium() {
    let mut c = cfg();
    c.side = 7.0;
    let s = AtomState { positions: vec![[0.0; 3], [1.0, 0.0, 0.0]], velocities: vec![[0.0; 3]; 2], t: 0.0 };
    let e = energies(&s, &c);
    assert!((e.potential + 1.0 / 12.0).abs() < 1e-12);
    assert!((e.total + 1.0 / 12.0).abs() < 1e-12);
}

#[test]
fn core_atom_temperature() {
    let geom = PatchGeometry::<f64>::new(3.5, 7.0).unwrap();
    let s = AtomState { positions: vec![[0.0; 3]], velocities: vec![[1.0, 0.0, 0.0]], t: 0.0 };
    let aux = region_observables(&s, &geom);
    assert_eq!(aux.temps.core, 0.5);
    assert!(aux.temps.left.is_nan() && aux.temps.right.is_nan());
    assert_eq!(aux.mean_velocity[1], [1.0, 0.0, 0.0]);
    assert!(matches!(
        region_temperatures(&s, &geom),
        Err(Error::RegionEmpty { region: Region::LeftAction, .. })
    ));
}

#[test]
fn unit_speed_everywhere_gives_half() {
    let geom = PatchGeometry::new(2.0, 4.0).unwrap();
    let xs = [-1.5, -1.2, -0.3, 0.2, 0.4, 1.1, 1.4, 1.9, -1.9, 5.0];
    let positions: Vec<[f64; 3]> = xs.iter().map(|&x| [x, 0.0, 0.0]).collect();
    let velocities: Vec<[f64; 3]> = (0..xs.len())
        .map(|i| {
            let a = i as f64;
            [a.cos() * 0.6, a.sin() * 0.6, 0.8]
        })
        .collect();
    let s = AtomState { positions, velocities, t: 0.0 };
    let t = region_temperatures(&s, &geom).unwrap();
    for v in [t.left, t.core, t.right] {
        assert!((v - 0.5).abs() < 1e-14);
    }
}
