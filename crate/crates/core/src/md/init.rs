use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{config_err, Result};
use crate::md::{AtomState, SimConfig};
use crate::scalar::Real;

/// Places `N` atoms on distinct, randomly chosen centres of an `ns³` lattice
/// filling the cube (`ns = ceil(side)`), then adds small mean-zero offsets.
///
/// Random numbers are drawn from `ChaCha8Rng::seed_from_u64(seed)` in a fixed
/// order: `ns³` sort keys for the cell permutation, then `3N` position offsets,
/// then `3N` velocity offsets, each atom-major. Cell `c` has lattice indices
/// `(c % ns, (c / ns) % ns, c / ns²)`.
pub fn init_atoms<T: Real>(cfg: &SimConfig<T>) -> Result<AtomState<T>> {
    let ns = cfg.cells_per_axis();
    let cells = ns.pow(3);
    if cfg.atoms == 0 || cfg.atoms > cells {
        return config_err(format!(
            "cannot place {} atoms on {} lattice cells",
            cfg.atoms, cells
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let keys: Vec<f64> = (0..cells).map(|_| rng.gen()).collect();
    let mut order: Vec<usize> = (0..cells).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
    order.truncate(cfg.atoms);

    let centre = |m: usize| cfg.side * ((T::of_usize(m) + T::of(0.5)) / T::of_usize(ns) - T::of(0.5));
    let mut positions: Vec<[T; 3]> = order
        .iter()
        .map(|&c| [centre(c % ns), centre((c / ns) % ns), centre(c / (ns * ns))])
        .collect();

    let pos_offsets = centred_offsets(&mut rng, cfg.atoms);
    let vel_offsets = centred_offsets(&mut rng, cfg.atoms);
    let mut velocities = vec![[T::zero(); 3]; cfg.atoms];
    for i in 0..cfg.atoms {
        for k in 0..3 {
            positions[i][k] += T::of(0.3) * pos_offsets[i][k];
            velocities[i][k] = T::of(0.6) * vel_offsets[i][k];
        }
    }
    Ok(AtomState { positions, velocities, t: T::zero() })
}

/// `u - 1/2` for uniform `u`, with the per-axis mean removed.
fn centred_offsets<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vec<[T; 3]> {
    let mut z: Vec<[T; 3]> = (0..n)
        .map(|_| {
            let mut a = [T::zero(); 3];
            for v in &mut a {
                *v = T::of(rng.gen::<f64>() - 0.5);
            }
            a
        })
        .collect();
    for k in 0..3 {
        let mean = z.iter().map(|a| a[k]).sum::<T>() / T::of_usize(n);
        for a in &mut z {
            a[k] -= mean;
        }
    }
    z
}
