//! Execution of each experiment kind into an output directory.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use patchkit::continuum::{
    equilibrium_profile, solve_controlled_patch_pde, solve_heat_reference, solve_macro_ode, solve_multipatch_pde,
    GridField,
};
use patchkit::md::{estimate_diffusivity_from_gap, gap_series, integrate_with, SimConfig, Trajectory, AUX_HEADER};
use patchkit::spectral::{
    construct_slow_manifold, equivalent_pde, estimate_diffusivity, find_mode_roots, find_mode_roots_with,
    optimal_mu_multipatch, optimal_mu_single_patch, CouplingFactor, ModeRoot, Symmetry, ORDERS,
};
use patchkit::geometry::Region;
use patchkit::stats::window_mean;
use serde_json::{json, Value};

use crate::config::*;
use crate::error::CliError;
use crate::output::{Cell, FileEntry, OutputDir};
use crate::plot;

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub jobs: usize,
    pub max_wall: Option<Duration>,
}

/// Result of one experiment: a short human summary plus structured values for the manifest.
pub struct Outcome {
    pub summary: String,
    pub results: Value,
}

pub fn execute(exp: &Experiment, out: &mut OutputDir, opts: RunOptions) -> Result<Outcome, CliError> {
    let outcome = match exp {
        Experiment::IsolatedMd(p) | Experiment::ControlledMd(p) => run_md(p, out, opts)?,
        Experiment::HeatReference(p) => run_heat(p, out)?,
        Experiment::ControlledPatchPde(p) => run_patch(p, out)?,
        Experiment::MultipatchPde(p) => run_multipatch(p, out)?,
        Experiment::Modes(p) => run_modes(p, out)?,
        Experiment::OptimalMu(_) => run_optimal_mu(out)?,
        Experiment::SlowManifold(p) => run_slow_manifold(p, out)?,
        Experiment::EstimateK(p) => run_estimate_k(p, out, opts)?,
    };
    if exp.output().plot {
        if let Some(script) = plot::script(exp, out.files()) {
            out.write_text("plot.gp", &script)?;
        }
    }
    Ok(outcome)
}

/// Runs `work` for every item on up to `jobs` threads; results keep item order.
fn fan_out<I: Sync, R: Send>(items: &[I], jobs: usize, work: impl Fn(&I) -> R + Sync) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, items.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = work(&items[i]);
                slots.lock().expect("result slots poisoned")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("result slots poisoned").into_iter().map(|r| r.expect("every item ran")).collect()
}

/// Integrates one MD configuration with progress logging and the wall-clock guard.
fn simulate(cfg: &SimConfig<f64>, max_wall: Option<Duration>) -> Result<Trajectory<f64>, CliError> {
    let start = Instant::now();
    let mut next_report = 0.1;
    let seed = cfg.seed;
    let t_end = cfg.t_end;
    integrate_with(cfg, |rec| {
        if rec.t >= next_report * t_end - 1e-12 {
            log::info!(
                "seed {seed}: t = {:.2} / {t_end} ({:.0}%), Tc = {:.3}, {:.1}s",
                rec.t,
                100.0 * rec.t / t_end,
                rec.aux.temps.core,
                start.elapsed().as_secs_f64()
            );
            while next_report * t_end <= rec.t + 1e-12 {
                next_report += 0.1;
            }
        }
        match max_wall {
            Some(limit) if start.elapsed() > limit => {
                ControlFlow::Break(format!("wall-clock limit of {:.0} s exceeded", limit.as_secs_f64()))
            }
            _ => ControlFlow::Continue(()),
        }
    })
    .map_err(CliError::from_lib)
}

fn snapshot_rows(state: &patchkit::md::AtomState<f64>, side: f64) -> Vec<Vec<String>> {
    state
        .wrapped_positions(side)
        .iter()
        .zip(&state.velocities)
        .enumerate()
        .map(|(i, (x, v))| {
            let mut row = vec![i.to_string()];
            row.extend(x.iter().chain(v).map(|c| c.cell()));
            row
        })
        .collect()
}

const SNAPSHOT_HEADER: [&str; 7] = ["atom", "x", "y", "z", "u", "v", "w"];
const ENERGY_HEADER: [&str; 7] = ["t", "kinetic", "potential", "total", "px", "py", "pz"];

fn md_single(cfg: &SimConfig<f64>, out: &mut OutputDir, max_wall: Option<Duration>) -> Result<Value, CliError> {
    let start = Instant::now();
    let traj = simulate(cfg, max_wall)?;
    out.write_csv(
        "trajectory.csv",
        &AUX_HEADER,
        traj.records.iter().map(|r| std::iter::once(r.t).chain(r.aux.to_row())),
    )?;
    let mut results = json!({
        "seed": cfg.seed,
        "final_t": traj.final_state.t,
        "cap_events": traj.cap_events,
        "rhs_evaluations": traj.rhs_evaluations,
    });
    if cfg.record_energies {
        out.write_csv(
            "energy.csv",
            &ENERGY_HEADER,
            traj.records.iter().filter_map(|r| {
                r.energies.map(|e| [r.t, e.kinetic, e.potential, e.total, r.momentum[0], r.momentum[1], r.momentum[2]])
            }),
        )?;
        let e0 = traj.records[0].energies.map(|e| e.total).unwrap_or(f64::NAN);
        let drift = traj
            .records
            .iter()
            .filter_map(|r| r.energies)
            .map(|e| ((e.total - e0) / e0).abs())
            .fold(0.0, f64::max);
        results["energy_drift_relative"] = json!(drift);
    }
    let p0 = traj.records[0].momentum;
    let p_drift = traj
        .records
        .iter()
        .flat_map(|r| (0..3).map(move |k| (r.momentum[k] - p0[k]).abs()))
        .fold(0.0, f64::max);
    results["momentum_drift"] = json!(p_drift);
    if cfg.mu > 0.0 {
        let t: Vec<f64> = traj.records.iter().map(|r| r.t).collect();
        let gap: Vec<f64> = traj.records.iter().map(|r| r.aux.temps.right - r.aux.temps.left).collect();
        let t0 = if cfg.t_end > 20.0 { 10.0 } else { cfg.t_end / 2.0 };
        if let Ok(g) = window_mean(&t, &gap, t0, cfg.t_end) {
            results["gap_window"] = json!([t0, cfg.t_end]);
            results["gap_mean"] = json!(g);
        }
        results["final_core_temperature"] = json!(traj.records.last().map(|r| r.aux.temps.core));
    }
    out.write_csv("snapshot_final.csv", &SNAPSHOT_HEADER, snapshot_rows(&traj.final_state, cfg.side))?;
    if cfg.record_snapshots {
        for (k, r) in traj.records.iter().enumerate() {
            if let Some(s) = &r.snapshot {
                out.write_csv(&format!("snapshots/snapshot_{k:05}.csv"), &SNAPSHOT_HEADER, snapshot_rows(s, cfg.side))?;
            }
        }
    }
    results["wall_time_s"] = json!(start.elapsed().as_secs_f64());
    Ok(results)
}

fn run_md(p: &MdParams, out: &mut OutputDir, opts: RunOptions) -> Result<Outcome, CliError> {
    let seeds = p.seed_list();
    if seeds.is_empty() {
        return Err(CliError::Schema("a seed is mandatory for MD experiments".into()));
    }
    if seeds.len() == 1 {
        let results = md_single(&p.sim_config(seeds[0]), out, opts.max_wall)?;
        return Ok(Outcome { summary: md_summary(&results), results });
    }
    let root = out.root().to_path_buf();
    let runs = fan_out(&seeds, opts.jobs, |&seed| -> Result<(Vec<FileEntry>, Value), CliError> {
        let mut dir = OutputDir::create(root.join(format!("seed_{seed}")))?;
        let v = md_single(&p.sim_config(seed), &mut dir, opts.max_wall)?;
        Ok((dir.files().to_vec(), v))
    });
    let mut per_seed = Vec::new();
    let mut summary = String::new();
    for (seed, run) in seeds.iter().zip(runs) {
        let (files, v) = run?;
        for f in files {
            out.record(FileEntry { path: format!("seed_{seed}/{}", f.path), ..f });
        }
        summary.push_str(&md_summary(&v));
        per_seed.push(v);
    }
    Ok(Outcome { summary, results: json!({ "runs": per_seed }) })
}

fn md_summary(v: &Value) -> String {
    let mut s = format!("seed {}: t = {}, cap events {}", v["seed"], v["final_t"], v["cap_events"]);
    if let Some(d) = v["energy_drift_relative"].as_f64() {
        s.push_str(&format!(", max relative energy drift {d:.3e}"));
    }
    if let Some(g) = v["gap_mean"].as_f64() {
        s.push_str(&format!(", mean Tr - Tl over {} = {g:.4}", v["gap_window"]));
    }
    s.push('\n');
    s
}

fn write_field(out: &mut OutputDir, rel: &str, f: &GridField<f64>) -> Result<(), CliError> {
    out.write_csv(rel, &["x", "value"], f.x.iter().zip(&f.values).map(|(x, v)| [*x, *v]))
}

fn run_heat(p: &HeatParams, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let (tl, tr) = (p.temp_left, p.temp_right);
    let fields = solve_heat_reference(&p.heat_config(), |_| tl, |_| tr, |x| p.initial_value(x))?;
    let mut times = Vec::new();
    for (k, f) in fields.iter().enumerate() {
        write_field(out, &format!("fields/field_{k:04}.csv"), f)?;
        times.push([k as f64, f.t]);
    }
    out.write_csv("times.csv", &["index", "t"], times)?;
    Ok(Outcome {
        summary: format!("{} field snapshots to t = {}\n", fields.len(), p.t_end),
        results: json!({ "snapshots": fields.len() }),
    })
}

fn run_patch(p: &PatchPdeParams, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let cfg = p.pde_config()?;
    let (tl, tr) = (p.temp_left, p.temp_right);
    let init = p.initial.unwrap_or((tl + tr) / 2.0);
    let run = solve_controlled_patch_pde(&cfg, |_| tl, |_| tr, |_| init)?;
    out.write_csv("core.csv", &["t", "core"], run.times.iter().zip(&run.core).map(|(t, c)| [*t, *c]))?;
    for (k, f) in run.fields.iter().enumerate() {
        write_field(out, &format!("fields/field_{k:04}.csv"), f)?;
    }
    write_field(out, "final_field.csv", &run.final_field)?;
    let (h, big_h) = (p.half_width, p.macro_half_width);
    let eq: Vec<[f64; 2]> =
        run.final_field.x.iter().map(|&x| [x, equilibrium_profile(x, p.mu, tl, tr, h, big_h)]).collect();
    let err = eq.iter().zip(&run.final_field.values).map(|(e, v)| (e[1] - v).abs()).fold(0.0, f64::max);
    out.write_csv("equilibrium.csv", &["x", "value"], eq)?;
    let core = *run.core.last().unwrap_or(&f64::NAN);
    Ok(Outcome {
        summary: format!("t = {}: core average {core:.8}, max |u - equilibrium| = {err:.3e}\n", run.final_field.t),
        results: json!({ "final_core": core, "max_error_vs_equilibrium": err }),
    })
}

fn run_multipatch(p: &MultipatchParams, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let cfg = p.pde_config()?;
    let ic = p.initial_fields(&cfg)?;
    let run = solve_multipatch_pde(&cfg, &ic)?;
    let mut header = vec!["t".to_string()];
    header.extend((1..=p.patches).map(|j| format!("U_{j}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = |times: &[f64], amps: &[Vec<f64>]| -> Vec<Vec<f64>> {
        times.iter().zip(amps).map(|(t, a)| std::iter::once(*t).chain(a.iter().copied()).collect()).collect()
    };
    out.write_csv("amplitudes.csv", &header, rows(&run.times, &run.amplitudes))?;
    let (mt, ma) = solve_macro_ode(&cfg, &run.amplitudes[0])?;
    out.write_csv("macro_amplitudes.csv", &header, rows(&mt, &ma))?;
    for (k, patches) in run.fields.iter().enumerate() {
        for (j, f) in patches.iter().enumerate() {
            write_field(out, &format!("fields/patch_{:02}_{k:04}.csv", j + 1), f)?;
        }
    }
    for (j, f) in run.final_fields.iter().enumerate() {
        write_field(out, &format!("final_patch_{:02}.csv", j + 1), f)?;
    }
    let last = run.amplitudes.last().cloned().unwrap_or_default();
    let macro_last = ma.last().cloned().unwrap_or_default();
    let diff = last.iter().zip(&macro_last).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(Outcome {
        summary: format!(
            "{} patches to t = {}: max |U_j - macro model| = {diff:.3e}\n",
            p.patches,
            run.times.last().copied().unwrap_or(0.0)
        ),
        results: json!({ "final_amplitudes": last, "max_difference_vs_macro": diff }),
    })
}

fn symmetry_name(s: Symmetry) -> &'static str {
    match s {
        Symmetry::Symmetric => "symmetric",
        Symmetry::Antisymmetric => "antisymmetric",
    }
}

fn run_modes(p: &ModesParams, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let factor = match p.factor {
        FactorSpec::Interpolated => CouplingFactor::Interpolated,
        FactorSpec::Unit => CouplingFactor::Unit,
    };
    let wanted: &[Symmetry] = match p.symmetry {
        SymmetrySpec::Both => &[Symmetry::Symmetric, Symmetry::Antisymmetric],
        SymmetrySpec::Symmetric => &[Symmetry::Symmetric],
        SymmetrySpec::Antisymmetric => &[Symmetry::Antisymmetric],
    };
    let mut roots: Vec<ModeRoot<f64>> = Vec::new();
    for &s in wanted {
        roots.extend(find_mode_roots_with(s, p.half_width, p.r, p.mu, p.diffusivity, p.count, factor)?);
    }
    out.write_csv(
        "modes.csv",
        &["symmetry", "branch", "k", "kh", "lambda"],
        roots.iter().map(|m| {
            [
                symmetry_name(m.symmetry).to_string(),
                format!("{:?}", m.branch).to_lowercase(),
                m.k.cell(),
                m.kh.cell(),
                m.lambda.cell(),
            ]
        }),
    )?;
    let mut summary = String::new();
    for m in &roots {
        summary.push_str(&format!("{:<13} kh = {:.10}  lambda = {:.6e}\n", symmetry_name(m.symmetry), m.kh, m.lambda));
    }
    Ok(Outcome { summary, results: json!({ "roots": roots.len() }) })
}

fn run_optimal_mu(out: &mut OutputDir) -> Result<Outcome, CliError> {
    let single: f64 = optimal_mu_single_patch();
    let (adv, diff): (f64, f64) = optimal_mu_multipatch();
    out.write_csv(
        "optimal_mu.csv",
        &["quantity", "value"],
        [
            ["single_patch".to_string(), single.cell()],
            ["single_patch_inverse".to_string(), (1.0 / single).cell()],
            ["multipatch_advection".to_string(), adv.cell()],
            ["multipatch_diffusion".to_string(), diff.cell()],
        ],
    )?;
    Ok(Outcome {
        summary: format!(
            "single patch:          mu = {single:.4} (1/mu = {:.5})\nmultipatch advection:  mu = {adv:.4}\nmultipatch diffusion:  mu = {diff}\n",
            1.0 / single
        ),
        results: json!({ "single_patch": single, "multipatch_advection": adv, "multipatch_diffusion": diff }),
    })
}

fn region_name(r: Region) -> &'static str {
    match r {
        Region::LeftAction => "left",
        Region::Core => "core",
        Region::RightAction => "right",
        Region::Buffer => "buffer",
    }
}

fn run_slow_manifold(p: &SlowManifoldParams, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let sm = construct_slow_manifold(p.alpha, p.diffusivity, p.mu, p.r, p.spacing)?;
    let regions = [Region::LeftAction, Region::Core, Region::RightAction, Region::Buffer];
    let mut rows = Vec::new();
    for order in ORDERS {
        for m in -1..=1 {
            for &region in &regions {
                if let Some(c) = sm.field.coefficients(order, m, region) {
                    let mut row = vec![order.gamma.to_string(), order.alpha.to_string(), m.to_string(), region_name(region).to_string()];
                    row.extend(c.iter().map(|v| v.cell()));
                    rows.push(row);
                }
            }
        }
    }
    out.write_csv("coefficients.csv", &["gamma_order", "alpha_order", "neighbor", "region", "c0", "c1", "c2", "c3", "c4"], rows)?;
    let (adv, diff) = equivalent_pde(&sm.stencil, p.spacing);
    out.write_csv(
        "stencil.csv",
        &["quantity", "value"],
        [
            ("a_adv", sm.stencil.a_adv),
            ("a_diff", sm.stencil.a_diff),
            ("advection_per_unit_alpha", sm.stencil.advection_per_unit_alpha),
            ("diffusion_per_unit_k", sm.stencil.diffusion_per_unit_k),
            ("equivalent_advection", adv),
            ("equivalent_diffusion", diff),
            ("condition_number", sm.condition),
        ]
        .map(|(k, v)| [k.to_string(), v.cell()]),
    )?;
    if p.samples > 1 {
        let n = p.samples;
        let rows = (0..n).map(|i| {
            let xi = -p.r + 2.0 * p.r * i as f64 / (n - 1) as f64;
            [xi, sm.field.evaluate(-1, xi, p.gamma, p.alpha), sm.field.evaluate(0, xi, p.gamma, p.alpha), sm.field.evaluate(1, xi, p.gamma, p.alpha)]
        });
        out.write_csv("fields.csv", &["xi", "v_minus", "v_zero", "v_plus"], rows)?;
    }
    Ok(Outcome {
        summary: format!(
            "a_adv = {:.10}, a_diff = {:.10}; equivalent PDE: advection {adv:.8}, diffusion {diff:.8}\n",
            sm.stencil.a_adv, sm.stencil.a_diff
        ),
        results: json!({
            "a_adv": sm.stencil.a_adv,
            "a_diff": sm.stencil.a_diff,
            "equivalent_advection": adv,
            "equivalent_diffusion": diff,
            "condition_number": sm.condition,
        }),
    })
}

fn run_estimate_k(p: &EstimateKParams, out: &mut OutputDir, opts: RunOptions) -> Result<Outcome, CliError> {
    let h = p.half_width.unwrap_or(0.5 * (p.atoms as f64).cbrt());
    let heuristic = estimate_diffusivity(h);
    let mut summary = format!("heuristic K = 4h^2/(9 pi^2) = {heuristic:.6} for h = {h}\n");
    let mut results = json!({ "half_width": h, "heuristic": heuristic });
    if p.seeds.is_empty() {
        return Ok(Outcome { summary, results });
    }
    let trajs = fan_out(&p.seeds, opts.jobs, |&seed| simulate(&p.sim_config(seed), opts.max_wall));
    let mut series = Vec::new();
    for t in trajs {
        series.push(gap_series(&t?, p.t_skip));
    }
    let fit = estimate_diffusivity_from_gap(&series, p.sample_interval, p.max_lag, h)?;
    let k3 = find_mode_roots(Symmetry::Antisymmetric, h, 1.0, p.mu, 1.0, 1)?[0].k;
    let k_root = fit.diffusivity_for(k3);
    out.write_csv("gap_acf.csv", &["lag", "acf"], fit.acf.iter().enumerate().map(|(i, a)| [i as f64 * fit.dt, *a]))?;
    let len = series.iter().map(Vec::len).min().unwrap_or(0);
    let mut header = vec!["t".to_string()];
    header.extend(p.seeds.iter().map(|s| format!("gap_seed_{s}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.write_csv(
        "gaps.csv",
        &header,
        (0..len).map(|i| {
            std::iter::once(p.t_skip + i as f64 * p.sample_interval).chain(series.iter().map(move |s| s[i]))
        }),
    )?;
    summary.push_str(&format!(
        "gap decay time {:.4}, rate {:.4}\nK with k3 h = 3 pi/2: {:.4}\nK with the computed antisymmetric root k3 = {k3:.6}: {k_root:.4}\n",
        fit.timescale, fit.rate, fit.diffusivity
    ));
    results["decay_time"] = json!(fit.timescale);
    results["decay_rate"] = json!(fit.rate);
    results["k_heuristic_wavenumber"] = json!(fit.diffusivity);
    results["k3"] = json!(k3);
    results["k_root_wavenumber"] = json!(k_root);
    Ok(Outcome { summary, results })
}
