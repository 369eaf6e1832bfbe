//! JSON experiment documents and their translation into library configurations.

use std::path::PathBuf;

use patchkit::continuum::{ControlledPdeConfig, HeatConfig, STABILITY_LIMIT};
use patchkit::geometry::{MacroDomain, PatchGeometry};
use patchkit::md::{EmptyRegionPolicy, Integrator, SimConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One experiment, selected by its `kind` field.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    IsolatedMd(MdParams),
    ControlledMd(MdParams),
    HeatReference(HeatParams),
    ControlledPatchPde(PatchPdeParams),
    MultipatchPde(MultipatchParams),
    Modes(ModesParams),
    OptimalMu(OptimalMuParams),
    SlowManifold(SlowManifoldParams),
    EstimateK(EstimateKParams),
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Output directory; the command line `--out` takes precedence.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// Also write a gnuplot script next to the data.
    #[serde(default)]
    pub plot: bool,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(tag = "scheme", rename_all = "kebab-case", deny_unknown_fields)]
pub enum IntegratorSpec {
    Rk4 { dt: f64 },
    Adaptive { rtol: f64, atol: f64, initial_dt: f64 },
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        IntegratorSpec::Rk4 { dt: 0.002 }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum EmptyRegionSpec {
    #[default]
    Error,
    HoldLast,
}

fn d_atoms() -> usize {
    64
}
fn d_t_end() -> f64 {
    3.0
}
fn d_half() -> f64 {
    0.5
}
fn d_temp_left() -> f64 {
    0.5
}
fn d_temp_right() -> f64 {
    1.5
}
fn d_cap() -> f64 {
    100.0
}
fn d_guard() -> f64 {
    1e-8
}
fn d_floor() -> f64 {
    1e-6
}
fn d_interval() -> f64 {
    0.1
}
fn d_true() -> bool {
    true
}
fn d_one() -> f64 {
    1.0
}
fn d_mu() -> f64 {
    30.0
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MdParams {
    #[serde(default)]
    pub seed: Option<u64>,
    /// Several independent seeds; each writes into its own `seed_<n>` directory.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
    #[serde(default = "d_atoms")]
    pub atoms: usize,
    #[serde(default = "d_t_end")]
    pub t_end: f64,
    /// Cube side; defaults to `atoms^(1/3)` (unit density).
    #[serde(default)]
    pub side: Option<f64>,
    #[serde(default)]
    pub mu: f64,
    #[serde(default = "d_half")]
    pub diffusivity: f64,
    #[serde(default = "d_temp_left")]
    pub temp_left: f64,
    #[serde(default = "d_temp_right")]
    pub temp_right: f64,
    /// Distance `H` to the macroscale walls; defaults to the cube side.
    #[serde(default)]
    pub macro_half_width: Option<f64>,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    #[serde(default = "d_interval")]
    pub output_interval: f64,
    #[serde(default = "d_cap")]
    pub force_cap: f64,
    #[serde(default = "d_guard")]
    pub dist_guard: f64,
    #[serde(default = "d_floor")]
    pub temp_floor: f64,
    #[serde(default)]
    pub empty_region: EmptyRegionSpec,
    #[serde(default = "d_true")]
    pub record_energies: bool,
    /// Write a snapshot CSV at every output time, not just the final state.
    #[serde(default)]
    pub record_snapshots: bool,
    #[serde(default)]
    pub output: OutputSpec,
}

impl MdParams {
    /// Seeds to run, in order; empty when no seed was given.
    pub fn seed_list(&self) -> Vec<u64> {
        if !self.seeds.is_empty() {
            self.seeds.clone()
        } else {
            self.seed.into_iter().collect()
        }
    }

    pub fn sim_config(&self, seed: u64) -> SimConfig<f64> {
        let mut cfg = SimConfig::new(self.atoms, seed);
        if let Some(side) = self.side {
            cfg.side = side;
        }
        cfg.macro_half_width = self.macro_half_width.unwrap_or(cfg.side);
        cfg.t_end = self.t_end;
        cfg.mu = self.mu;
        cfg.diffusivity = self.diffusivity;
        cfg.temp_left = self.temp_left;
        cfg.temp_right = self.temp_right;
        cfg.integrator = match self.integrator {
            IntegratorSpec::Rk4 { dt } => Integrator::Rk4 { dt },
            IntegratorSpec::Adaptive { rtol, atol, initial_dt } => Integrator::Adaptive { rtol, atol, initial_dt },
        };
        cfg.output_interval = self.output_interval;
        cfg.force_cap = self.force_cap;
        cfg.dist_guard = self.dist_guard;
        cfg.temp_floor = self.temp_floor;
        cfg.empty_region = match self.empty_region {
            EmptyRegionSpec::Error => EmptyRegionPolicy::Error,
            EmptyRegionSpec::HoldLast => EmptyRegionPolicy::HoldLast,
        };
        cfg.record_energies = self.record_energies;
        cfg.record_snapshots = self.record_snapshots;
        cfg
    }

    /// Fills the geometry defaults in so the manifest shows resolved values.
    fn resolve(&mut self) {
        let side = self.side.unwrap_or_else(|| (self.atoms as f64).cbrt());
        self.side = Some(side);
        self.macro_half_width.get_or_insert(side);
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HeatInitial {
    /// The straight line between the two wall values.
    Linear,
    /// Linear profile plus `amplitude·sin(mode·π(x + H)/(2H))`.
    Sine { amplitude: f64, mode: u32 },
}

impl Default for HeatInitial {
    fn default() -> Self {
        HeatInitial::Sine { amplitude: 1.0, mode: 1 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HeatParams {
    #[serde(default = "d_half")]
    pub diffusivity: f64,
    pub macro_half_width: f64,
    /// Number of grid intervals across `[-H, H]`.
    pub n: usize,
    #[serde(default)]
    pub dt: Option<f64>,
    pub t_end: f64,
    #[serde(default = "d_interval")]
    pub output_interval: f64,
    #[serde(default = "d_temp_left")]
    pub temp_left: f64,
    #[serde(default = "d_temp_right")]
    pub temp_right: f64,
    #[serde(default)]
    pub initial: HeatInitial,
    #[serde(default)]
    pub output: OutputSpec,
}

impl HeatParams {
    pub fn heat_config(&self) -> HeatConfig<f64> {
        HeatConfig {
            diffusivity: self.diffusivity,
            big_h: self.macro_half_width,
            n: self.n,
            dt: self.dt,
            t_end: self.t_end,
            output_interval: self.output_interval,
        }
    }

    pub fn initial_value(&self, x: f64) -> f64 {
        let big_h = self.macro_half_width;
        let s = (x + big_h) / (2.0 * big_h);
        let line = self.temp_left + (self.temp_right - self.temp_left) * s;
        match self.initial {
            HeatInitial::Linear => line,
            HeatInitial::Sine { amplitude, mode } => line + amplitude * (f64::from(mode) * std::f64::consts::PI * s).sin(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PatchPdeParams {
    #[serde(default = "d_one")]
    pub diffusivity: f64,
    #[serde(default = "d_mu")]
    pub mu: f64,
    pub half_width: f64,
    pub macro_half_width: f64,
    /// Cells across the patch; a multiple of 8.
    pub n: usize,
    #[serde(default)]
    pub dt: Option<f64>,
    pub t_end: f64,
    #[serde(default = "d_interval")]
    pub output_interval: f64,
    #[serde(default = "d_temp_left")]
    pub temp_left: f64,
    #[serde(default = "d_temp_right")]
    pub temp_right: f64,
    /// Uniform initial temperature; defaults to the mean of the walls.
    #[serde(default)]
    pub initial: Option<f64>,
    #[serde(default = "d_true")]
    pub record_fields: bool,
    #[serde(default)]
    pub output: OutputSpec,
}

impl PatchPdeParams {
    pub fn pde_config(&self) -> Result<ControlledPdeConfig<f64>, CliError> {
        let geom = PatchGeometry::new(self.half_width, self.macro_half_width).map_err(CliError::from_lib)?;
        let domain = MacroDomain::Dirichlet { patches: 1, left: self.temp_left, right: self.temp_right };
        let mut cfg = ControlledPdeConfig::new(geom, domain, self.n);
        cfg.diffusivity = self.diffusivity;
        cfg.mu = self.mu;
        cfg.dt = self.dt;
        cfg.t_end = self.t_end;
        cfg.output_interval = self.output_interval;
        cfg.record_fields = self.record_fields;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    #[default]
    Periodic,
    Dirichlet,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MultipatchInitial {
    /// `offset + amplitude·sin(2π·mode·x/L)` sampled on every cell, `L = M·H`.
    Sine { amplitude: f64, mode: u32, #[serde(default)] offset: f64 },
    /// One constant per patch.
    Constant { values: Vec<f64> },
}

impl Default for MultipatchInitial {
    fn default() -> Self {
        MultipatchInitial::Sine { amplitude: 1.0, mode: 1, offset: 0.0 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MultipatchParams {
    #[serde(default = "d_one")]
    pub diffusivity: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "d_mu")]
    pub mu: f64,
    #[serde(default = "d_one")]
    pub gamma: f64,
    pub half_width: f64,
    /// Patch spacing `H`.
    pub spacing: f64,
    pub patches: usize,
    #[serde(default)]
    pub domain: DomainKind,
    /// Wall values for a Dirichlet domain.
    #[serde(default)]
    pub wall_left: f64,
    #[serde(default)]
    pub wall_right: f64,
    pub n: usize,
    #[serde(default)]
    pub dt: Option<f64>,
    pub t_end: f64,
    #[serde(default = "d_interval")]
    pub output_interval: f64,
    #[serde(default)]
    pub initial: MultipatchInitial,
    #[serde(default)]
    pub record_fields: bool,
    #[serde(default)]
    pub output: OutputSpec,
}

impl MultipatchParams {
    pub fn pde_config(&self) -> Result<ControlledPdeConfig<f64>, CliError> {
        let geom = PatchGeometry::new(self.half_width, self.spacing).map_err(CliError::from_lib)?;
        let domain = match self.domain {
            DomainKind::Periodic => MacroDomain::Periodic { patches: self.patches },
            DomainKind::Dirichlet => MacroDomain::Dirichlet {
                patches: self.patches,
                left: self.wall_left,
                right: self.wall_right,
            },
        };
        let mut cfg = ControlledPdeConfig::new(geom, domain, self.n);
        cfg.diffusivity = self.diffusivity;
        cfg.alpha = self.alpha;
        cfg.mu = self.mu;
        cfg.gamma = self.gamma;
        cfg.dt = self.dt;
        cfg.t_end = self.t_end;
        cfg.output_interval = self.output_interval;
        cfg.record_fields = self.record_fields;
        Ok(cfg)
    }

    /// Initial field of every patch on the cell centres of `cfg`.
    pub fn initial_fields(&self, cfg: &ControlledPdeConfig<f64>) -> Result<Vec<Vec<f64>>, CliError> {
        let m = self.patches;
        match &self.initial {
            MultipatchInitial::Constant { values } => {
                if values.len() != m {
                    return Err(CliError::Schema(format!(
                        "initial.values has {} entries for {m} patches",
                        values.len()
                    )));
                }
                Ok(patchkit::continuum::constant_patches(values, self.n))
            }
            MultipatchInitial::Sine { amplitude, mode, offset } => {
                let big_l = self.spacing * m as f64;
                let centres = cfg.cell_centres();
                Ok((1..=m)
                    .map(|j| {
                        let xj = cfg.domain.patch_center(j, self.spacing);
                        centres
                            .iter()
                            .map(|&x| {
                                offset + amplitude * (2.0 * std::f64::consts::PI * f64::from(*mode) * (xj + x) / big_l).sin()
                            })
                            .collect()
                    })
                    .collect())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetrySpec {
    #[default]
    Both,
    Symmetric,
    Antisymmetric,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum FactorSpec {
    #[default]
    Interpolated,
    Unit,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModesParams {
    pub half_width: f64,
    /// Ratio `r = h/H`.
    pub r: f64,
    pub mu: f64,
    #[serde(default = "d_one")]
    pub diffusivity: f64,
    pub count: usize,
    #[serde(default)]
    pub symmetry: SymmetrySpec,
    #[serde(default)]
    pub factor: FactorSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OptimalMuParams {
    #[serde(default)]
    pub output: OutputSpec,
}

fn d_samples() -> usize {
    201
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SlowManifoldParams {
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "d_one")]
    pub diffusivity: f64,
    pub mu: f64,
    pub r: f64,
    #[serde(default = "d_one")]
    pub spacing: f64,
    /// Points of the sampled basis-field table over one period; 0 skips it.
    #[serde(default = "d_samples")]
    pub samples: usize,
    /// `γ` at which the sampled fields are evaluated.
    #[serde(default = "d_one")]
    pub gamma: f64,
    #[serde(default)]
    pub output: OutputSpec,
}

fn d_k_atoms() -> usize {
    343
}
fn d_k_mu() -> f64 {
    3.0
}
fn d_k_t_end() -> f64 {
    40.0
}
fn d_k_skip() -> f64 {
    5.0
}
fn d_k_lag() -> f64 {
    4.0
}
fn d_k_interval() -> f64 {
    0.02
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateKParams {
    /// Patch half-width `h` for the heuristic; defaults to half the cube side.
    #[serde(default)]
    pub half_width: Option<f64>,
    /// Seeds of the weakly controlled runs; none means heuristic only.
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default = "d_k_atoms")]
    pub atoms: usize,
    #[serde(default = "d_k_mu")]
    pub mu: f64,
    #[serde(default = "d_k_t_end")]
    pub t_end: f64,
    /// Samples before this time are discarded as the start-up transient.
    #[serde(default = "d_k_skip")]
    pub t_skip: f64,
    #[serde(default = "d_k_lag")]
    pub max_lag: f64,
    #[serde(default = "d_k_interval")]
    pub sample_interval: f64,
    #[serde(default = "d_temp_left")]
    pub temp_left: f64,
    #[serde(default = "d_temp_right")]
    pub temp_right: f64,
    #[serde(default)]
    pub macro_half_width: Option<f64>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl EstimateKParams {
    pub fn sim_config(&self, seed: u64) -> SimConfig<f64> {
        let mut cfg = SimConfig::new(self.atoms, seed);
        cfg.mu = self.mu;
        cfg.t_end = self.t_end;
        cfg.temp_left = self.temp_left;
        cfg.temp_right = self.temp_right;
        cfg.macro_half_width = self.macro_half_width.unwrap_or(cfg.side);
        cfg.output_interval = self.sample_interval;
        cfg.record_energies = false;
        cfg
    }

    fn resolve(&mut self) {
        let side = (self.atoms as f64).cbrt();
        self.half_width.get_or_insert(side / 2.0);
        self.macro_half_width.get_or_insert(side);
    }
}

impl Experiment {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut exp: Experiment = serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        match &mut exp {
            Experiment::IsolatedMd(p) | Experiment::ControlledMd(p) => p.resolve(),
            Experiment::EstimateK(p) => p.resolve(),
            _ => {}
        }
        Ok(exp)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::IsolatedMd(_) => "isolated-md",
            Experiment::ControlledMd(_) => "controlled-md",
            Experiment::HeatReference(_) => "heat-reference",
            Experiment::ControlledPatchPde(_) => "controlled-patch-pde",
            Experiment::MultipatchPde(_) => "multipatch-pde",
            Experiment::Modes(_) => "modes",
            Experiment::OptimalMu(_) => "optimal-mu",
            Experiment::SlowManifold(_) => "slow-manifold",
            Experiment::EstimateK(_) => "estimate-k",
        }
    }

    pub fn output(&self) -> &OutputSpec {
        match self {
            Experiment::IsolatedMd(p) | Experiment::ControlledMd(p) => &p.output,
            Experiment::HeatReference(p) => &p.output,
            Experiment::ControlledPatchPde(p) => &p.output,
            Experiment::MultipatchPde(p) => &p.output,
            Experiment::Modes(p) => &p.output,
            Experiment::OptimalMu(p) => &p.output,
            Experiment::SlowManifold(p) => &p.output,
            Experiment::EstimateK(p) => &p.output,
        }
    }

    /// Replaces the seed of seeded kinds.
    pub fn override_seed(&mut self, seed: u64) {
        match self {
            Experiment::IsolatedMd(p) | Experiment::ControlledMd(p) => {
                p.seed = Some(seed);
                p.seeds.clear();
            }
            Experiment::EstimateK(p) => p.seeds = vec![seed],
            _ => {}
        }
    }

    /// Schema and physics checks that need no simulation; returns every violation.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut lib = |r: patchkit::Result<()>| {
            match r {
                Err(patchkit::Error::Config(msg)) => out.push(msg),
                Err(e) => out.push(e.to_string()),
                Ok(()) => {}
            }
        };
        match self {
            Experiment::IsolatedMd(p) | Experiment::ControlledMd(p) => {
                let seeds = p.seed_list();
                if seeds.is_empty() {
                    lib(Err(patchkit::Error::Config("a seed is mandatory for MD experiments".into())));
                }
                let isolated = matches!(self, Experiment::IsolatedMd(_));
                if isolated && p.mu != 0.0 {
                    lib(Err(patchkit::Error::Config("isolated-md requires mu = 0".into())));
                }
                if !isolated && !(p.mu > 0.0) {
                    lib(Err(patchkit::Error::Config("controlled-md requires mu > 0".into())));
                }
                lib(p.sim_config(seeds.first().copied().unwrap_or(0)).validate());
            }
            Experiment::HeatReference(p) => {
                let cfg = p.heat_config();
                if cfg.n < 2 {
                    lib(Err(patchkit::Error::Config("heat reference needs n >= 2 intervals".into())));
                } else if let Some(dt) = cfg.dt {
                    let limit = STABILITY_LIMIT * cfg.dx() * cfg.dx() / cfg.diffusivity;
                    if dt > limit {
                        lib(Err(patchkit::Error::Config(format!(
                            "dt = {dt} exceeds the explicit stability bound {limit:.6e}"
                        ))));
                    }
                }
                if !(p.t_end > 0.0 && p.diffusivity > 0.0 && p.macro_half_width > 0.0) {
                    lib(Err(patchkit::Error::Config("t_end, diffusivity and macro_half_width must be positive".into())));
                }
            }
            Experiment::ControlledPatchPde(p) => match p.pde_config() {
                Ok(cfg) => {
                    lib(cfg.validate());
                    lib(cfg.time_step().map(|_| ()));
                }
                Err(e) => out.push(e.to_string()),
            },
            Experiment::MultipatchPde(p) => match p.pde_config() {
                Ok(cfg) => {
                    lib(cfg.validate());
                    lib(cfg.time_step().map(|_| ()));
                    if let Err(e) = p.initial_fields(&cfg) {
                        out.push(e.to_string());
                    }
                }
                Err(e) => out.push(e.to_string()),
            },
            Experiment::Modes(p) => {
                if p.count == 0 {
                    lib(Err(patchkit::Error::Config("count must be at least 1".into())));
                }
                if !(p.half_width > 0.0 && p.mu > 0.0 && p.r > 0.0 && p.r <= 1.0) {
                    lib(Err(patchkit::Error::Config("need half_width > 0, mu > 0 and 0 < r <= 1".into())));
                }
            }
            Experiment::OptimalMu(_) => {}
            Experiment::SlowManifold(p) => {
                if !(p.mu > 0.0 && p.r > 0.0 && p.r <= 1.0 && p.spacing > 0.0) {
                    lib(Err(patchkit::Error::Config("need mu > 0, 0 < r <= 1 and spacing > 0".into())));
                }
            }
            Experiment::EstimateK(p) => {
                if let Some(&s) = p.seeds.first() {
                    lib(p.sim_config(s).validate());
                    if !(p.t_skip + p.max_lag < p.t_end) {
                        lib(Err(patchkit::Error::Config("t_skip + max_lag must be below t_end".into())));
                    }
                }
                if p.half_width.is_some_and(|h| !(h > 0.0)) {
                    lib(Err(patchkit::Error::Config("half_width must be positive".into())));
                }
            }
        }
        out
    }
}
