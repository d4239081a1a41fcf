//! Experiment configuration: a TOML file with fixed sections, unknown keys rejected,
//! plus `section.key=value` overrides applied before validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimates::norms::GridNorm;
use crate::evolution::{PicardConfig, Scheme};
use crate::grid::Grid;
use crate::nonlinearity::Nonlinearity;
use crate::train::{gen_params, Directions, Group, NormIndex, ParamSchedule, PlanRequest, TrainSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub nonlinearity: NonlinearityCfg,
    #[serde(default)]
    pub decay: DecayCfg,
    #[serde(default)]
    pub schedule: Option<ScheduleCfg>,
    #[serde(default)]
    pub groups: Vec<Group>,
    #[serde(default)]
    pub grids: Vec<GridCfg>,
    #[serde(default)]
    pub solver: SolverCfg,
    #[serde(default)]
    pub outputs: OutputsCfg,
    #[serde(default)]
    pub ground_state: Option<GroundStateCfg>,
    #[serde(default)]
    pub norms: Option<NormsCfg>,
    #[serde(default)]
    pub estimates: Option<EstimatesCfg>,
    #[serde(default)]
    pub nodecay: Option<NoDecayCfg>,
    #[serde(default)]
    pub appendix_b: Option<AppendixBCfg>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearityCfg {
    pub alpha1: f64,
    /// Defaults to `alpha1`.
    #[serde(default)]
    pub alpha2: Option<f64>,
    #[serde(default)]
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayCfg {
    pub a: f64,
    #[serde(rename = "D")]
    pub d_const: f64,
    /// Upper frequency bound; defaults to the schedule's, else twice the largest frequency.
    pub omega_star: Option<f64>,
}

impl Default for DecayCfg {
    fn default() -> Self {
        DecayCfg { a: 0.9, d_const: 4.0 * std::f64::consts::SQRT_2, omega_star: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleCfg {
    pub rho: f64,
    pub gamma_speed: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub omega_star: f64,
    #[serde(default = "one")]
    pub dim: usize,
    #[serde(default = "alternating")]
    pub directions: Directions,
}

fn one() -> usize {
    1
}

fn alternating() -> Directions {
    Directions::Alternating
}

impl ScheduleCfg {
    pub fn schedule(&self) -> ParamSchedule {
        ParamSchedule { rho: self.rho, gamma_speed: self.gamma_speed, delta: self.delta, n: self.n, omega_star: self.omega_star }
    }
}

/// Uniform periodic box `[-half_width, half_width)` per axis with `n` points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCfg {
    pub n: Vec<usize>,
    pub half_width: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverCfg {
    pub dt: f64,
    /// Split-step steps for `evolve`; defaults to `(T_end - t0)/dt`.
    pub steps: Option<usize>,
    /// Record norms every this many steps.
    pub record_every: usize,
    pub scheme: Scheme,
    pub t0: f64,
    #[serde(rename = "T_end")]
    pub t_end: f64,
    pub n_time: usize,
    pub store_every: usize,
    pub max_iter: usize,
    pub contraction_tol: f64,
    pub ball_radius: f64,
    pub refine_tol: f64,
    pub max_refine: usize,
    pub lambda_targets: Vec<f64>,
    pub bound_state_tol: f64,
}

impl Default for SolverCfg {
    fn default() -> Self {
        let p = PicardConfig::new(0.0, 5.0, 1000);
        SolverCfg {
            dt: 1e-3,
            steps: None,
            record_every: 100,
            scheme: Scheme::default(),
            t0: p.t0,
            t_end: p.t_end,
            n_time: p.n_time,
            store_every: 10,
            max_iter: p.max_iter,
            contraction_tol: p.contraction_tol,
            ball_radius: p.ball_radius,
            refine_tol: p.refine_tol,
            max_refine: p.max_refine,
            lambda_targets: Vec::new(),
            bound_state_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputsCfg {
    pub directory: String,
    pub formats: Vec<Format>,
}

impl Default for OutputsCfg {
    fn default() -> Self {
        OutputsCfg { directory: "out".into(), formats: vec![Format::Json, Format::Csv] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Nlsf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundStateCfg {
    /// `(dim, omega)` pairs; defaults to every distinct pair of the train.
    #[serde(default)]
    pub states: Vec<(usize, f64)>,
    #[serde(default)]
    pub certify: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsCfg {
    pub indices: Vec<NormIndex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatesCfg {
    pub r: f64,
    pub s: f64,
    /// Exponents for the gradient check, `1/p + 1/q = 1/s`; skipped when absent.
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    pub t_start: f64,
    pub t_stop: f64,
    pub samples: usize,
    /// Exponents of `‖Σ|R_j|‖_p` checked at `t_start`.
    #[serde(default)]
    pub sum_bound_p: Vec<f64>,
}

impl EstimatesCfg {
    pub fn times(&self) -> Vec<f64> {
        let n = self.samples.max(2);
        (0..n).map(|k| self.t_start + (self.t_stop - self.t_start) * k as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoDecayCfg {
    pub t: f64,
    pub x_lower: Vec<f64>,
    pub dir: Vec<f64>,
    pub s_max: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppendixBCfg {
    pub m: f64,
    pub a: f64,
    pub p: f64,
    pub q: f64,
    pub eps: Vec<f64>,
    #[serde(default = "unit")]
    pub amp: f64,
}

fn unit() -> f64 {
    1.0
}

fn de_error(e: toml::de::Error) -> Error {
    let msg = e.message().to_string();
    // the offending key is the first back-quoted word in serde's messages
    let field = msg.split('`').nth(1).unwrap_or("config").to_string();
    Error::Config { field, reason: msg }
}

/// Apply one `section.key=value` override; the value is read as TOML, else as a string.
pub fn apply_override(doc: &mut toml::Table, spec: &str) -> Result<()> {
    let (path, raw) = spec.split_once('=').ok_or_else(|| Error::config(spec, "override must look like section.key=value"))?;
    let path = path.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let mut keys: Vec<&str> = path.split('.').collect();
    let last = keys.pop().filter(|k| !k.is_empty()).ok_or_else(|| Error::config(path, "empty key"))?;
    let mut table = doc;
    for k in keys {
        table = table
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::config(path, format!("`{k}` is not a section")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Table = text.parse().map_err(de_error)?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: ExperimentConfig = doc.try_into().map_err(de_error)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, overrides)
    }

    fn validate(&self) -> Result<()> {
        self.nonlinearity(1).map_err(|e| Error::config("nonlinearity", e.to_string()))?;
        if self.schedule.is_some() && !self.groups.is_empty() {
            return Err(Error::config("schedule", "give either [schedule] or [[groups]], not both"));
        }
        for (k, g) in self.grids.iter().enumerate() {
            Grid::new(g.n.clone(), g.half_width.clone()).map_err(|e| Error::config(&format!("grids[{k}]"), e.to_string()))?;
        }
        if !(self.solver.dt > 0.0) {
            return Err(Error::config("solver.dt", "must be positive"));
        }
        if self.solver.record_every == 0 {
            return Err(Error::config("solver.record_every", "must be positive"));
        }
        if !(self.solver.bound_state_tol > 0.0) {
            return Err(Error::config("solver.bound_state_tol", "must be positive"));
        }
        self.picard().validate().map_err(|e| match e {
            Error::Param { name, reason } => Error::config(&format!("solver.{name}"), reason),
            e => e,
        })?;
        Ok(())
    }

    pub fn alphas(&self) -> (f64, f64) {
        let a1 = self.nonlinearity.alpha1;
        (a1, self.nonlinearity.alpha2.unwrap_or(a1))
    }

    pub fn nonlinearity(&self, dim: usize) -> Result<Nonlinearity> {
        let (a1, a2) = self.alphas();
        Nonlinearity::new(a1, a2, self.nonlinearity.c, dim)
    }

    /// The soliton groups, generated from the schedule when one is given.
    pub fn groups(&self) -> Result<Vec<Group>> {
        if let Some(s) = &self.schedule {
            let solitons = gen_params(&s.schedule(), s.dim, &s.directions).map_err(|e| Error::config("schedule", e.to_string()))?;
            return Ok(vec![Group { dim: s.dim, solitons }]);
        }
        if self.groups.is_empty() {
            return Err(Error::config("groups", "no solitons: give [schedule] or [[groups]]"));
        }
        Ok(self.groups.clone())
    }

    pub fn train_spec(&self) -> Result<TrainSpec> {
        let groups = self.groups()?;
        let omega_star = match (self.decay.omega_star, &self.schedule) {
            (Some(w), _) => w,
            (None, Some(s)) => s.omega_star,
            (None, None) => 2.0 * groups.iter().flat_map(|g| g.solitons.iter().map(|s| s.omega)).fold(0.0, f64::max),
        };
        TrainSpec::new(groups, self.decay.a, self.decay.d_const, omega_star).map_err(|e| match e {
            Error::Param { name, reason } => Error::config(&name, reason),
            e => Error::config("groups", e.to_string()),
        })
    }

    pub fn plan_request(&self, spec: &TrainSpec) -> PlanRequest {
        let (alpha1, alpha2) = self.alphas();
        PlanRequest { dims: spec.dims(), alpha1, alpha2, t0: self.solver.t0, rho_ball: self.solver.ball_radius }
    }

    /// One grid per group, lowest dimension first.
    pub fn grids(&self, spec: &TrainSpec) -> Result<Vec<Grid>> {
        if self.grids.len() != spec.groups.len() {
            return Err(Error::config("grids", format!("{} grids for {} groups", self.grids.len(), spec.groups.len())));
        }
        let mut out = Vec::new();
        for (k, (g, group)) in self.grids.iter().zip(&spec.groups).enumerate() {
            let grid = Grid::new(g.n.clone(), g.half_width.clone()).map_err(|e| Error::config(&format!("grids[{k}]"), e.to_string()))?;
            if grid.dim() != group.dim {
                return Err(Error::config(&format!("grids[{k}]"), format!("dimension {} for a {}-dimensional group", grid.dim(), group.dim)));
            }
            out.push(grid);
        }
        Ok(out)
    }

    pub fn picard(&self) -> PicardConfig {
        let s = &self.solver;
        PicardConfig {
            t0: s.t0,
            t_end: s.t_end,
            n_time: s.n_time,
            max_iter: s.max_iter,
            contraction_tol: s.contraction_tol,
            ball_radius: s.ball_radius,
            store_every: s.store_every,
            refine_tol: s.refine_tol,
            max_refine: s.max_refine,
            lambdas: s.lambda_targets.clone(),
        }
    }

    /// Norm indices for `norms`: the configured list, else `L^1`, `L^2`, `L^∞` per group dimension.
    pub fn norm_indices(&self, spec: &TrainSpec) -> Vec<NormIndex> {
        match &self.norms {
            Some(n) => n.indices.clone(),
            None => spec
                .dims()
                .into_iter()
                .flat_map(|d| [1.0, 2.0, f64::INFINITY].map(|p| NormIndex::iso(p, d)))
                .collect(),
        }
    }

    pub fn wants(&self, f: Format) -> bool {
        self.outputs.formats.contains(&f)
    }
}

/// Norms recorded in time series: `L²` and `L^∞`.
pub fn series_norms() -> [GridNorm; 2] {
    [GridNorm::lp(2.0), GridNorm::lp(f64::INFINITY)]
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[nonlinearity]
alpha1 = 2.0

[[groups]]
dim = 1
[[groups.solitons]]
omega = 1.0
v = [2.0]
x0 = [0.0]

[[grids]]
n = [256]
half_width = [20.0]
"#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::parse(BASE, &[]).unwrap();
        assert_eq!(c.alphas(), (2.0, 2.0));
        assert_eq!(c.solver.scheme, Scheme::Yoshida4);
        let spec = c.train_spec().unwrap();
        assert_eq!(spec.omega_star, 2.0);
        assert_eq!(c.grids(&spec).unwrap()[0].n, vec![256]);
    }

    #[test]
    fn unknown_keys_name_the_field() {
        let e = ExperimentConfig::parse(&format!("{BASE}\n[solver]\nt_ned = 3.0\n"), &[]).unwrap_err();
        match e {
            Error::Config { field, .. } => assert_eq!(field, "t_ned"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn overrides() {
        let c = ExperimentConfig::parse(BASE, &["solver.T_end=2.5".into(), "decay.a=0.5".into(), "seed=7".into()]).unwrap();
        assert_eq!((c.solver.t_end, c.decay.a, c.seed), (2.5, 0.5, 7));
        let c = ExperimentConfig::parse(BASE, &["solver.scheme=strang".into()]).unwrap();
        assert_eq!(c.solver.scheme, Scheme::Strang);
        assert!(ExperimentConfig::parse(BASE, &["solver.dt=-1".into()]).is_err());
        assert!(ExperimentConfig::parse(BASE, &["nonsense".into()]).is_err());
    }

    #[test]
    fn schedule_generates_groups() {
        let text = "[nonlinearity]\nalpha1 = 2.0\n[schedule]\nrho = 0.25\ngamma_speed = 5.0\nN = 3\nomega_star = 16.0\n";
        let c = ExperimentConfig::parse(text, &[]).unwrap();
        let spec = c.train_spec().unwrap();
        assert_eq!(spec.groups[0].solitons.len(), 3);
        assert_eq!(spec.vstar(), 10.0);
    }
}
