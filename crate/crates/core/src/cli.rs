//! Command line front end: one subcommand per experiment, artifacts written to the output directory.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Format};
use crate::error::{Error, Result};
use crate::estimates::{appendix_b, check_h0, check_h1, demonstrate_nodecay, soliton_sum_bound};
use crate::evolution::{forward_deviation, picard_construct, Construction, Surrogate};
use crate::evolution::SplitStep;
use crate::grid::{Field, C64};
use crate::io::{write_bound_state, write_field, write_norm_csv, NormRow, RunReport};
use crate::train::functionals::norm_report;
use crate::train::{plan_construction, BoundStateCache, Train};

pub const THREADS_ENV: &str = "NLS_TRAINS_THREADS";

#[derive(Parser, Debug)]
#[command(name = "nls-trains", version, about = "Soliton trains of nonlinear Schrödinger equations")]
pub struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a config value, `section.key=value`; repeatable.
    #[arg(long = "set", global = true)]
    pub overrides: Vec<String>,
    /// Output directory; overrides `outputs.directory`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for sampled quantities; overrides `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; falls back to the environment variable, then to all cores.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Solve the profile equation and write bound-state tables.
    GroundState,
    /// Frequency sums A, B and the separation speed of the train.
    Norms,
    /// Generate soliton parameters from the geometric schedule.
    ParamsGen,
    /// Split-step evolution of the train.
    Evolve,
    /// Interaction-source estimates on a time grid.
    Estimates,
    /// Backward fixed-point construction for a single group.
    Picard,
    /// Staged construction for several groups of different dimensions.
    Mixed,
    /// The anisotropic-norm counterexample.
    #[command(name = "appendixB")]
    AppendixB,
    /// Summarise every JSON report in the output directory.
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::GroundState => "ground-state",
            Command::Norms => "norms",
            Command::ParamsGen => "params-gen",
            Command::Evolve => "evolve",
            Command::Estimates => "estimates",
            Command::Picard => "picard",
            Command::Mixed => "mixed",
            Command::AppendixB => "appendixB",
            Command::Report => "report",
        }
    }
}

/// Entry point of the binary; returns the process exit status.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

struct Ctx {
    cfg: ExperimentConfig,
    out: PathBuf,
    written: Vec<PathBuf>,
}

impl Ctx {
    fn report(&self, cmd: Command) -> Result<RunReport> {
        let config = serde_json::to_value(&self.cfg).map_err(|e| Error::Format(e.to_string()))?;
        Ok(RunReport::new(cmd.name(), self.cfg.seed, config))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write_json(&mut self, name: &str, rep: &RunReport) -> Result<()> {
        if self.cfg.wants(Format::Json) {
            let p = self.path(name);
            rep.write(&p)?;
            self.written.push(p);
        }
        Ok(())
    }

    fn write_csv(&mut self, name: &str, rows: &[NormRow]) -> Result<()> {
        if self.cfg.wants(Format::Csv) && !rows.is_empty() {
            let p = self.path(name);
            write_norm_csv(BufWriter::new(File::create(&p)?), rows)?;
            self.written.push(p);
        }
        Ok(())
    }

    fn write_nlsf(&mut self, name: &str, u: &Field) -> Result<()> {
        if self.cfg.wants(Format::Nlsf) {
            let p = self.path(name);
            write_field(BufWriter::new(File::create(&p)?), u)?;
            self.written.push(p);
        }
        Ok(())
    }
}

/// Run one subcommand and return the artifact paths.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::config("--threads", "must be positive"));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if cli.command == Command::Report {
        let dir = match (&cli.out, &cli.config) {
            (Some(d), _) => d.clone(),
            (None, Some(c)) => PathBuf::from(ExperimentConfig::load(c, &cli.overrides)?.outputs.directory),
            (None, None) => return Err(Error::config("--out", "report needs --out or --config")),
        };
        return report(&dir);
    }
    let path = cli.config.as_ref().ok_or_else(|| Error::config("--config", "a config file is required"))?;
    let mut cfg = ExperimentConfig::load(path, &cli.overrides)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.outputs.directory));
    std::fs::create_dir_all(&out)?;
    let mut ctx = Ctx { cfg, out, written: Vec::new() };
    let outcome = match cli.command {
        Command::GroundState => ground_state(&mut ctx),
        Command::Norms => norms(&mut ctx),
        Command::ParamsGen => params_gen(&mut ctx),
        Command::Evolve => evolve(&mut ctx),
        Command::Estimates => estimates(&mut ctx),
        Command::Picard => construct(&mut ctx, Command::Picard),
        Command::Mixed => construct(&mut ctx, Command::Mixed),
        Command::AppendixB => counterexample(&mut ctx),
        Command::Report => unreachable!(),
    };
    match outcome {
        Ok(()) => Ok(ctx.written),
        Err(e) if e.exit_code() == 3 => {
            let p = ctx.path(&format!("{}_divergence.json", cli.command.name()));
            let factors = match &e {
                Error::Divergence { factors } => json!(factors),
                _ => Value::Null,
            };
            let trace = json!({ "subcommand": cli.command.name(), "error": e.to_string(), "factors": factors });
            std::fs::write(&p, serde_json::to_string_pretty(&trace).unwrap_or_default() + "\n")?;
            eprintln!("divergence trace written to {}", p.display());
            Err(e)
        }
        Err(e) => Err(e),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn cache(ctx: &Ctx) -> Result<BoundStateCache> {
    Ok(BoundStateCache::new(ctx.cfg.nonlinearity(1)?, ctx.cfg.solver.bound_state_tol))
}

fn ground_state(ctx: &mut Ctx) -> Result<()> {
    let cfg = &ctx.cfg;
    let gs = cfg.ground_state.clone().unwrap_or(crate::config::GroundStateCfg { states: Vec::new(), certify: false });
    let states: Vec<(usize, f64)> = if gs.states.is_empty() {
        let set: BTreeSet<(usize, u64)> =
            cfg.groups()?.iter().flat_map(|g| g.solitons.iter().map(move |s| (g.dim, s.omega.to_bits()))).collect();
        set.into_iter().map(|(d, w)| (d, f64::from_bits(w))).collect()
    } else {
        gs.states.clone()
    };
    let cache = cache(ctx)?;
    let mut results = Vec::new();
    let mut residuals = Vec::new();
    for (dim, omega) in states {
        let bs = cache.get(dim, omega)?;
        let name = format!("bound_state_d{dim}_w{omega}.txt");
        let p = ctx.path(&name);
        write_bound_state(BufWriter::new(File::create(&p)?), &bs)?;
        ctx.written.push(p);
        let cert = if gs.certify { Some(to_value(&bs.certify_decay(ctx.cfg.decay.a, ctx.cfg.decay.d_const)?)) } else { None };
        residuals.push(json!({ "dim": dim, "omega": omega, "residual": bs.residual }));
        results.push(json!({
            "dim": dim,
            "omega": omega,
            "method": to_value(&bs.method),
            "peak": bs.peak(),
            "r_max": bs.r_max(),
            "n_samples": bs.phi.len(),
            "table": name,
            "certificate": cert,
            "minimal_D": bs.minimal_decay_constant(ctx.cfg.decay.a),
        }));
    }
    let mut rep = ctx.report(Command::GroundState)?;
    rep.residuals = Value::Array(residuals);
    rep.results = Value::Array(results);
    ctx.write_json("ground-state.json", &rep)
}

fn norms(ctx: &mut Ctx) -> Result<()> {
    let spec = ctx.cfg.train_spec()?;
    let idx = ctx.cfg.norm_indices(&spec);
    let nr = norm_report(&spec, &idx, ctx.cfg.alphas().0)?;
    let mut rep = ctx.report(Command::Norms)?;
    rep.plan = to_value(&plan_construction(&ctx.cfg.plan_request(&spec)));
    rep.schedule = to_value(&ctx.cfg.schedule);
    rep.results = json!({ "norms": to_value(&nr), "vstar": finite_or_string(spec.vstar()) });
    ctx.write_json("norms.json", &rep)
}

fn finite_or_string(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(crate::serde_ext::fmt_f64(x))
    }
}

fn params_gen(ctx: &mut Ctx) -> Result<()> {
    let sc = ctx.cfg.schedule.clone().ok_or_else(|| Error::config("schedule", "params-gen needs a [schedule] section"))?;
    let sch = sc.schedule();
    let spec = ctx.cfg.train_spec()?;
    let mut rep = ctx.report(Command::ParamsGen)?;
    rep.schedule = to_value(&sc);
    rep.results = json!({
        "omegas": sch.omegas(),
        "speeds": sch.speeds(),
        "solitons": to_value(&spec.groups[0].solitons),
        "vstar": finite_or_string(spec.vstar()),
    });
    ctx.write_json("params-gen.json", &rep)
}

fn evolve(ctx: &mut Ctx) -> Result<()> {
    let spec = ctx.cfg.train_spec()?;
    let grids = ctx.cfg.grids(&spec)?;
    let grid = grids.last().unwrap().clone();
    let cache = cache(ctx)?;
    let trains = spec.groups.iter().map(|g| Train::build(g, &cache)).collect::<Result<Vec<_>>>()?;
    let exact = |t: f64| -> Result<Field> {
        let mut u = Field::zeros(&grid, t);
        for tr in &trains {
            u.add_assign(&tr.field(t, &grid)?)?;
        }
        Ok(u)
    };
    let s = &ctx.cfg.solver;
    let steps = s.steps.unwrap_or(((s.t_end - s.t0) / s.dt).round() as usize).max(1);
    let nl = ctx.cfg.nonlinearity(grid.dim())?;
    let ss = SplitStep::new(&grid, nl, s.scheme);
    let u0 = exact(s.t0)?;
    let mut rows = Vec::new();
    let summary = ss.evolve(&u0, s.dt, steps, s.record_every, |_, u| {
        let err = u.sub(&exact(u.t)?)?.l2();
        rows.push(NormRow::new(u.t, "L2", 2.0, None, u.l2()));
        rows.push(NormRow::new(u.t, "Linf", f64::INFINITY, None, u.sup()));
        rows.push(NormRow::new(u.t, "err_L2", 2.0, None, err));
        Ok(())
    })?;
    let fin = &summary.final_field;
    let reference = exact(fin.t)?;
    let l2_error = fin.sub(&reference)?.l2() / reference.l2();
    let mut rep = ctx.report(Command::Evolve)?;
    rep.plan = to_value(&plan_construction(&ctx.cfg.plan_request(&spec)));
    rep.grid = to_value(&grid);
    rep.residuals = json!({ "l2_error": l2_error, "max_mass_drift": summary.max_mass_drift });
    rep.results = json!({ "l2_error": l2_error, "max_mass_drift": summary.max_mass_drift, "steps": steps, "t_final": fin.t });
    rep.warnings = summary.warnings.clone();
    ctx.write_csv("evolve.csv", &rows)?;
    ctx.write_nlsf("evolve_final.nlsf", fin)?;
    ctx.write_json("evolve.json", &rep)
}

fn estimates(ctx: &mut Ctx) -> Result<()> {
    let ec = ctx.cfg.estimates.clone().ok_or_else(|| Error::config("estimates", "the estimates subcommand needs an [estimates] section"))?;
    let spec = ctx.cfg.train_spec()?;
    let grids = ctx.cfg.grids(&spec)?;
    let cache = cache(ctx)?;
    let times = ec.times();
    let mut rows = Vec::new();
    let mut results = Vec::new();
    let mut warnings = Vec::new();
    for (g, grid) in spec.groups.iter().zip(&grids) {
        let train = Train::build(g, &cache)?;
        let nl = ctx.cfg.nonlinearity(g.dim)?;
        let mut entry = json!({ "dim": g.dim });
        let sums = ec
            .sum_bound_p
            .iter()
            .map(|&p| soliton_sum_bound(&train, grid, ec.t_start, p, spec.a, spec.d_const, nl.alpha1, false))
            .collect::<Result<Vec<_>>>()?;
        entry["sum_bounds"] = to_value(&sums);
        if g.solitons.len() >= 2 {
            let h0 = check_h0(&train, &nl, grid, &times, ec.r, ec.s, spec.a)?;
            for b in &h0.slices {
                rows.push(NormRow::new(b.t, &format!("H_Lr_d{}", g.dim), ec.r, None, b.norm_r));
                rows.push(NormRow::new(b.t, &format!("H_Ls_d{}", g.dim), ec.s, None, b.norm_s));
                rows.push(NormRow::new(b.t, &format!("H_Linf_d{}", g.dim), f64::INFINITY, None, b.sup));
            }
            warnings.extend(h0.warnings.iter().cloned());
            entry["h0"] = to_value(&h0);
            if let (Some(p), Some(q)) = (ec.p, ec.q) {
                let h1 = check_h1(&train, &nl, grid, &times, ec.r, ec.s, p, q, spec.a)?;
                for b in &h1.slices {
                    rows.push(NormRow::new(b.t, &format!("gradH_Lr_d{}", g.dim), ec.r, None, b.norm_r));
                    rows.push(NormRow::new(b.t, &format!("gradH_Linf_d{}", g.dim), f64::INFINITY, None, b.sup));
                }
                entry["h1"] = to_value(&h1);
            }
        }
        results.push(entry);
    }
    let mut rep = ctx.report(Command::Estimates)?;
    rep.plan = to_value(&plan_construction(&ctx.cfg.plan_request(&spec)));
    rep.grid = to_value(&grids);
    rep.schedule = to_value(&ctx.cfg.schedule);
    rep.results = Value::Array(results);
    rep.warnings = warnings;
    ctx.write_csv("estimates.csv", &rows)?;
    ctx.write_json("estimates.json", &rep)
}

fn construct(ctx: &mut Ctx, cmd: Command) -> Result<()> {
    let spec = ctx.cfg.train_spec()?;
    match (cmd, spec.groups.len()) {
        (Command::Picard, n) if n != 1 => return Err(Error::config("groups", format!("picard takes one group, got {n}; use mixed"))),
        (Command::Mixed, 1) => return Err(Error::config("groups", "mixed needs at least two groups; use picard")),
        _ => {}
    }
    if let (Command::Mixed, Some(nd)) = (cmd, &ctx.cfg.nodecay) {
        let (e, d) = (spec.groups[0].dim, spec.groups[1].dim);
        if nd.x_lower.len() != e || d <= e || nd.dir.len() != d - e {
            return Err(Error::config("nodecay", format!("x_lower needs {e} and dir {} coordinates", d.saturating_sub(e))));
        }
    }
    let plan = plan_construction(&ctx.cfg.plan_request(&spec));
    if !plan.admissible {
        return Err(Error::Inadmissible { theorem: plan.theorem.name().into(), violated: plan.violated_conditions.clone() });
    }
    let grids = ctx.cfg.grids(&spec)?;
    let cache = cache(ctx)?;
    let cfg = ctx.cfg.picard();
    let c = picard_construct(&spec, &plan, &cfg, &grids, &cache)?;
    let mut rep = ctx.report(cmd)?;
    fill_construction(&mut rep, &c, &grids);
    rep.plan = to_value(&plan);
    rep.schedule = to_value(&ctx.cfg.schedule);
    let top = c.top();
    let mut results = json!({
        "lambdas": c.lambdas,
        "refinements": to_value(&c.refinements),
        "stages": c.stages.iter().map(|s| json!({
            "dim": s.dim,
            "n_time": s.run.n_time,
            "levels": s.run.levels,
            "surrogate": to_value(&s.run.surrogate),
            "traces": to_value(&s.run.traces),
            "fits": s.run.decay_fits().into_iter().map(|(k, f)| json!({ "norm": k, "fit": f.ok().map(|f| to_value(&f)) })).collect::<Vec<_>>(),
            "wraparound": s.run.wraparound,
        })).collect::<Vec<_>>(),
    });
    if cmd == Command::Picard {
        let nl = ctx.cfg.nonlinearity(top.grid.dim())?;
        let span = cfg.t_end - cfg.t0;
        let dev = forward_deviation(&top.solution, &nl, ctx.cfg.solver.scheme, ctx.cfg.solver.dt, cfg.t0 + 0.8 * span)?;
        results["forward_deviation"] = json!(dev);
    }
    if cmd == Command::Mixed {
        if let Some(nd) = ctx.cfg.nodecay.clone() {
            let lower = Train::build(&spec.groups[0], &cache)?;
            let upper = Train::build(&spec.groups[1], &cache)?;
            let nl = ctx.cfg.nonlinearity(upper.dim)?;
            let eta = c.stages[0].run.eta_at(nd.t).map_or(C64::new(0.0, 0.0), |f| value_near(f, &nd.x_lower));
            let n = nd.samples.max(2);
            let s: Vec<f64> = (0..n).map(|k| nd.s_max * k as f64 / (n - 1) as f64).collect();
            let r = demonstrate_nodecay(&lower, &upper, &nl, nd.t, &nd.x_lower, &nd.dir, &s, eta)?;
            results["nodecay"] = to_value(&r);
        }
    }
    rep.results = results;
    let mut rows = Vec::new();
    for s in &c.stages {
        let r = s.run.surrogate.r();
        for (t, n) in s.run.node_times.iter().zip(&s.run.node_norms) {
            rows.push(NormRow::new(*t, &format!("eta_L2_d{}", s.dim), 2.0, None, n.l2));
            rows.push(NormRow::new(*t, &format!("eta_Linf_d{}", s.dim), f64::INFINITY, None, n.sup));
            rows.push(NormRow::new(*t, &format!("eta_Lr_d{}", s.dim), r, None, n.lr));
        }
        if let Surrogate::Strichartz { q, .. } = s.run.surrogate {
            for (t, v) in s.run.node_times.iter().zip(s.run.strichartz_series(q)) {
                rows.push(NormRow::new(*t, &format!("eta_S_d{}", s.dim), q, Some(r), v));
            }
        }
    }
    ctx.write_csv(&format!("{}.csv", cmd.name()), &rows)?;
    if let Some(e0) = top.eta.first() {
        ctx.write_nlsf(&format!("{}_eta_t0.nlsf", cmd.name()), e0)?;
    }
    if let Some(u0) = top.solution.first() {
        ctx.write_nlsf(&format!("{}_solution_t0.nlsf", cmd.name()), u0)?;
    }
    ctx.write_json(&format!("{}.json", cmd.name()), &rep)
}

/// Sample of `f` at the grid point nearest to `x` (leading coordinates).
fn value_near(f: &Field, x: &[f64]) -> C64 {
    let g = &f.grid;
    let mut idx = 0;
    for a in 0..g.dim() {
        let h = g.spacing(a);
        let i = (((x.get(a).copied().unwrap_or(0.0) + g.half_width[a]) / h).round() as usize).min(g.n[a] - 1);
        idx = idx * g.n[a] + i;
    }
    f.data[idx]
}

fn fill_construction(rep: &mut RunReport, c: &Construction, grids: &[crate::grid::Grid]) {
    let top = c.top();
    let fits = top.decay_fits();
    let l2 = fits.iter().find(|(k, _)| k == "L2").and_then(|(_, f)| f.as_ref().ok());
    rep.grid = to_value(&grids);
    rep.lambda_hat = l2.and_then(|f| f.lambda_hat);
    rep.c1_hat = l2.and_then(|f| f.c1_hat);
    rep.contraction_factors = c
        .stages
        .iter()
        .map(|s| json!({ "dim": s.dim, "factors": s.run.traces.iter().map(|t| json!({ "lambda": t.lambda, "factors": t.factors })).collect::<Vec<_>>() }))
        .collect();
    rep.residuals = json!({
        "fits": fits.iter().map(|(k, f)| json!({ "norm": k, "residual": f.as_ref().ok().map(|f| f.residual) })).collect::<Vec<_>>(),
        "refinement_changes": c.refinements.iter().map(|r| r.change).collect::<Vec<_>>(),
    });
    rep.wraparound = Some(c.stages.iter().map(|s| s.run.wraparound).fold(0.0, f64::max));
    rep.warnings = c.stages.iter().flat_map(|s| s.run.warnings.iter().cloned()).collect();
}

fn counterexample(ctx: &mut Ctx) -> Result<()> {
    let ab = ctx.cfg.appendix_b.clone().ok_or_else(|| Error::config("appendix_b", "appendixB needs an [appendix_b] section"))?;
    let r = appendix_b(ab.m, ab.a, ab.p, ab.q, &ab.eps, ab.amp)?;
    let mut rows = Vec::new();
    for (k, e) in r.eps.iter().enumerate() {
        // the cutoff plays the role of the series variable
        rows.push(NormRow::new(*e, "aniso", ab.p, Some(ab.q), r.aniso[k]));
        rows.push(NormRow::new(*e, "iso_p", ab.p, None, r.iso_p[k]));
        rows.push(NormRow::new(*e, "iso_q", ab.q, None, r.iso_q[k]));
    }
    let mut rep = ctx.report(Command::AppendixB)?;
    rep.results = to_value(&r);
    ctx.write_csv("appendixB.csv", &rows)?;
    ctx.write_json("appendixB.json", &rep)
}

/// Collect every run report in `dir` into `summary.json` and `summary.csv`.
pub fn report(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .filter(|p| p.file_name().is_some_and(|n| n != "summary.json" && !n.to_string_lossy().ends_with("_divergence.json")))
        .collect();
    files.sort();
    let mut table = Vec::new();
    for f in &files {
        let r = RunReport::read(f)?;
        table.push(json!({
            "file": f.file_name().unwrap().to_string_lossy(),
            "subcommand": r.subcommand,
            "seed": r.seed,
            "lambda_hat": r.lambda_hat,
            "c1_hat": r.c1_hat,
            "wraparound": r.wraparound,
            "warnings": r.warnings.len(),
        }));
    }
    let json_path = dir.join("summary.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&table).map_err(|e| Error::Format(e.to_string()))? + "\n")?;
    let csv_path = dir.join("summary.csv");
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(&csv_path)?;
    w.write_record(["file", "subcommand", "seed", "lambda_hat", "c1_hat", "wraparound", "warnings"])?;
    let cell = |v: &Value| match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        v => v.to_string(),
    };
    for row in &table {
        w.write_record(["file", "subcommand", "seed", "lambda_hat", "c1_hat", "wraparound", "warnings"].map(|k| cell(&row[k])))?;
        println!("{}", ["file", "subcommand", "lambda_hat", "wraparound"].map(|k| cell(&row[k])).join("\t"));
    }
    w.flush()?;
    Ok(vec![json_path, csv_path])
}
