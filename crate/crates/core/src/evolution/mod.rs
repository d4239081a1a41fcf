//! Time evolution: the free flow, split-step integration, space-time norms and
//! the backward fixed-point construction of soliton-train errors.

pub mod fit;
pub mod gn;
pub mod picard;
pub mod propagate;
pub mod strichartz;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::train::{BoundStateCache, Theorem, TheoremPlan, Train, TrainSpec};

pub use fit::{fit_decay, DecayFit};
pub use picard::{lambda_scan, Background, PicardConfig, PicardRun, Surrogate};
pub use propagate::{free_propagate, nls_residual, Scheme, SplitStep};
pub use strichartz::{choose_n1_exponents, defining_pairs, strichartz_norm, StrichartzPair};

/// One stage of a construction: the group's dimension and its Picard run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Stage {
    pub dim: usize,
    pub run: PicardRun,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Construction {
    pub plan: TheoremPlan,
    pub lambdas: Vec<f64>,
    /// Stages from the lowest dimension up; the last one carries the full solution.
    pub stages: Vec<Stage>,
    pub refinements: Vec<picard::Refinement>,
}

impl Construction {
    pub fn top(&self) -> &PicardRun {
        &self.stages.last().unwrap().run
    }
}

/// Run one stage; mixed constructions need the lower-dimensional solution at every node.
#[allow(clippy::too_many_arguments)]
pub fn picard_stage(
    train: &Train,
    lower: Option<&[Field]>,
    plan: &TheoremPlan,
    cfg: &PicardConfig,
    grid: &Grid,
    cache: &BoundStateCache,
    lambdas: &[f64],
    keep_solution: bool,
) -> Result<PicardRun> {
    let nl = cache.nonlinearity().in_dim(grid.dim())?;
    let bg = match (lower, plan.theorem) {
        (Some(l), _) => Background::Staged { lower: l, train },
        (None, Theorem::Single1 | Theorem::Single2) => Background::Train(train),
        (None, _) if train.dim == 1 => Background::Train(train),
        (None, t) => return Err(Error::param("lower", format!("{} needs the lower-dimensional solution", t.name()))),
    };
    let sur = if train.dim == 1 && lower.is_none() && !matches!(plan.theorem, Theorem::Single1 | Theorem::Single2) {
        // the bottom stage of a mixed construction
        Surrogate::for_plan(&TheoremPlan { theorem: Theorem::Single1, ..plan.clone() }, 1)?
    } else {
        Surrogate::for_plan(plan, grid.dim())?
    };
    picard::picard_sweep(grid, &nl, &bg, sur, cfg, lambdas, keep_solution)
}

/// Full construction for `spec` under `plan`: one grid per dimension group, lowest first.
/// The time grid is doubled until the stored errors stop changing.
pub fn picard_construct(
    spec: &TrainSpec,
    plan: &TheoremPlan,
    cfg: &PicardConfig,
    grids: &[Grid],
    cache: &BoundStateCache,
) -> Result<Construction> {
    if !plan.admissible {
        return Err(Error::Inadmissible { theorem: plan.theorem.name().into(), violated: plan.violated_conditions.clone() });
    }
    if grids.len() != spec.groups.len() {
        return Err(Error::param("grids", format!("{} grids for {} groups", grids.len(), spec.groups.len())));
    }
    for (g, grid) in spec.groups.iter().zip(grids) {
        if g.dim != grid.dim() {
            return Err(Error::Dimension { expected: g.dim, got: grid.dim() });
        }
    }
    let trains = spec.groups.iter().map(|g| Train::build(g, cache)).collect::<Result<Vec<_>>>()?;
    let lambdas = if cfg.lambdas.is_empty() { lambda_scan(spec.a, spec.vstar()) } else { cfg.lambdas.clone() };
    let last = trains.len() - 1;
    // levels past convergence on the coarse grid add nothing on the finer ones
    let levels = std::cell::Cell::new(cfg.max_iter);
    let sweep = |c: &PicardConfig| -> Result<Vec<Stage>> {
        let mut stages: Vec<Stage> = Vec::with_capacity(trains.len());
        let mut needed = Some(0);
        for (k, (train, grid)) in trains.iter().zip(grids).enumerate() {
            let mut ck = c.clone();
            ck.max_iter = levels.get();
            if k < last {
                ck.store_every = 1;
            }
            let lower = stages.last().map(|s| s.run.solution.as_slice());
            let run = picard_stage(train, lower, plan, &ck, grid, cache, &lambdas, true)?;
            picard::check_divergence(&run)?;
            needed = needed.zip(run.primary().converged_at).map(|(a, b)| a.max(b));
            // only the next stage reads the lower solution
            if let Some(prev) = stages.last_mut() {
                prev.run.solution.clear();
                prev.run.eta.retain(|f| {
                    let m = ((f.t - c.t0) / c.step()).round() as usize;
                    m % c.store_every == 0
                });
            }
            stages.push(Stage { dim: train.dim, run });
        }
        if let Some(n) = needed {
            levels.set(levels.get().min(n + 2));
        }
        Ok(stages)
    };
    let change = |a: &Vec<Stage>, b: &Vec<Stage>| {
        a.iter().zip(b).map(|(x, y)| picard::stored_change(&x.run, &y.run)).fold(0.0, f64::max)
    };
    let (stages, refinements) = picard::refine(cfg, sweep, change)?;
    Ok(Construction { plan: plan.clone(), lambdas, stages, refinements })
}

/// Integrate forward from the first stored solution with the split-step scheme and
/// return the largest `L²` distance to the stored solutions up to `t_max`.
pub fn forward_deviation(solution: &[Field], nl: &crate::Nonlinearity, scheme: Scheme, dt: f64, t_max: f64) -> Result<f64> {
    let first = solution.first().ok_or(Error::InsufficientSamples { found: 0, needed: 1 })?;
    let ss = SplitStep::new(&first.grid, nl.in_dim(first.grid.dim())?, scheme);
    let mut u = first.clone();
    let mut worst = 0.0f64;
    for target in solution.iter().skip(1).take_while(|f| f.t <= t_max + 1e-9) {
        let span = target.t - u.t;
        let steps = (span / dt).round().max(1.0) as usize;
        u = ss.evolve(&u, span / steps as f64, steps, steps, |_, _| Ok(()))?.final_field;
        worst = worst.max(u.sub(target)?.l2());
    }
    Ok(worst)
}
