//! Backward Duhamel iteration for the error term `η` of a soliton train.
//!
//! All Picard levels advance together in one backward sweep over the time
//! nodes: at node `t_m` the level `n+1` value needs only the level `n` value at
//! the same node and the level `n+1` value at `t_{m+1}`, so one pass yields every
//! iterate without storing full space-time histories.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimates::norms::iso;
use crate::grid::{Field, Grid, C64, PAR_MIN};
use crate::nonlinearity::Nonlinearity;
use crate::serde_ext::maybe_inf;
use crate::train::{Theorem, TheoremPlan, Train};

use super::fit::{fit_decay, fit_decay_with_gradient, DecayFit, FIT_FLOOR};
use super::propagate::Propagator;
use super::strichartz::{defining_pairs, tail_norms};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardConfig {
    #[serde(default)]
    pub t0: f64,
    pub t_end: f64,
    /// Number of time steps on `[t0, t_end]`.
    pub n_time: usize,
    /// Number of Picard levels computed in the sweep.
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_contraction_tol")]
    pub contraction_tol: f64,
    #[serde(default = "default_ball")]
    pub ball_radius: f64,
    /// Keep `η` every this many nodes.
    #[serde(default = "default_store_every")]
    pub store_every: usize,
    /// Absolute sup-norm change below which the time grid counts as resolved.
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
    /// Maximum number of time-grid doublings.
    #[serde(default = "default_max_refine")]
    pub max_refine: usize,
    /// Weights for the contraction test; empty means scan multiples of `a v_*/4`.
    #[serde(default)]
    pub lambdas: Vec<f64>,
}

fn default_max_iter() -> usize {
    30
}
fn default_contraction_tol() -> f64 {
    1e-10
}
fn default_ball() -> f64 {
    1.0
}
fn default_store_every() -> usize {
    1
}
fn default_refine_tol() -> f64 {
    1e-3
}
fn default_max_refine() -> usize {
    3
}

impl PicardConfig {
    pub fn new(t0: f64, t_end: f64, n_time: usize) -> Self {
        PicardConfig {
            t0,
            t_end,
            n_time,
            max_iter: default_max_iter(),
            contraction_tol: default_contraction_tol(),
            ball_radius: default_ball(),
            store_every: default_store_every(),
            refine_tol: default_refine_tol(),
            max_refine: default_max_refine(),
            lambdas: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0 >= 0.0) {
            return Err(Error::param("t0", "must be nonnegative"));
        }
        if !(self.t_end > self.t0) {
            return Err(Error::param("t_end", "must exceed t0"));
        }
        if self.n_time < 8 {
            return Err(Error::param("n_time", "at least 8 nodes are required"));
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter", "must be positive"));
        }
        if self.store_every == 0 || self.n_time % self.store_every != 0 {
            return Err(Error::param("store_every", "must divide n_time"));
        }
        if !(self.contraction_tol > 0.0 && self.ball_radius > 0.0 && self.refine_tol > 0.0) {
            return Err(Error::param("tolerances", "must be positive"));
        }
        if self.lambdas.iter().any(|l| !(*l > 0.0)) {
            return Err(Error::param("lambdas", "must be positive"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.t_end - self.t0) / self.n_time as f64
    }
}

/// `λ ∈ {2, 5, 10} · a v_*/4`; the first entry is the primary weight.
pub fn lambda_scan(a: f64, vstar: f64) -> Vec<f64> {
    let base = if vstar.is_finite() { a * vstar / 4.0 } else { 1.0 };
    [2.0, 5.0, 10.0].iter().map(|k| k * base).collect()
}

/// Space-time norm used to measure distances between iterates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Surrogate {
    /// `sup_t e^{λt} ‖·‖_{L² ∩ L^∞}`.
    L2Linf,
    /// `sup_t (e^{λt}‖·‖₂ + e^{c₁λt}(‖∇·‖₂ + ‖∇·‖_r))`.
    H1W1r {
        c1: f64,
        #[serde(with = "maybe_inf")]
        r: f64,
    },
    /// `sup_t e^{λt} max(‖·‖_{L^∞_t L²}, ‖·‖_{L^q_t L^r})` over `[t, T]`.
    Strichartz {
        #[serde(with = "maybe_inf")]
        q: f64,
        #[serde(with = "maybe_inf")]
        r: f64,
    },
}

impl Surrogate {
    /// The norm matching the construction's function space on a `dim`-dimensional grid.
    pub fn for_plan(plan: &TheoremPlan, dim: usize) -> Result<Self> {
        match plan.theorem {
            Theorem::Single1 => Ok(Surrogate::L2Linf),
            Theorem::Single2 => {
                let c = &plan.chosen_exponents;
                match (c.c1, c.r) {
                    (Some(c1), Some(r)) => Ok(Surrogate::H1W1r { c1, r }),
                    _ => Err(Error::Inadmissible { theorem: plan.theorem.name().into(), violated: plan.violated_conditions.clone() }),
                }
            }
            _ => {
                let [_, top] = defining_pairs(dim)?;
                Ok(Surrogate::Strichartz { q: top.q(), r: top.r() })
            }
        }
    }

    pub fn r(&self) -> f64 {
        match self {
            Surrogate::L2Linf => f64::INFINITY,
            Surrogate::H1W1r { r, .. } | Surrogate::Strichartz { r, .. } => *r,
        }
    }

    fn needs_gradient(&self) -> bool {
        matches!(self, Surrogate::H1W1r { .. })
    }
}

/// What `η` is added to inside the nonlinearity, and what is subtracted.
pub enum Background<'a> {
    /// `W = T`, subtracted `Σ f(R_j)`.
    Train(&'a Train),
    /// `W = u_low + T`, subtracted `f(u_low) + Σ f(R_j)`, where `u_low` is a lower-dimensional
    /// solution sampled at every node time and embedded along the leading axes.
    Staged { lower: &'a [Field], train: &'a Train },
}

impl Background<'_> {
    fn eval(&self, node: usize, t: f64, grid: &Grid, nl: &Nonlinearity) -> Result<(Field, Field)> {
        match self {
            Background::Train(train) => Ok((train.field(t, grid)?, train.sum_of_f(nl, t, grid)?)),
            Background::Staged { lower, train } => {
                let low = lower.get(node).ok_or_else(|| Error::param("lower", format!("no lower solution at node {node}")))?;
                if (low.t - t).abs() > 1e-9 * (1.0 + t.abs()) {
                    return Err(Error::param("lower", format!("lower solution at t={} but node at t={t}", low.t)));
                }
                let ul = low.extend_to(grid)?;
                let mut w = train.field(t, grid)?;
                w.add_assign(&ul)?;
                let mut base = train.sum_of_f(nl, t, grid)?;
                let ful = Field { grid: grid.clone(), t, data: nl.apply(&ul.data) };
                base.add_assign(&ful)?;
                Ok((w, base))
            }
        }
    }

    fn train(&self) -> &Train {
        match self {
            Background::Train(t) => t,
            Background::Staged { train, .. } => train,
        }
    }
}

/// Norms of one field at one node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeNorms {
    pub l2: f64,
    pub sup: f64,
    /// `L^r` with the surrogate's `r`.
    pub lr: f64,
    pub grad_l2: f64,
    pub grad_lr: f64,
    pub grad_sup: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LambdaTrace {
    pub lambda: f64,
    /// Weighted distance between consecutive iterates, per level.
    pub distances: Vec<f64>,
    /// Ratios of consecutive distances up to convergence.
    pub factors: Vec<f64>,
    /// Number of iterations until the distance fell below tolerance.
    pub converged_at: Option<usize>,
    pub diverged: bool,
    /// Weighted size of the returned `η`.
    pub eta_norm: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PicardRun {
    pub grid: Grid,
    pub n_time: usize,
    pub step: f64,
    pub levels: usize,
    /// Node times, ascending.
    pub node_times: Vec<f64>,
    /// Norms of the final iterate at every node.
    pub node_norms: Vec<NodeNorms>,
    /// Final iterate at the stored nodes.
    #[serde(skip)]
    pub eta: Vec<Field>,
    /// `W + η` at the stored nodes, when requested.
    #[serde(skip)]
    pub solution: Vec<Field>,
    pub traces: Vec<LambdaTrace>,
    pub surrogate: Surrogate,
    /// Largest `|T| + |η|` on the box faces over the stored nodes.
    pub wraparound: f64,
    pub warnings: Vec<String>,
}

impl PicardRun {
    pub fn primary(&self) -> &LambdaTrace {
        &self.traces[0]
    }

    pub fn converged(&self) -> bool {
        self.primary().converged_at.is_some()
    }

    pub fn stored_times(&self) -> Vec<f64> {
        self.eta.iter().map(|f| f.t).collect()
    }

    /// Stored `η` nearest to time `t`.
    pub fn eta_at(&self, t: f64) -> Option<&Field> {
        self.eta.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }

    /// `S(t)` at every node: `max(sup_{τ>=t}‖η‖₂, ‖η‖_{L^q L^r([t,T])})`.
    pub fn strichartz_series(&self, qexp: f64) -> Vec<f64> {
        let l2: Vec<f64> = self.node_norms.iter().map(|n| n.l2).collect();
        let lr: Vec<f64> = self.node_norms.iter().map(|n| n.lr).collect();
        let a = tail_norms(&self.node_times, &l2, f64::INFINITY);
        let b = tail_norms(&self.node_times, &lr, qexp);
        a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect()
    }

    /// Fit window: from `t0 + 0.2 span` to the earlier of `t0 + 0.8 span` and the last node above the floor.
    pub fn fit_window(&self) -> (f64, f64) {
        let t0 = self.node_times[0];
        let span = self.node_times.last().unwrap() - t0;
        let last = self
            .node_times
            .iter()
            .zip(&self.node_norms)
            .filter(|(_, n)| n.l2 > FIT_FLOOR)
            .map(|(t, _)| *t)
            .fold(t0, f64::max);
        let tb = last.min(t0 + 0.8 * span);
        (t0 + 0.2 * (tb - t0), tb)
    }

    /// Decay fits of `‖η‖₂` (with the gradient ratio), `‖η‖_∞` and `‖η‖_r`.
    pub fn decay_fits(&self) -> Vec<(String, Result<DecayFit>)> {
        let w = Some(self.fit_window());
        let col = |f: fn(&NodeNorms) -> f64| self.node_norms.iter().map(f).collect::<Vec<f64>>();
        let t = &self.node_times;
        vec![
            ("L2".into(), fit_decay_with_gradient(t, &col(|n| n.l2), &col(|n| n.grad_l2), w)),
            ("Linf".into(), fit_decay(t, &col(|n| n.sup), w)),
            ("Lr".into(), fit_decay(t, &col(|n| n.lr), w)),
        ]
    }
}

/// Norms of one node; `L^r` norms are skipped when `r` is absent.
fn node_norms(u: &[C64], grid: &Grid, r: Option<f64>, grad: Option<&[Vec<C64>]>) -> NodeNorms {
    let abs: Vec<f64> = u.iter().map(|z| z.norm_sqr().sqrt()).collect();
    let dv = grid.cell_volume();
    let lr = |a: &[f64]| r.map_or(0.0, |r| iso(a, dv, r));
    let mut out = NodeNorms { l2: iso(&abs, dv, 2.0), sup: iso(&abs, dv, f64::INFINITY), lr: lr(&abs), ..Default::default() };
    if let Some(g) = grad {
        let gm = crate::grid::gradient_magnitude(g);
        out.grad_l2 = iso(&gm, dv, 2.0);
        out.grad_lr = lr(&gm);
        out.grad_sup = iso(&gm, dv, f64::INFINITY);
    }
    out
}

fn weighted_distance(sur: &Surrogate, lambda: f64, times: &[f64], norms: &[NodeNorms]) -> f64 {
    match sur {
        Surrogate::L2Linf => times
            .iter()
            .zip(norms)
            .fold(0.0, |m, (t, n)| m.max((lambda * t).exp() * n.l2.max(n.sup))),
        Surrogate::H1W1r { c1, .. } => times.iter().zip(norms).fold(0.0, |m, (t, n)| {
            m.max((lambda * t).exp() * n.l2 + (c1 * lambda * t).exp() * (n.grad_l2 + n.grad_lr))
        }),
        Surrogate::Strichartz { q, .. } => {
            let l2: Vec<f64> = norms.iter().map(|n| n.l2).collect();
            let lr: Vec<f64> = norms.iter().map(|n| n.lr).collect();
            let a = tail_norms(times, &l2, f64::INFINITY);
            let b = tail_norms(times, &lr, *q);
            times.iter().enumerate().fold(0.0, |m, (k, t)| m.max((lambda * t).exp() * a[k].max(b[k])))
        }
    }
}

fn trace_for(lambda: f64, sur: &Surrogate, cfg: &PicardConfig, times: &[f64], diffs: &[Vec<NodeNorms>], eta: &[NodeNorms]) -> LambdaTrace {
    let distances: Vec<f64> = diffs.iter().map(|d| weighted_distance(sur, lambda, times, d)).collect();
    let target = cfg.contraction_tol * cfg.ball_radius;
    let conv = distances.iter().position(|d| *d < target);
    let upto = conv.unwrap_or(distances.len());
    let factors: Vec<f64> = (1..upto.max(1)).filter(|&k| k < distances.len()).map(|k| distances[k] / distances[k - 1]).collect();
    let diverged = conv.is_none() && factors.windows(3).any(|w| w.iter().all(|f| *f >= 1.0));
    LambdaTrace {
        lambda,
        distances,
        factors,
        converged_at: conv.map(|n| n + 1),
        diverged,
        eta_norm: weighted_distance(sur, lambda, times, eta),
    }
}

fn par_map2(a: &[C64], b: &[C64], f: impl Fn(C64, C64) -> C64 + Sync + Send) -> Vec<C64> {
    if a.len() >= PAR_MIN {
        a.par_iter().zip(b.par_iter()).map(|(x, y)| f(*x, *y)).collect()
    } else {
        a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
    }
}

/// One backward sweep with `cfg.max_iter` levels on a fixed time grid.
pub fn picard_sweep(
    grid: &Grid,
    nl: &Nonlinearity,
    bg: &Background,
    sur: Surrogate,
    cfg: &PicardConfig,
    lambdas: &[f64],
    keep_solution: bool,
) -> Result<PicardRun> {
    cfg.validate()?;
    if lambdas.is_empty() {
        return Err(Error::param("lambdas", "at least one weight is required"));
    }
    let h = cfg.step();
    let nt = cfg.n_time;
    let levels = cfg.max_iter;
    let len = grid.len();
    let prop = Propagator::new(grid);
    let zero = vec![C64::new(0.0, 0.0); len];
    let ih2 = C64::new(0.0, 0.5 * h);
    let r = sur.r();
    let diff_r = (!matches!(sur, Surrogate::L2Linf)).then_some(r);

    // eta[n] and s_prev[n] hold level n at the previously visited node
    let mut eta: Vec<Vec<C64>> = vec![zero.clone(); levels + 1];
    let mut s_prev: Vec<Vec<C64>> = vec![zero.clone(); levels];
    let mut diffs: Vec<Vec<NodeNorms>> = vec![vec![NodeNorms::default(); nt + 1]; levels];
    let mut final_norms = vec![NodeNorms::default(); nt + 1];
    let mut stored = Vec::new();
    let mut solution = Vec::new();
    let mut wrap = 0.0f64;

    for m in (0..=nt).rev() {
        let t = cfg.t0 + m as f64 * h;
        let (w, base) = bg.eval(m, t, grid, nl)?;
        let mut s_cur: Vec<Vec<C64>> = Vec::with_capacity(levels);
        for n in 0..levels {
            // S_n = f(W + η^{(n)}) - base at this node, with η^{(n)} already updated
            let en = &eta[n];
            let mut s_n: Vec<C64> = if len >= PAR_MIN {
                (0..len).into_par_iter().map(|i| nl.eval_f(w.data[i] + en[i]) - base.data[i]).collect()
            } else {
                (0..len).map(|i| nl.eval_f(w.data[i] + en[i]) - base.data[i]).collect()
            };
            if m == nt {
                eta[n + 1].clone_from(&zero);
            } else {
                let mut next = par_map2(&eta[n + 1], &s_prev[n], |e, s| e - ih2 * s);
                prop.apply(&mut next, -h);
                let lvl = par_map2(&next, &s_n, |x, s| x - ih2 * s);
                eta[n + 1] = lvl;
            }
            if s_n.iter().any(|z| !z.is_finite()) || eta[n + 1].iter().any(|z| !z.is_finite()) {
                return Err(Error::NonFinite { step: m, t });
            }
            let d = par_map2(&eta[n + 1], &eta[n], |a, b| a - b);
            let grad = sur.needs_gradient().then(|| prop.spectral().gradient(grid, &d));
            diffs[n][m] = node_norms(&d, grid, diff_r, grad.as_deref());
            s_cur.push(std::mem::take(&mut s_n));
        }
        s_prev = s_cur;
        let fin = &eta[levels];
        let grad = prop.spectral().gradient(grid, fin);
        final_norms[m] = node_norms(fin, grid, Some(r), Some(&grad));
        if m % cfg.store_every == 0 {
            let ef = Field { grid: grid.clone(), t, data: fin.clone() };
            let top = bg.train().field(t, grid)?;
            wrap = wrap.max(boundary_max(&top, &ef));
            if keep_solution {
                let mut u = w.clone();
                u.add_assign(&ef)?;
                solution.push(u);
            }
            stored.push(ef);
        }
    }
    stored.reverse();
    solution.reverse();
    let node_times: Vec<f64> = (0..=nt).map(|m| cfg.t0 + m as f64 * h).collect();
    let traces: Vec<LambdaTrace> =
        lambdas.iter().map(|&l| trace_for(l, &sur, cfg, &node_times, &diffs, &final_norms)).collect();
    let mut warnings = Vec::new();
    if wrap > 1e-10 {
        warnings.push(format!("field reaches {wrap:.3e} on the box boundary"));
    }
    Ok(PicardRun {
        grid: grid.clone(),
        n_time: nt,
        step: h,
        levels,
        node_times,
        node_norms: final_norms,
        eta: stored,
        solution,
        traces,
        surrogate: sur,
        wraparound: wrap,
        warnings,
    })
}

/// Largest `|T| + |η|` over samples with an index on the box boundary.
fn boundary_max(top: &Field, eta: &Field) -> f64 {
    let g = &top.grid;
    (0..g.len())
        .filter(|&i| {
            let ix = g.unflatten(i);
            (0..g.dim()).any(|a| ix[a] == 0 || ix[a] == g.n[a] - 1)
        })
        .map(|i| top.data[i].norm_sqr().sqrt() + eta.data[i].norm_sqr().sqrt())
        .fold(0.0, f64::max)
}

/// Largest sup-norm difference of `η` at the stored times shared by two runs.
pub fn stored_change(coarse: &PicardRun, fine: &PicardRun) -> f64 {
    let mut change = 0.0f64;
    for c in &coarse.eta {
        if let Some(f) = fine.eta.iter().find(|f| (f.t - c.t).abs() < 1e-9 * (1.0 + c.t.abs())) {
            let d = c.data.iter().zip(&f.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            change = change.max(d);
        }
    }
    change
}

/// Refinement record of a construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Refinement {
    pub n_time: usize,
    pub change: Option<f64>,
}

/// Run `sweep` at `n_time`, doubling it until the stored `η` changes by less than `refine_tol`.
pub fn refine<R>(cfg: &PicardConfig, mut sweep: impl FnMut(&PicardConfig) -> Result<R>, change: impl Fn(&R, &R) -> f64) -> Result<(R, Vec<Refinement>)> {
    cfg.validate()?;
    let mut c = cfg.clone();
    let mut prev = sweep(&c)?;
    let mut history = vec![Refinement { n_time: c.n_time, change: None }];
    for _ in 0..cfg.max_refine {
        c.n_time *= 2;
        c.store_every *= 2;
        let next = sweep(&c)?;
        let d = change(&prev, &next);
        history.push(Refinement { n_time: c.n_time, change: Some(d) });
        prev = next;
        if d < cfg.refine_tol {
            break;
        }
    }
    Ok((prev, history))
}

/// Reject runs whose primary weight shows divergence.
pub fn check_divergence(run: &PicardRun) -> Result<()> {
    let p = run.primary();
    if p.diverged {
        return Err(Error::Divergence { factors: p.factors.clone() });
    }
    Ok(())
}
