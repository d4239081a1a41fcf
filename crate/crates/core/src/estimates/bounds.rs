//! Measured norms of interaction sources against their decay and boundedness estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::fit::{fit_decay_min, DecayFit};
use crate::grid::Grid;
use crate::nonlinearity::Nonlinearity;
use crate::serde_ext::maybe_inf;
use crate::solitons::decay_norm_constant;
use crate::train::functionals::{compute_a, compute_b, NormIndex};
use crate::train::{vstar_within, Train};

use super::norms::iso;
use super::sources::{centres_outside, source_grad_h, source_h, SourceField, SourceKind};

/// A fitted rate counts as meeting its target when it reaches this fraction of it.
pub const RATE_SLACK: f64 = 0.9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SliceBound {
    pub t: f64,
    pub norm_r: f64,
    pub norm_s: f64,
    pub sup: f64,
    /// `‖·‖_s^{s/r} ‖·‖_∞^{1-s/r}`.
    pub holder_rhs: f64,
    pub holder_ok: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RateCheck {
    pub norm: String,
    pub fit: DecayFit,
    /// Decay rate the estimate predicts.
    pub target: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: SourceKind,
    #[serde(with = "maybe_inf")]
    pub r: f64,
    pub s: f64,
    pub vstar: f64,
    pub slices: Vec<SliceBound>,
    pub holder_holds: bool,
    pub rates: Vec<RateCheck>,
    /// `sup_t ‖·‖_s` over the sampled times.
    pub sup_s: f64,
    /// The frequency sum the `s`-norm is compared with.
    pub s_scale: f64,
    /// `sup_s / s_scale`: the empirical constant.
    pub s_constant: f64,
    pub warnings: Vec<String>,
}

fn omegas(train: &Train) -> Vec<f64> {
    train.members.iter().map(|(sp, _)| sp.omega).collect()
}

fn powers(nl: &Nonlinearity) -> Vec<f64> {
    match nl.single_power() {
        Some((a, _)) => vec![a],
        None => nl.alphas().to_vec(),
    }
}

fn validate(train: &Train, times: &[f64], r: f64, s: f64) -> Result<f64> {
    if !(s > 0.0 && r > s) {
        return Err(Error::param("r/s", format!("need r > s > 0, got r = {r}, s = {s}")));
    }
    if times.len() < 3 {
        return Err(Error::InsufficientSamples { found: times.len(), needed: 3 });
    }
    let solitons: Vec<_> = train.members.iter().map(|(sp, _)| sp.clone()).collect();
    let vstar = vstar_within(&solitons);
    if !vstar.is_finite() {
        return Err(Error::Hypothesis("the group needs two solitons for a finite v_*".into()));
    }
    Ok(vstar)
}

fn slice(src: &SourceField, r: f64, s: f64) -> SliceBound {
    let abs = src.abs();
    let dv = src.grid().cell_volume();
    let norm_r = iso(&abs, dv, r);
    let norm_s = iso(&abs, dv, s);
    let sup = iso(&abs, dv, f64::INFINITY);
    let th = if r.is_infinite() { 0.0 } else { s / r };
    let holder_rhs = norm_s.powf(th) * sup.powf(1.0 - th);
    SliceBound { t: src.t, norm_r, norm_s, sup, holder_rhs, holder_ok: norm_r <= holder_rhs * (1.0 + 1e-12) }
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    kind: SourceKind,
    train: &Train,
    grid: &Grid,
    times: &[f64],
    r: f64,
    s: f64,
    vstar: f64,
    rate_inf: f64,
    s_scale: f64,
    eval: impl Fn(f64) -> Result<SourceField>,
) -> Result<BoundReport> {
    let mut slices = Vec::with_capacity(times.len());
    let mut warnings = Vec::new();
    for &t in times {
        let out = centres_outside(train, grid, t);
        if !out.is_empty() {
            warnings.push(format!("t = {t}: soliton centres {out:?} outside the box"));
        }
        slices.push(slice(&eval(t)?, r, s));
    }
    let window = Some((times[0], *times.last().unwrap()));
    let col = |f: fn(&SliceBound) -> f64| slices.iter().map(f).collect::<Vec<f64>>();
    let th = if r.is_infinite() { 0.0 } else { s / r };
    let mut rates = Vec::new();
    for (name, vals, target) in [("Linf", col(|b| b.sup), rate_inf), ("Lr", col(|b| b.norm_r), rate_inf * (1.0 - th))] {
        let fit = fit_decay_min(times, &vals, window, 3)?;
        rates.push(RateCheck { norm: name.into(), ok: fit.rate >= RATE_SLACK * target, fit, target });
    }
    let sup_s = slices.iter().fold(0.0f64, |m, b| m.max(b.norm_s));
    Ok(BoundReport {
        kind,
        r,
        s,
        vstar,
        holder_holds: slices.iter().all(|b| b.holder_ok),
        slices,
        rates,
        sup_s,
        s_scale,
        s_constant: sup_s / s_scale,
        warnings,
    })
}

/// `‖H‖_r` against `e^{-a(1-s/r)v_* t}`, `‖H‖_∞` against `e^{-a v_* t}`, the Hölder chain on
/// every slice, and `sup_t ‖H‖_s` against `Σ_i A_{(α_i+1)s}^{α_i+1}`.
#[allow(clippy::too_many_arguments)]
pub fn check_h0(train: &Train, nl: &Nonlinearity, grid: &Grid, times: &[f64], r: f64, s: f64, a: f64) -> Result<BoundReport> {
    let vstar = validate(train, times, r, s)?;
    let om = omegas(train);
    let alpha1 = nl.alphas()[0];
    let s_scale: f64 = powers(nl)
        .iter()
        .map(|al| compute_a(&om, &NormIndex::iso((al + 1.0) * s, train.dim), alpha1).powf(al + 1.0))
        .sum();
    assemble(SourceKind::HSingle, train, grid, times, r, s, vstar, a * vstar, s_scale, |t| source_h(train, nl, grid, t))
}

/// As [`check_h0`] for `∇H`, with rates reduced by `min(α₁, 1)` and `sup_t ‖∇H‖_s` against
/// `Σ_i A_{α_i q}^{α_i} B_p` where `1/q + 1/p = 1/s`.
#[allow(clippy::too_many_arguments)]
pub fn check_h1(train: &Train, nl: &Nonlinearity, grid: &Grid, times: &[f64], r: f64, s: f64, p: f64, q: f64, a: f64) -> Result<BoundReport> {
    let vstar = validate(train, times, r, s)?;
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    if (inv(p) + inv(q) - 1.0 / s).abs() > 1e-12 {
        return Err(Error::param("p/q", format!("1/{q} + 1/{p} must equal 1/{s}")));
    }
    let om = omegas(train);
    let jv: Vec<f64> = train.members.iter().map(|(sp, _)| sp.japanese_v()).collect();
    let alpha1 = nl.alphas()[0];
    let b = compute_b(&om, &jv, &NormIndex::iso(p, train.dim), alpha1);
    let s_scale: f64 = powers(nl)
        .iter()
        .map(|al| compute_a(&om, &NormIndex::iso(al * q, train.dim), alpha1).powf(*al) * b)
        .sum();
    let rate = a * alpha1.min(1.0) * vstar;
    assemble(SourceKind::GradH, train, grid, times, r, s, vstar, rate, s_scale, |t| source_grad_h(train, nl, grid, t))
}

/// `‖Σ_j |R_j|‖_p` (or `‖Σ_j |∇R_j|‖_p`) measured on the grid against `D_p A_p` (or `D_p B_p`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SumBound {
    #[serde(with = "maybe_inf")]
    pub p: f64,
    pub gradient: bool,
    pub measured: f64,
    pub d_p: f64,
    pub sum: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn soliton_sum_bound(train: &Train, grid: &Grid, t: f64, p: f64, a: f64, d_const: f64, alpha1: f64, gradient: bool) -> Result<SumBound> {
    if !(p > 0.0) {
        return Err(Error::param("p", "must be positive"));
    }
    let field = if gradient { train.grad_abs_sum(t, grid)? } else { train.abs_sum(t, grid)? };
    let abs: Vec<f64> = field.data.iter().map(|z| z.re).collect();
    let measured = iso(&abs, grid.cell_volume(), p);
    let d_p = decay_norm_constant(a, d_const, train.dim, p, None)?;
    let om = omegas(train);
    let idx = NormIndex::iso(p, train.dim);
    let sum = if gradient {
        let jv: Vec<f64> = train.members.iter().map(|(sp, _)| sp.japanese_v()).collect();
        compute_b(&om, &jv, &idx, alpha1)
    } else {
        compute_a(&om, &idx, alpha1)
    };
    let bound = d_p * sum;
    Ok(SumBound { p, gradient, measured, d_p, sum, bound, ratio: measured / bound })
}
