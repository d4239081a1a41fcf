//! Gagliardo–Nirenberg interpolation checks on error series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimates::norms::iso;
use crate::grid::{gradient_magnitude, Field, Spectral};
use crate::serde_ext::maybe_inf;

use super::strichartz::tail_norms;

/// `θ = (½ - 1/p)(½ + 1/d - 1/r)^{-1}`.
pub fn gn_theta(p: f64, r: f64, d: usize) -> f64 {
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    (0.5 - inv(p)) / (0.5 + 1.0 / d as f64 - inv(r))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GnReport {
    #[serde(with = "maybe_inf")]
    pub p: f64,
    #[serde(with = "maybe_inf")]
    pub r: f64,
    pub theta: f64,
    /// `‖η‖_p / (‖η‖₂^{1-θ} ‖∇η‖_r^θ)` per slice; slices with a vanishing denominator are skipped.
    pub ratios: Vec<f64>,
    /// Largest ratio: the empirical constant.
    pub constant: f64,
    /// Nonzero slices whose gradient norm vanishes, so that no finite constant exists.
    pub degenerate: usize,
}

/// Check `‖η‖_p <= G ‖η‖₂^{1-θ}‖∇η‖_r^θ` on every slice and report the smallest `G`.
pub fn gn_interpolate_check(series: &[Field], p: f64, r: f64) -> Result<GnReport> {
    let first = series.first().ok_or(Error::InsufficientSamples { found: 0, needed: 1 })?;
    let d = first.grid.dim();
    if !(r > d as f64) {
        return Err(Error::param("r", format!("need r > d = {d}, got {r}")));
    }
    if !(p >= 2.0) {
        return Err(Error::param("p", "need p >= 2"));
    }
    let theta = gn_theta(p, r, d);
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::param("p/r", format!("interpolation exponent {theta} outside [0, 1]")));
    }
    let spectral = Spectral::new(&first.grid);
    let mut ratios = Vec::with_capacity(series.len());
    let mut degenerate = 0;
    for f in series {
        first.grid.check_same(&f.grid)?;
        let dv = f.grid.cell_volume();
        let abs: Vec<f64> = f.data.iter().map(|z| z.norm_sqr().sqrt()).collect();
        let lhs = iso(&abs, dv, p);
        if lhs == 0.0 {
            continue;
        }
        let l2 = iso(&abs, dv, 2.0);
        let denom = if theta == 0.0 {
            l2
        } else {
            let gm = gradient_magnitude(&spectral.gradient(&f.grid, &f.data));
            l2.powf(1.0 - theta) * iso(&gm, dv, r).powf(theta)
        };
        // spectral noise counts as a vanishing gradient
        if denom <= 1e-14 * lhs {
            degenerate += 1;
            continue;
        }
        ratios.push(lhs / denom);
    }
    let constant = ratios.iter().copied().fold(0.0, f64::max);
    Ok(GnReport { p, r, theta, ratios, constant, degenerate })
}

/// `sup_t e^{λt} ‖η‖_{L^6_t L^∞_x([t, T])}` from per-node sup norms.
pub fn t6_constant(times: &[f64], sups: &[f64], lambda: f64) -> f64 {
    let tails = tail_norms(times, sups, 6.0);
    tails.iter().zip(times).fold(0.0, |m, (v, t)| m.max(v * (lambda * t).exp()))
}
