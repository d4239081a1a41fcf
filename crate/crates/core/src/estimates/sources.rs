//! Interaction sources evaluated pointwise from the soliton closures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{gradient_magnitude, Field, Grid, C64};
use crate::nonlinearity::Nonlinearity;
use crate::train::Train;

use super::norms::{abs_norm, GridNorm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// `f(T) - Σ f(R_j)` within one group.
    HSingle,
    /// `f(T_e + η_e + T_d) - f(T_e + η_e) - f(T_d)`.
    H1Mixed,
    /// `f(T_d) - Σ f(R_{d;j})` on the mixed grid.
    H2Mixed,
    /// `f(W + η) - f(W)`.
    G,
    GradH,
    GradG,
    /// `f(T_e + T_d) - Σ f(R_{e;k}) - Σ f(R_{d;j})`, without the lower error.
    Uncorrected,
}

impl SourceKind {
    pub fn is_gradient(self) -> bool {
        matches!(self, SourceKind::GradH | SourceKind::GradG)
    }
}

/// A source on a grid: one field, or one per axis for gradients.
#[derive(Clone, Debug)]
pub struct SourceField {
    pub kind: SourceKind,
    pub t: f64,
    pub components: Vec<Field>,
}

impl SourceField {
    pub fn grid(&self) -> &Grid {
        &self.components[0].grid
    }

    /// Pointwise modulus, or gradient magnitude for gradient kinds.
    pub fn abs(&self) -> Vec<f64> {
        if self.components.len() == 1 {
            self.components[0].data.iter().map(|z| z.norm_sqr().sqrt()).collect()
        } else {
            let raw: Vec<Vec<C64>> = self.components.iter().map(|c| c.data.clone()).collect();
            gradient_magnitude(&raw)
        }
    }

    pub fn norm(&self, norm: &GridNorm) -> Result<f64> {
        abs_norm(&self.abs(), self.grid(), norm)
    }
}

fn grad_f(nl: &Nonlinearity, w: C64, dw: C64) -> C64 {
    let p = nl.eval_wirtinger(w);
    p.fz * dw + p.fzbar * dw.conj()
}

fn check_grid(train: &Train, grid: &Grid) -> Result<()> {
    if grid.dim() < train.dim {
        return Err(Error::Dimension { expected: train.dim, got: grid.dim() });
    }
    Ok(())
}

/// Indices of solitons whose centre at `t` lies outside the box; their mass is missed by grid norms.
pub fn centres_outside(train: &Train, grid: &Grid, t: f64) -> Vec<usize> {
    train
        .members
        .iter()
        .enumerate()
        .filter(|(_, (sp, _))| {
            (0..train.dim).any(|a| (sp.x0[a] + sp.v[a] * t).abs() > grid.half_width[a])
        })
        .map(|(j, _)| j)
        .collect()
}

/// `H = f(T) - Σ f(R_j)`.
pub fn source_h(train: &Train, nl: &Nonlinearity, grid: &Grid, t: f64) -> Result<SourceField> {
    check_grid(train, grid)?;
    let m = &train.members;
    let field = Field::from_fn(grid, t, |x| {
        let mut total = C64::new(0.0, 0.0);
        let mut sum_f = C64::new(0.0, 0.0);
        for (sp, bs) in m {
            let r = bs.soliton_at(sp, t, &x);
            total += r;
            sum_f += nl.eval_f(r);
        }
        nl.eval_f(total) - sum_f
    });
    Ok(SourceField { kind: SourceKind::HSingle, t, components: vec![field] })
}

/// `H₂ = f(T_d) - Σ f(R_{d;j})` for the top group, on a grid of at least its dimension.
pub fn source_h2(upper: &Train, nl: &Nonlinearity, grid: &Grid, t: f64) -> Result<SourceField> {
    let mut s = source_h(upper, nl, grid, t)?;
    s.kind = SourceKind::H2Mixed;
    Ok(s)
}

/// `∇H = ∇f(T) - Σ ∇f(R_j)` by the chain rule on exact soliton gradients.
pub fn source_grad_h(train: &Train, nl: &Nonlinearity, grid: &Grid, t: f64) -> Result<SourceField> {
    check_grid(train, grid)?;
    let d = grid.dim();
    let per: Vec<(Field, Vec<Field>)> =
        train.members.iter().map(|(sp, bs)| bs.soliton_with_gradient(sp, t, grid)).collect::<Result<_>>()?;
    let mut components = Vec::with_capacity(d);
    for axis in 0..d {
        let data = (0..grid.len())
            .map(|i| {
                let mut w = C64::new(0.0, 0.0);
                let mut dw = C64::new(0.0, 0.0);
                let mut sum = C64::new(0.0, 0.0);
                for (r, g) in &per {
                    w += r.data[i];
                    dw += g[axis].data[i];
                    sum += grad_f(nl, r.data[i], g[axis].data[i]);
                }
                grad_f(nl, w, dw) - sum
            })
            .collect();
        components.push(Field::new(grid, t, data)?);
    }
    Ok(SourceField { kind: SourceKind::GradH, t, components })
}

/// `H₁ = f(U_e + T_d) - f(U_e) - f(T_d)` with `U_e = T_e + η_e`; `eta_lower` lives on the
/// leading axes of `grid` and is extended constantly along the rest.
pub fn source_h1(
    lower: &Train,
    eta_lower: Option<&Field>,
    upper: &Train,
    nl: &Nonlinearity,
    grid: &Grid,
    t: f64,
) -> Result<SourceField> {
    check_grid(lower, grid)?;
    check_grid(upper, grid)?;
    let eta = eta_lower.map(|e| e.extend_to(grid)).transpose()?;
    let (lm, um) = (&lower.members, &upper.members);
    let mut field = Field::from_fn(grid, t, |x| lm.iter().map(|(sp, bs)| bs.soliton_at(sp, t, &x)).sum());
    let tds = Field::from_fn(grid, t, |x| um.iter().map(|(sp, bs)| bs.soliton_at(sp, t, &x)).sum());
    for (i, z) in field.data.iter_mut().enumerate() {
        let ue = *z + eta.as_ref().map_or(C64::new(0.0, 0.0), |e| e.data[i]);
        let td = tds.data[i];
        *z = nl.eval_f(ue + td) - nl.eval_f(ue) - nl.eval_f(td);
    }
    Ok(SourceField { kind: SourceKind::H1Mixed, t, components: vec![field] })
}

/// `f(T_e + T_d) - Σ f(R_{e;k}) - Σ f(R_{d;j})`: the mixed source without the lower error.
pub fn source_uncorrected(lower: &Train, upper: &Train, nl: &Nonlinearity, grid: &Grid, t: f64) -> Result<SourceField> {
    check_grid(lower, grid)?;
    check_grid(upper, grid)?;
    let (lm, um) = (&lower.members, &upper.members);
    let field = Field::from_fn(grid, t, |x| uncorrected_at(lm, um, nl, t, &x));
    Ok(SourceField { kind: SourceKind::Uncorrected, t, components: vec![field] })
}

type Members = [(crate::solitons::SolitonParams, std::sync::Arc<crate::solitons::BoundState>)];

fn uncorrected_at(lm: &Members, um: &Members, nl: &Nonlinearity, t: f64, x: &[f64]) -> C64 {
    let mut total = C64::new(0.0, 0.0);
    let mut sum_f = C64::new(0.0, 0.0);
    for (sp, bs) in lm.iter().chain(um) {
        let r = bs.soliton_at(sp, t, x);
        total += r;
        sum_f += nl.eval_f(r);
    }
    nl.eval_f(total) - sum_f
}

/// `G = f(W + η) - f(W)`.
pub fn source_g(w: &Field, eta: &Field, nl: &Nonlinearity) -> Result<SourceField> {
    w.grid.check_same(&eta.grid)?;
    let data = w.data.iter().zip(&eta.data).map(|(&a, &b)| nl.eval_f(a + b) - nl.eval_f(a)).collect();
    Ok(SourceField { kind: SourceKind::G, t: w.t, components: vec![Field::new(&w.grid, w.t, data)?] })
}

/// `∇G = ∇f(W + η) - ∇f(W)`.
pub fn source_grad_g(w: &Field, grad_w: &[Field], eta: &Field, grad_eta: &[Field], nl: &Nonlinearity) -> Result<SourceField> {
    w.grid.check_same(&eta.grid)?;
    let d = w.grid.dim();
    if grad_w.len() != d || grad_eta.len() != d {
        return Err(Error::Dimension { expected: d, got: grad_w.len().min(grad_eta.len()) });
    }
    let mut components = Vec::with_capacity(d);
    for (gw, ge) in grad_w.iter().zip(grad_eta) {
        let data = (0..w.data.len())
            .map(|i| {
                let (a, b) = (w.data[i], eta.data[i]);
                grad_f(nl, a + b, gw.data[i] + ge.data[i]) - grad_f(nl, a, gw.data[i])
            })
            .collect();
        components.push(Field::new(&w.grid, w.t, data)?);
    }
    Ok(SourceField { kind: SourceKind::GradG, t: w.t, components })
}

/// Samples of the mixed sources along a ray in the second group's directions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NoDecayReport {
    pub t: f64,
    pub x_lower: Vec<f64>,
    /// Distances along the ray.
    pub s: Vec<f64>,
    pub uncorrected: Vec<f64>,
    pub corrected: Vec<f64>,
    /// `|f(T_e) - Σ f(R_{e;k})|` at the fixed lower point: the ray limit of the uncorrected source.
    pub limit: f64,
    /// `|uncorrected - limit|` at the far end of the ray.
    pub limit_gap: f64,
    /// Corrected value at the far end over its largest value on the ray.
    pub corrected_tail_ratio: f64,
}

/// Follow `x = (x_lower, s·dir)` for the given `s` and compare the uncorrected mixed source with `H₁`.
/// `eta_lower` is the lower error at `(t, x_lower)`.
#[allow(clippy::too_many_arguments)]
pub fn demonstrate_nodecay(
    lower: &Train,
    upper: &Train,
    nl: &Nonlinearity,
    t: f64,
    x_lower: &[f64],
    dir: &[f64],
    s: &[f64],
    eta_lower: C64,
) -> Result<NoDecayReport> {
    let e = lower.dim;
    if x_lower.len() != e {
        return Err(Error::Dimension { expected: e, got: x_lower.len() });
    }
    if upper.dim <= e || dir.len() != upper.dim - e {
        return Err(Error::Dimension { expected: upper.dim.saturating_sub(e), got: dir.len() });
    }
    let (lm, um) = (&lower.members, &upper.members);
    let te: C64 = lm.iter().map(|(sp, bs)| bs.soliton_at(sp, t, x_lower)).sum();
    let limit_z = nl.eval_f(te) - lm.iter().map(|(sp, bs)| nl.eval_f(bs.soliton_at(sp, t, x_lower))).sum::<C64>();
    let ue = te + eta_lower;
    let mut uncorrected = Vec::with_capacity(s.len());
    let mut corrected = Vec::with_capacity(s.len());
    for &sk in s {
        let mut x = x_lower.to_vec();
        x.extend(dir.iter().map(|d| d * sk));
        uncorrected.push(uncorrected_at(lm, um, nl, t, &x).norm());
        let td: C64 = um.iter().map(|(sp, bs)| bs.soliton_at(sp, t, &x)).sum();
        corrected.push((nl.eval_f(ue + td) - nl.eval_f(ue) - nl.eval_f(td)).norm());
    }
    let limit = limit_z.norm();
    let limit_gap = uncorrected.last().map_or(0.0, |u| (u - limit).abs());
    let peak = corrected.iter().copied().fold(0.0, f64::max);
    let corrected_tail_ratio = if peak > 0.0 { corrected.last().copied().unwrap_or(0.0) / peak } else { 0.0 };
    Ok(NoDecayReport { t, x_lower: x_lower.to_vec(), s: s.to_vec(), uncorrected, corrected, limit, limit_gap, corrected_tail_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solitons::SolitonParams;
    use crate::train::{BoundStateCache, Group};

    fn cubic_train(sols: Vec<SolitonParams>) -> (Train, Nonlinearity) {
        let nl = Nonlinearity::pure(2.0, 1).unwrap();
        let cache = BoundStateCache::new(nl, 1e-6);
        let dim = sols[0].dim();
        let nl = nl.in_dim(dim).unwrap();
        (Train::build(&Group { dim, solitons: sols }, &cache).unwrap(), nl)
    }

    #[test]
    fn single_soliton_has_no_source() {
        let (tr, nl) = cubic_train(vec![SolitonParams::new(1.0, vec![2.0], vec![0.0], 0.0).unwrap()]);
        let g = Grid::uniform(1, 256, 20.0).unwrap();
        assert_eq!(source_h(&tr, &nl, &g, 0.7).unwrap().components[0].sup(), 0.0);
        let gh = source_grad_h(&tr, &nl, &g, 0.7).unwrap();
        assert!(gh.abs().iter().all(|v| *v < 1e-14));
    }

    #[test]
    fn midpoint_cross_terms() {
        // two real sech profiles at ±s/2: at x = 0 both equal φ, and
        // f(2φ) - 2f(φ) = (8 - 2)φ³ for the cubic
        let s = 6.0;
        let (tr, nl) = cubic_train(vec![
            SolitonParams::new(1.0, vec![0.0], vec![-s / 2.0], 0.0).unwrap(),
            SolitonParams::new(1.0, vec![0.0], vec![s / 2.0], 0.0).unwrap(),
        ]);
        let g = Grid::new(vec![2], vec![1.0]).unwrap();
        let h = source_h(&tr, &nl, &g, 0.0).unwrap();
        // grid points are -1 and 0
        let phi = 2f64.sqrt() / (s / 2.0).cosh();
        let got = h.components[0].data[1];
        assert!((got.norm() - 6.0 * phi.powi(3)).abs() < 1e-6 * phi.powi(3), "{got}");
    }

    #[test]
    fn gradient_matches_spectral_derivative() {
        let (tr, nl) = cubic_train(vec![
            SolitonParams::new(1.0, vec![1.0], vec![-1.5], 0.0).unwrap(),
            SolitonParams::new(0.5, vec![-2.0], vec![1.5], 0.3).unwrap(),
        ]);
        let g = Grid::uniform(1, 512, 30.0).unwrap();
        let h = source_h(&tr, &nl, &g, 0.2).unwrap();
        let gh = source_grad_h(&tr, &nl, &g, 0.2).unwrap();
        let spec = crate::grid::Spectral::new(&g).gradient(&g, &h.components[0].data);
        let err = spec[0].iter().zip(&gh.components[0].data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-5, "{err}");
    }

    #[test]
    fn g_vanishes_without_error() {
        let g = Grid::uniform(1, 32, 5.0).unwrap();
        let nl = Nonlinearity::pure(2.0, 1).unwrap();
        let w = Field::from_fn(&g, 0.0, |x| C64::new((-x[0] * x[0]).exp(), 0.0));
        let z = Field::zeros(&g, 0.0);
        assert_eq!(source_g(&w, &z, &nl).unwrap().components[0].sup(), 0.0);
        let gw = vec![Field::from_fn(&g, 0.0, |x| C64::new(-2.0 * x[0] * (-x[0] * x[0]).exp(), 0.0))];
        assert_eq!(source_grad_g(&w, &gw, &z, &[z.clone()], &nl).unwrap().abs().iter().copied().fold(0.0, f64::max), 0.0);
    }

    fn mixed_pair(lower_n: usize) -> (Train, Train, Nonlinearity) {
        let nl = Nonlinearity::pure(1.2, 1).unwrap();
        let cache = BoundStateCache::new(nl, 1e-6);
        let lo: Vec<SolitonParams> = (0..lower_n)
            .map(|k| SolitonParams::new(1.0, vec![0.0], vec![1.0 * k as f64], 0.0).unwrap())
            .collect();
        let lower = Train::build(&Group { dim: 1, solitons: lo }, &cache).unwrap();
        let upper = Train::build(&Group { dim: 2, solitons: vec![SolitonParams::new(1.0, vec![0.0, 0.0], vec![0.0, 0.0], 0.0).unwrap()] }, &cache)
            .unwrap();
        (lower, upper, nl.in_dim(2).unwrap())
    }

    #[test]
    fn nodecay_limits() {
        let s: Vec<f64> = (0..=30).map(|k| k as f64).collect();
        let (lo, up, nl) = mixed_pair(1);
        let r = demonstrate_nodecay(&lo, &up, &nl, 0.0, &[0.3], &[1.0], &s, C64::new(0.0, 0.0)).unwrap();
        assert_eq!(r.limit, 0.0);
        let (lo, up, nl) = mixed_pair(2);
        let r = demonstrate_nodecay(&lo, &up, &nl, 0.0, &[0.5], &[1.0], &s, C64::new(0.0, 0.0)).unwrap();
        assert!(r.limit > 0.1);
        assert!(r.limit_gap < 1e-9 * r.limit, "{}", r.limit_gap);
        assert!(r.corrected_tail_ratio < 1e-8, "{}", r.corrected_tail_ratio);
    }

    #[test]
    fn h1_without_upper_group_is_zero() {
        let (lo, up, nl) = mixed_pair(2);
        let g = Grid::uniform(2, 32, 40.0).unwrap();
        let h1 = source_h1(&lo, None, &up, &nl, &g, 0.0).unwrap();
        let unc = source_uncorrected(&lo, &up, &nl, &g, 0.0).unwrap();
        // far from the 2D soliton the corrected source is negligible, the uncorrected is not
        let far = g.len() - 1;
        assert!(h1.components[0].data[far].norm() < 1e-12);
        let x = g.point(far);
        let lim = source_h(&lo, &nl, &g, 0.0).unwrap();
        assert!((unc.components[0].data[far] - lim.components[0].data[far]).norm() < 1e-12, "{x:?}");
    }
}
