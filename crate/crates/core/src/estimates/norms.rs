//! Lebesgue norms of grid fields, isotropic and mixed, by the rectangle rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::serde_ext::{maybe_inf, maybe_inf_opt};

/// A requested norm: `L^p`, or `L^p` over the first `split` axes of `L^q` over the rest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridNorm {
    #[serde(with = "maybe_inf")]
    pub p: f64,
    #[serde(with = "maybe_inf_opt", default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub split: Option<usize>,
}

impl GridNorm {
    pub fn lp(p: f64) -> Self {
        GridNorm { p, q: None, split: None }
    }

    pub fn mixed(p: f64, q: f64, split: usize) -> Self {
        GridNorm { p, q: Some(q), split: Some(split) }
    }

    /// Short identifier used in CSV output.
    pub fn id(&self) -> String {
        match (self.q, self.split) {
            (Some(_), Some(e)) => format!("L{}x{}", fmt_exp(self.p), e),
            _ => format!("L{}", fmt_exp(self.p)),
        }
    }
}

fn fmt_exp(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

/// Norm of a field.
pub fn lp_norm(u: &Field, norm: &GridNorm) -> Result<f64> {
    let abs: Vec<f64> = u.data.iter().map(|z| z.norm_sqr().sqrt()).collect();
    abs_norm(&abs, &u.grid, norm)
}

/// Norm of nonnegative samples `abs` on `grid`.
pub fn abs_norm(abs: &[f64], grid: &Grid, norm: &GridNorm) -> Result<f64> {
    if abs.len() != grid.len() {
        return Err(Error::GridMismatch(format!("{} samples on a grid of {}", abs.len(), grid.len())));
    }
    if !(norm.p > 0.0) || norm.q.is_some_and(|q| !(q > 0.0)) {
        return Err(Error::param("p/q", "exponents must lie in (0, inf]"));
    }
    match (norm.q, norm.split) {
        (None, None) => Ok(iso(abs, grid.cell_volume(), norm.p)),
        (Some(q), Some(e)) => {
            if e == 0 || e >= grid.dim() {
                return Err(Error::GridMismatch(format!("split {e} of a {}-dimensional grid", grid.dim())));
            }
            let inner_len: usize = grid.n[e..].iter().product();
            let dv_outer: f64 = (0..e).map(|a| grid.spacing(a)).product();
            let dv_inner: f64 = (e..grid.dim()).map(|a| grid.spacing(a)).product();
            let inner: Vec<f64> = abs.chunks(inner_len).map(|c| iso(c, dv_inner, q)).collect();
            Ok(iso(&inner, dv_outer, norm.p))
        }
        _ => Err(Error::param("split", "a mixed norm needs both q and split")),
    }
}

/// `(Σ a^p dv)^{1/p}` in index order, or the max for `p = ∞`.
pub fn iso(abs: &[f64], dv: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return abs.iter().fold(0.0, |m, &a| m.max(a));
    }
    let s: f64 = if p == 2.0 {
        abs.iter().map(|a| a * a).sum()
    } else if p == 1.0 {
        abs.iter().sum()
    } else {
        abs.iter().map(|a| a.powf(p)).sum()
    };
    (s * dv).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::C64;

    #[test]
    fn zero_field() {
        let g = Grid::uniform(2, 16, 3.0).unwrap();
        let z = Field::zeros(&g, 0.0);
        for n in [GridNorm::lp(2.0), GridNorm::lp(f64::INFINITY), GridNorm::mixed(4.0, 2.0, 1)] {
            assert_eq!(lp_norm(&z, &n).unwrap(), 0.0);
        }
    }

    #[test]
    fn sech_l2() {
        let g = Grid::uniform(1, 4096, 80.0).unwrap();
        let u = Field::from_fn(&g, 0.0, |x| C64::new(2f64.sqrt() / x[0].cosh(), 0.0));
        assert!((lp_norm(&u, &GridNorm::lp(2.0)).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn separable_factorises() {
        let g = Grid::new(vec![64, 32], vec![8.0, 6.0]).unwrap();
        let gx = |x: f64| (-x * x).exp();
        let hy = |y: f64| 1.0 / (1.0 + y * y);
        let u = Field::from_fn(&g, 0.0, |x| C64::new(gx(x[0]) * hy(x[1]), 0.0));
        let gx_f = Field::from_fn(&g.leading(1).unwrap(), 0.0, |x| C64::new(gx(x[0]), 0.0));
        let g1 = Grid::new(vec![32], vec![6.0]).unwrap();
        let hy_f = Field::from_fn(&g1, 0.0, |x| C64::new(hy(x[0]), 0.0));
        for (p, q) in [(4.0, 2.0), (1.0, f64::INFINITY), (f64::INFINITY, 3.0)] {
            let lhs = lp_norm(&u, &GridNorm::mixed(p, q, 1)).unwrap();
            let rhs = lp_norm(&gx_f, &GridNorm::lp(p)).unwrap() * lp_norm(&hy_f, &GridNorm::lp(q)).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * rhs, "{p} {q}");
        }
    }

    #[test]
    fn bad_split() {
        let g = Grid::uniform(2, 8, 1.0).unwrap();
        let z = Field::zeros(&g, 0.0);
        assert!(lp_norm(&z, &GridNorm::mixed(2.0, 2.0, 2)).is_err());
    }
}
