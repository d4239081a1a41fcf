//! The double-power nonlinearity `f(z) = g(|z|^2) z`, `g(s) = s^{a1/2} + c s^{a2/2}`,
//! its Wirtinger derivatives and the chain rule.

pub mod oracle;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, C64, PAR_MIN};

/// Magnitudes below this are treated as zero in every branch-sensitive power.
pub const UNDERFLOW: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nonlinearity {
    pub alpha1: f64,
    pub alpha2: f64,
    pub c: f64,
    /// Spatial dimension the nonlinearity is used in.
    pub dim: usize,
    /// Empirical constant of the pointwise inequalities, filled by the sampling oracle.
    #[serde(default)]
    pub c0: Option<f64>,
}

/// Values of `f_z` and `f_zbar` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WirtingerPair {
    pub fz: C64,
    pub fzbar: C64,
}

/// Largest admissible exponent in dimension `dim` (infinite for `dim <= 2`).
pub fn alpha_max(dim: usize) -> f64 {
    if dim <= 2 {
        f64::INFINITY
    } else {
        4.0 / (dim as f64 - 2.0)
    }
}

#[inline]
fn pow_half(s: f64, alpha: f64) -> f64 {
    if alpha == 2.0 {
        s
    } else if alpha == 1.0 {
        s.sqrt()
    } else {
        s.powf(0.5 * alpha)
    }
}

impl Nonlinearity {
    pub fn new(alpha1: f64, alpha2: f64, c: f64, dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Nonlinearity(format!("dimension {dim} outside 1..=3")));
        }
        if !(alpha1 > 0.0 && alpha1.is_finite()) {
            return Err(Error::Nonlinearity(format!("alpha1 = {alpha1} must be positive")));
        }
        if !(alpha2 >= alpha1 && alpha2.is_finite()) {
            return Err(Error::Nonlinearity(format!(
                "alpha2 = {alpha2} must satisfy alpha1 <= alpha2 < infinity"
            )));
        }
        if alpha2 >= alpha_max(dim) {
            return Err(Error::Nonlinearity(format!(
                "alpha2 = {alpha2} must be below {} in dimension {dim}",
                alpha_max(dim)
            )));
        }
        if !c.is_finite() {
            return Err(Error::Nonlinearity("c must be finite".into()));
        }
        Ok(Nonlinearity { alpha1, alpha2, c, dim, c0: None })
    }

    /// Pure power `|z|^alpha z`.
    pub fn pure(alpha: f64, dim: usize) -> Result<Self> {
        Nonlinearity::new(alpha, alpha, 0.0, dim)
    }

    /// Same exponents and coefficient, used in another dimension.
    pub fn in_dim(&self, dim: usize) -> Result<Self> {
        let mut out = Nonlinearity::new(self.alpha1, self.alpha2, self.c, dim)?;
        out.c0 = self.c0;
        Ok(out)
    }

    pub fn alphas(&self) -> [f64; 2] {
        [self.alpha1, self.alpha2]
    }

    /// `Some((alpha, kappa))` when `g(s) = kappa s^{alpha/2}` is a single power.
    pub fn single_power(&self) -> Option<(f64, f64)> {
        if self.alpha1 == self.alpha2 {
            Some((self.alpha1, 1.0 + self.c))
        } else if self.c == 0.0 {
            Some((self.alpha1, 1.0))
        } else {
            None
        }
    }

    pub fn g(&self, s: f64) -> f64 {
        if s <= UNDERFLOW * UNDERFLOW {
            return 0.0;
        }
        let first = pow_half(s, self.alpha1);
        if self.c == 0.0 {
            first
        } else {
            first + self.c * pow_half(s, self.alpha2)
        }
    }

    /// `s g'(s)`, finite at the origin.
    pub fn s_dg(&self, s: f64) -> f64 {
        if s <= UNDERFLOW * UNDERFLOW {
            return 0.0;
        }
        0.5 * self.alpha1 * pow_half(s, self.alpha1) + 0.5 * self.c * self.alpha2 * pow_half(s, self.alpha2)
    }

    pub fn eval_f(&self, z: C64) -> C64 {
        let s = z.norm_sqr();
        if s.sqrt() < UNDERFLOW {
            return C64::new(0.0, 0.0);
        }
        z * self.g(s)
    }

    pub fn eval_wirtinger(&self, z: C64) -> WirtingerPair {
        let r = z.norm_sqr().sqrt();
        if r < UNDERFLOW {
            let zero = C64::new(0.0, 0.0);
            return WirtingerPair { fz: zero, fzbar: zero };
        }
        let s = r * r;
        let h = self.s_dg(s);
        let unit = z / r;
        WirtingerPair { fz: C64::new(self.g(s) + h, 0.0), fzbar: unit * unit * h }
    }

    /// `f` applied pointwise.
    pub fn apply(&self, u: &[C64]) -> Vec<C64> {
        if u.len() >= PAR_MIN {
            u.par_iter().map(|&z| self.eval_f(z)).collect()
        } else {
            u.iter().map(|&z| self.eval_f(z)).collect()
        }
    }

    /// Chain rule `grad f(w) = f_z(w) grad w + f_zbar(w) conj(grad w)`.
    pub fn gradient_of_f(&self, w: &Field, grad_w: &[Field]) -> Result<Vec<Field>> {
        if grad_w.len() != w.grid.dim() {
            return Err(Error::Dimension { expected: w.grid.dim(), got: grad_w.len() });
        }
        let mut out = Vec::with_capacity(grad_w.len());
        for g in grad_w {
            w.grid.check_same(&g.grid)?;
            let data = w
                .data
                .iter()
                .zip(&g.data)
                .map(|(&z, &dz)| {
                    let p = self.eval_wirtinger(z);
                    p.fz * dz + p.fzbar * dz.conj()
                })
                .collect();
            out.push(Field { grid: w.grid.clone(), t: w.t, data });
        }
        Ok(out)
    }

    /// Pointwise chain rule on raw sample slices.
    pub fn chain_rule(&self, w: &[C64], grad_w: &[Vec<C64>]) -> Vec<Vec<C64>> {
        grad_w
            .iter()
            .map(|g| {
                w.iter()
                    .zip(g)
                    .map(|(&z, &dz)| {
                        let p = self.eval_wirtinger(z);
                        p.fz * dz + p.fzbar * dz.conj()
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, Spectral};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cubic_values() {
        let nl = Nonlinearity::pure(2.0, 1).unwrap();
        assert_eq!(nl.eval_f(c(2.0, 0.0)), c(8.0, 0.0));
        assert_eq!(nl.eval_f(c(1.0, 1.0)), c(2.0, 2.0));
        assert_eq!(nl.eval_f(c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn double_power_value() {
        let nl = Nonlinearity::new(1.0, 3.0, 0.5, 1).unwrap();
        assert!((nl.eval_f(c(2.0, 0.0)) - c(12.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn wirtinger_examples() {
        let cubic = Nonlinearity::pure(2.0, 1).unwrap();
        let p0 = cubic.eval_wirtinger(c(0.0, 0.0));
        assert_eq!((p0.fz, p0.fzbar), (c(0.0, 0.0), c(0.0, 0.0)));
        let p1 = cubic.eval_wirtinger(c(1.0, 0.0));
        assert!((p1.fz - c(2.0, 0.0)).norm() < 1e-15 && (p1.fzbar - c(1.0, 0.0)).norm() < 1e-15);
        let sq = Nonlinearity::pure(1.0, 1).unwrap();
        let p4 = sq.eval_wirtinger(c(4.0, 0.0));
        assert!((p4.fz - c(6.0, 0.0)).norm() < 1e-14 && (p4.fzbar - c(2.0, 0.0)).norm() < 1e-14);
    }

    /// Central differences in x and y give f_z = (f_x - i f_y)/2, f_zbar = (f_x + i f_y)/2.
    fn finite_difference(nl: &Nonlinearity, z: C64) -> WirtingerPair {
        let h = 1e-6;
        let fx = (nl.eval_f(z + c(h, 0.0)) - nl.eval_f(z - c(h, 0.0))) / (2.0 * h);
        let fy = (nl.eval_f(z + c(0.0, h)) - nl.eval_f(z - c(0.0, h))) / (2.0 * h);
        WirtingerPair { fz: (fx - c(0.0, 1.0) * fy) * 0.5, fzbar: (fx + c(0.0, 1.0) * fy) * 0.5 }
    }

    #[test]
    fn wirtinger_matches_finite_differences() {
        let cases = [(2.0, 2.0, 0.0), (1.0, 1.0, 0.0), (1.0, 3.0, 0.5), (0.6, 1.2, -0.3), (1.2, 1.2, 0.0)];
        for &(a1, a2, cc) in &cases {
            let nl = Nonlinearity::new(a1, a2, cc, 2).unwrap();
            for &z in &[c(0.7, -0.4), c(2.0, 1.0), c(-0.3, 0.05), c(0.0, 1.5)] {
                let p = nl.eval_wirtinger(z);
                let q = finite_difference(&nl, z);
                let scale = p.fz.norm().max(p.fzbar.norm());
                assert!((p.fz - q.fz).norm() <= 1e-5 * scale, "{a1} {a2} {cc} {z}");
                assert!((p.fzbar - q.fzbar).norm() <= 1e-5 * scale, "{a1} {a2} {cc} {z}");
            }
        }
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(Nonlinearity::new(2.0, 1.0, 0.0, 1).is_err());
        assert!(Nonlinearity::new(1.0, 4.0, 0.0, 3).is_err());
        assert!(Nonlinearity::new(1.0, 3.9, 0.0, 3).is_ok());
        assert!(Nonlinearity::new(1.0, 40.0, 0.0, 2).is_ok());
        assert!(Nonlinearity::new(0.0, 1.0, 0.0, 1).is_err());
    }

    #[test]
    fn constant_field_has_zero_gradient() {
        let g = Grid::uniform(1, 16, 3.0).unwrap();
        let nl = Nonlinearity::pure(2.0, 1).unwrap();
        let w = Field::from_fn(&g, 0.0, |_| c(1.3, -0.2));
        let grad = vec![Field::zeros(&g, 0.0)];
        let out = nl.gradient_of_f(&w, &grad).unwrap();
        assert!(out[0].data.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn chain_rule_matches_spectral_derivative() {
        let g = Grid::uniform(1, 512, 20.0).unwrap();
        let sp = Spectral::new(&g);
        // real soliton profile: grad f(w) = 3 w^2 grad w for the cubic case
        let cubic = Nonlinearity::pure(2.0, 1).unwrap();
        let w = Field::from_fn(&g, 0.0, |x| c(2f64.sqrt() / x[0].cosh(), 0.0));
        let dw = sp.gradient(&g, &w.data);
        let chain = cubic.chain_rule(&w.data, &dw);
        let spectral = sp.gradient(&g, &cubic.apply(&w.data));
        for i in 0..g.len() {
            let expect = 3.0 * w.data[i] * w.data[i] * dw[0][i];
            assert!((chain[0][i] - expect).norm() < 1e-12);
            assert!((chain[0][i] - spectral[0][i]).norm() < 1e-9);
        }
        // complex travelling profile with a fractional power
        let nl = Nonlinearity::new(1.2, 2.0, 0.5, 1).unwrap();
        let w = Field::from_fn(&g, 0.0, |x| c(0.0, 0.7 * x[0]).exp() * (1.5 / (0.8 * x[0]).cosh()));
        let dw = sp.gradient(&g, &w.data);
        let chain = nl.chain_rule(&w.data, &dw);
        let spectral = sp.gradient(&g, &nl.apply(&w.data));
        let err = chain[0].iter().zip(&spectral[0]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }
}
