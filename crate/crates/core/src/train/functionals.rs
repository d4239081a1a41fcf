//! The frequency sums `A`, `B`, their anisotropic versions, and the classes where they stay finite.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_ext::{maybe_inf, maybe_inf_opt};

use super::{TrainSpec};

/// Lebesgue index on `R^d`: isotropic `L^p` when `q` is absent, otherwise
/// `L^p` over the first `e` coordinates of `L^q` over the remaining `d - e`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormIndex {
    #[serde(with = "maybe_inf")]
    pub p: f64,
    #[serde(with = "maybe_inf_opt", default)]
    pub q: Option<f64>,
    pub e: usize,
    pub d: usize,
}

impl NormIndex {
    pub fn iso(p: f64, d: usize) -> Self {
        NormIndex { p, q: None, e: d, d }
    }

    pub fn aniso(p: f64, q: f64, e: usize, d: usize) -> Self {
        NormIndex { p, q: Some(q), e, d }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0) || self.q.is_some_and(|q| !(q > 0.0)) {
            return Err(Error::param("p/q", "exponents must lie in (0, inf]"));
        }
        if self.q.is_some() && !(self.e >= 1 && self.e < self.d) {
            return Err(Error::param("split", format!("({}, {}) is not a proper split", self.e, self.d - self.e)));
        }
        Ok(())
    }

    /// `1/α₁ - e/(2p) - (d-e)/(2q)`.
    pub fn kappa(&self, alpha1: f64) -> f64 {
        match self.q {
            None => 1.0 / alpha1 - self.d as f64 / (2.0 * self.p),
            Some(q) => 1.0 / alpha1 - self.e as f64 / (2.0 * self.p) - (self.d - self.e) as f64 / (2.0 * q),
        }
    }

    /// `min(1, p, q)`.
    pub fn min_exponent(&self) -> f64 {
        1f64.min(self.p).min(self.q.unwrap_or(f64::INFINITY))
    }

    /// `max(1, 1/p, 1/q)`.
    pub fn outer_power(&self) -> f64 {
        1f64.max(1.0 / self.p).max(self.q.map_or(0.0, |q| 1.0 / q))
    }

    /// Same index with exponents multiplied by `c` (as in `A_{(α+1)s}`).
    pub fn scaled(&self, c: f64) -> Self {
        NormIndex { p: self.p * c, q: self.q.map(|q| q * c), ..*self }
    }
}

/// `(Σ_j ω_j^{min(1,p,q) κ})^{max(1,1/p,1/q)}`.
pub fn compute_a(omegas: &[f64], idx: &NormIndex, alpha1: f64) -> f64 {
    let m = idx.min_exponent();
    let k = idx.kappa(alpha1);
    omegas.iter().map(|w| w.powf(m * k)).sum::<f64>().powf(idx.outer_power())
}

/// As [`compute_a`] with the weights `<v_j>^{min(1,p,q)}`; `japanese[j] = (|v_j|^2 + 1)^{1/2}`.
pub fn compute_b(omegas: &[f64], japanese: &[f64], idx: &NormIndex, alpha1: f64) -> f64 {
    let m = idx.min_exponent();
    let k = idx.kappa(alpha1);
    omegas
        .iter()
        .zip(japanese)
        .map(|(w, v)| v.powf(m) * w.powf(m * k))
        .sum::<f64>()
        .powf(idx.outer_power())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMembership {
    pub in_ca: bool,
    pub in_cb: bool,
}

pub fn in_ca(idx: &NormIndex, alpha1: f64) -> bool {
    idx.kappa(alpha1) > 0.0
}

pub fn in_cb(idx: &NormIndex, alpha1: f64) -> Result<bool> {
    if alpha1 >= 2.0 {
        return Err(Error::UndefinedClass(alpha1));
    }
    Ok(idx.kappa(alpha1) > 0.5)
}

pub fn class_membership(idx: &NormIndex, alpha1: f64) -> Result<ClassMembership> {
    Ok(ClassMembership { in_ca: in_ca(idx, alpha1), in_cb: in_cb(idx, alpha1)? })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CompeteReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `A_q < max(1, ω_*)^{1/α₁} A_p` for `q > p ∈ C_A`; with `japanese` the same for `B` and `C_B`.
pub fn check_compete(
    omegas: &[f64],
    japanese: Option<&[f64]>,
    p: &NormIndex,
    q: &NormIndex,
    alpha1: f64,
    omega_star: f64,
) -> Result<CompeteReport> {
    p.validate()?;
    q.validate()?;
    if p.q.is_some() || q.q.is_some() || p.d != q.d {
        return Err(Error::Hypothesis("comparison needs two isotropic indices in the same dimension".into()));
    }
    if !(q.p > p.p) {
        return Err(Error::Hypothesis(format!("need q > p, got p={} q={}", p.p, q.p)));
    }
    if let Some(w) = omegas.iter().find(|w| !(**w > 0.0 && **w < omega_star)) {
        return Err(Error::Hypothesis(format!("frequency {w} outside (0, {omega_star})")));
    }
    let (lhs, base) = match japanese {
        None => {
            if !in_ca(p, alpha1) {
                return Err(Error::Hypothesis(format!("p={} not in C_A", p.p)));
            }
            (compute_a(omegas, q, alpha1), compute_a(omegas, p, alpha1))
        }
        Some(jv) => {
            if !in_cb(p, alpha1)? {
                return Err(Error::Hypothesis(format!("p={} not in C_B", p.p)));
            }
            (compute_b(omegas, jv, q, alpha1), compute_b(omegas, jv, p, alpha1))
        }
    };
    let rhs = 1f64.max(omega_star).powf(1.0 / alpha1) * base;
    Ok(CompeteReport { lhs, rhs, holds: lhs < rhs })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormEntry {
    pub group_dim: usize,
    pub index: NormIndex,
    #[serde(with = "maybe_inf")]
    pub value: f64,
    /// Bound on what truncating an infinite schedule leaves out, when known.
    #[serde(with = "maybe_inf_opt", default, skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassEntry {
    pub index: NormIndex,
    pub in_ca: bool,
    /// Absent when `α₁ >= 2`.
    pub in_cb: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormReport {
    #[serde(rename = "A")]
    pub a: Vec<NormEntry>,
    #[serde(rename = "B")]
    pub b: Vec<NormEntry>,
    #[serde(with = "maybe_inf")]
    pub vstar: f64,
    pub class_flags: Vec<ClassEntry>,
}

/// `A` and `B` of every group whose dimension matches the index, plus `v_*` and class flags.
pub fn norm_report(spec: &TrainSpec, indices: &[NormIndex], alpha1: f64) -> Result<NormReport> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut class_flags = Vec::new();
    for idx in indices {
        idx.validate()?;
        class_flags.push(ClassEntry {
            index: *idx,
            in_ca: in_ca(idx, alpha1),
            in_cb: in_cb(idx, alpha1).ok(),
        });
        for g in spec.groups.iter().filter(|g| g.dim == idx.d) {
            let omegas: Vec<f64> = g.solitons.iter().map(|s| s.omega).collect();
            let jv: Vec<f64> = g.solitons.iter().map(|s| s.japanese_v()).collect();
            a.push(NormEntry { group_dim: g.dim, index: *idx, value: compute_a(&omegas, idx, alpha1), tail_bound: None });
            b.push(NormEntry {
                group_dim: g.dim,
                index: *idx,
                value: compute_b(&omegas, &jv, idx, alpha1),
                tail_bound: None,
            });
        }
    }
    Ok(NormReport { a, b, vstar: spec.vstar(), class_flags })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_examples() {
        let inf = f64::INFINITY;
        assert!((compute_a(&[0.3], &NormIndex::iso(inf, 2), 1.5) - 0.3f64.powf(1.0 / 1.5)).abs() < 1e-15);
        let v = compute_a(&[0.25, 0.0625], &NormIndex::iso(2.0, 1), 1.0);
        assert!((v - (0.25f64.powf(0.75) + 0.0625f64.powf(0.75))).abs() < 1e-15);
        assert!((v - 0.47855).abs() < 1e-5);
        let an = compute_a(&[0.25], &NormIndex::aniso(inf, 2.0, 1, 2), 1.0);
        assert!((an - 0.25f64.powf(0.75)).abs() < 1e-15);
    }

    #[test]
    fn small_p_uses_outer_power() {
        // p = 1/2: (Σ ω^{(1/2)(1/α - d/(2p))})^2
        let idx = NormIndex::iso(0.5, 1);
        let v = compute_a(&[0.25, 0.0625], &idx, 0.5);
        let e = 0.5 * (2.0 - 1.0);
        assert!((v - (0.25f64.powf(e) + 0.0625f64.powf(e)).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn b_examples() {
        let idx = NormIndex::iso(3.0, 1);
        let om = [0.25, 0.1];
        assert_eq!(compute_b(&om, &[1.0, 1.0], &idx, 1.0), compute_a(&om, &idx, 1.0));
        let inf = NormIndex::iso(f64::INFINITY, 1);
        let ratio = compute_b(&[0.25], &[2.0], &inf, 1.0) / compute_b(&[0.25], &[1.0], &inf, 1.0);
        assert!((ratio - 2.0).abs() < 1e-15);
    }

    #[test]
    fn class_examples() {
        assert!(class_membership(&NormIndex::iso(1.0, 1), 1.0).unwrap().in_ca);
        assert!(!class_membership(&NormIndex::iso(2.0, 2), 1.0).unwrap().in_cb);
        assert!(class_membership(&NormIndex::iso(2.0001, 2), 1.0).unwrap().in_cb);
        assert!(class_membership(&NormIndex::aniso(f64::INFINITY, 2.0, 1, 2), 1.0).unwrap().in_cb);
        assert!(matches!(class_membership(&NormIndex::iso(5.0, 1), 2.0), Err(Error::UndefinedClass(_))));
        // C_A = (dα₁/2, inf]
        assert!(!in_ca(&NormIndex::iso(1.5, 3), 1.0));
        assert!(in_ca(&NormIndex::iso(1.5001, 3), 1.0));
    }

    #[test]
    fn compete_examples() {
        let p = NormIndex::iso(1.0, 1);
        let q = NormIndex::iso(2.0, 1);
        let r = check_compete(&[0.3], None, &p, &q, 1.0, 0.5).unwrap();
        assert!(r.holds);
        let om: Vec<f64> = (1..=5).map(|j| 0.25f64.powi(j)).collect();
        assert!(check_compete(&om, None, &p, &q, 1.0, 1.0).unwrap().holds);
        // with ω_* = 1 the factor is 1
        let r = check_compete(&om, None, &p, &q, 1.0, 1.0).unwrap();
        assert!((r.rhs - compute_a(&om, &p, 1.0)).abs() < 1e-15);
        assert!(check_compete(&om, None, &q, &p, 1.0, 1.0).is_err());
        assert!(check_compete(&om, None, &NormIndex::iso(0.4, 1), &q, 1.0, 1.0).is_err());
    }
}
