//! Geometric frequency schedule with growing speeds, and the sums that control it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solitons::SolitonParams;

use super::functionals::NormIndex;

/// `ω_j = ω_* ρ^{2j}`, `|v_j| = γ Σ_{ℓ=2}^{j} ρ^{-ℓ} + δ` for `j = 1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSchedule {
    pub rho: f64,
    pub gamma_speed: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub omega_star: f64,
}

/// How velocity directions are assigned; the schedule fixes only magnitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Directions {
    /// Along the first axis with alternating sign (`+, -, +, ...`).
    Alternating,
    /// Along the first axis, all positive.
    Axis,
    /// One direction per soliton; normalised before scaling.
    Custom(Vec<Vec<f64>>),
}

impl ParamSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::param("rho", format!("{} must lie in (0, 1)", self.rho)));
        }
        if !(self.gamma_speed > 0.0) {
            return Err(Error::param("gamma_speed", "must be positive"));
        }
        if !(self.delta >= 0.0) {
            return Err(Error::param("delta", "must be nonnegative"));
        }
        if self.n == 0 {
            return Err(Error::param("N", "must be at least 1"));
        }
        if !(self.omega_star > 0.0) {
            return Err(Error::param("omega_star", "must be positive"));
        }
        Ok(())
    }

    pub fn omegas(&self) -> Vec<f64> {
        (1..=self.n).map(|j| self.omega_star * self.rho.powi(2 * j as i32)).collect()
    }

    pub fn speeds(&self) -> Vec<f64> {
        (1..=self.n)
            .map(|j| self.gamma_speed * (2..=j).map(|l| self.rho.powi(-(l as i32))).sum::<f64>() + self.delta)
            .collect()
    }

    /// Speed coefficient sufficient for `v_* >= Λ`: `γ = 2 ω_*^{-1/2} Λ`.
    pub fn gamma_for(lambda: f64, omega_star: f64) -> f64 {
        2.0 * lambda / omega_star.sqrt()
    }

    /// `Σ_{j>N}` of the summand of `A` for this index; geometric, so exact.
    pub fn a_tail(&self, idx: &NormIndex, alpha1: f64) -> f64 {
        let e = idx.min_exponent() * idx.kappa(alpha1);
        if e <= 0.0 {
            return f64::INFINITY;
        }
        let r = self.rho.powf(2.0 * e);
        self.omega_star.powf(e) * r.powi(self.n as i32 + 1) / (1.0 - r)
    }

    /// Upper bound for `Σ_{j>N}` of the summand of `B`, using
    /// `<v_j> <= γ ρ^{-j}/(1-ρ) + δ + 1` and subadditivity of `x^m`, `m <= 1`.
    pub fn b_tail(&self, idx: &NormIndex, alpha1: f64) -> f64 {
        let m = idx.min_exponent();
        let k = idx.kappa(alpha1);
        if k <= 0.5 {
            return f64::INFINITY;
        }
        let n1 = self.n as i32 + 1;
        let geo = |ratio: f64| ratio.powi(n1) / (1.0 - ratio);
        let w = self.omega_star.powf(m * k);
        (self.gamma_speed / (1.0 - self.rho)).powf(m) * w * geo(self.rho.powf(m * (2.0 * k - 1.0)))
            + (self.delta + 1.0).powf(m) * w * geo(self.rho.powf(2.0 * m * k))
    }
}

/// Solitons of dimension `dim` following the schedule, centred at the origin with zero phase.
pub fn gen_params(sch: &ParamSchedule, dim: usize, dirs: &Directions) -> Result<Vec<SolitonParams>> {
    sch.validate()?;
    if !(1..=3).contains(&dim) {
        return Err(Error::Dimension { expected: 3, got: dim });
    }
    let omegas = sch.omegas();
    let speeds = sch.speeds();
    let mut out = Vec::with_capacity(sch.n);
    for j in 0..sch.n {
        let mut unit = vec![0.0; dim];
        match dirs {
            Directions::Alternating => unit[0] = if j % 2 == 0 { 1.0 } else { -1.0 },
            Directions::Axis => unit[0] = 1.0,
            Directions::Custom(list) => {
                let d = list.get(j).ok_or_else(|| Error::param("directions", format!("missing entry {j}")))?;
                if d.len() != dim {
                    return Err(Error::Dimension { expected: dim, got: d.len() });
                }
                let n = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(n > 0.0) {
                    return Err(Error::param("directions", format!("entry {j} is zero")));
                }
                unit = d.iter().map(|x| x / n).collect();
            }
        }
        let v = unit.iter().map(|u| u * speeds[j]).collect();
        out.push(SolitonParams::new(omegas[j], v, vec![0.0; dim], 0.0)?);
    }
    Ok(out)
}

/// `(Σ ω_j^{p1 p2})^{1/p1}`.
pub fn tilde_a(omegas: &[f64], p1: f64, p2: f64) -> f64 {
    omegas.iter().map(|w| w.powf(p1 * p2)).sum::<f64>().powf(1.0 / p1)
}

/// `(Σ <v_j>^{p1} ω_j^{p1 p2})^{1/p1}` with `<v_j>` given.
pub fn tilde_b(omegas: &[f64], japanese: &[f64], p1: f64, p2: f64) -> f64 {
    omegas
        .iter()
        .zip(japanese)
        .map(|(w, v)| v.powf(p1) * w.powf(p1 * p2))
        .sum::<f64>()
        .powf(1.0 / p1)
}

/// Truncated `I(ρ) = Σ_{j<=n} (Σ_{ℓ=2}^{j} ρ^{j-ℓ})^{p1} ρ^{2 p1 (p2 - ½) j}`.
pub fn i_rho(rho: f64, p1: f64, p2: f64, n: usize) -> f64 {
    (1..=n)
        .map(|j| {
            let inner: f64 = (2..=j).map(|l| rho.powi(j as i32 - l as i32)).sum();
            inner.powf(p1) * rho.powf(2.0 * p1 * (p2 - 0.5) * j as f64)
        })
        .sum()
}

/// Closed-form bound `(1-ρ)^{-p1} ρ^{2p1(p2-½)} / (1 - ρ^{2p1(p2-½)})`, valid for `p2 > ½`.
pub fn i_rho_bound(rho: f64, p1: f64, p2: f64) -> f64 {
    let q = rho.powf(2.0 * p1 * (p2 - 0.5));
    (1.0 - rho).powf(-p1) * q / (1.0 - q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_example() {
        let sch = ParamSchedule { rho: 0.5, gamma_speed: 2.0, delta: 0.0, n: 3, omega_star: 1.0 };
        assert_eq!(sch.omegas(), vec![0.25, 0.0625, 0.015625]);
        assert_eq!(sch.speeds(), vec![0.0, 8.0, 24.0]);
        let sols = gen_params(&sch, 1, &Directions::Alternating).unwrap();
        assert_eq!(sols[1].v, vec![-8.0]);
        assert_eq!(sols[2].v, vec![24.0]);
    }

    #[test]
    fn one_soliton_moves_at_delta() {
        let sch = ParamSchedule { rho: 0.3, gamma_speed: 5.0, delta: 1.5, n: 1, omega_star: 2.0 };
        let sols = gen_params(&sch, 2, &Directions::Axis).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].v, vec![1.5, 0.0]);
    }

    #[test]
    fn custom_directions_are_normalised() {
        let sch = ParamSchedule { rho: 0.5, gamma_speed: 2.0, delta: 0.0, n: 2, omega_star: 1.0 };
        let dirs = Directions::Custom(vec![vec![1.0, 0.0], vec![3.0, 4.0]]);
        let s = gen_params(&sch, 2, &dirs).unwrap();
        assert!((s[1].v[0] - 8.0 * 0.6).abs() < 1e-15 && (s[1].v[1] - 8.0 * 0.8).abs() < 1e-15);
        assert!(gen_params(&sch, 2, &Directions::Custom(vec![vec![1.0, 0.0]])).is_err());
    }

    #[test]
    fn rejects_bad_schedules() {
        let base = ParamSchedule { rho: 0.5, gamma_speed: 2.0, delta: 0.0, n: 3, omega_star: 1.0 };
        for bad in [
            ParamSchedule { rho: 1.0, ..base },
            ParamSchedule { rho: 0.0, ..base },
            ParamSchedule { n: 0, ..base },
            ParamSchedule { gamma_speed: 0.0, ..base },
        ] {
            assert!(gen_params(&bad, 1, &Directions::Axis).is_err());
        }
    }

    #[test]
    fn i_rho_below_bound() {
        for &rho in &[0.5, 0.25, 0.1] {
            let s = i_rho(rho, 0.8, 0.9, 60);
            assert!(s <= i_rho_bound(rho, 0.8, 0.9) * (1.0 + 1e-12));
        }
        assert!(i_rho_bound(0.1, 0.8, 0.9) < i_rho_bound(0.25, 0.8, 0.9));
    }

    #[test]
    fn tails_bound_the_remaining_sum() {
        let idx = NormIndex::iso(2.0, 1);
        let short = ParamSchedule { rho: 0.5, gamma_speed: 2.0, delta: 0.0, n: 4, omega_star: 1.0 };
        let long = ParamSchedule { n: 40, ..short };
        let sa = |s: &ParamSchedule| s.omegas().iter().map(|w| w.powf(idx.kappa(1.0))).sum::<f64>();
        let rest = sa(&long) - sa(&short);
        assert!((short.a_tail(&idx, 1.0) - rest).abs() < 1e-12);
        let sb = |s: &ParamSchedule| {
            s.omegas().iter().zip(s.speeds()).map(|(w, v)| (v * v + 1.0).sqrt() * w.powf(idx.kappa(1.0))).sum::<f64>()
        };
        assert!(short.b_tail(&idx, 1.0) >= sb(&long) - sb(&short));
    }
}
