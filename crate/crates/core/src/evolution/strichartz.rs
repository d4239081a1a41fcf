//! Admissible pairs, space-time norms of sampled series, decay transfer to
//! sub-admissible pairs, and the exponent choice for the nonlinear estimate.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimates::norms::{lp_norm, GridNorm};
use crate::grid::Field;
use crate::nonlinearity::alpha_max;

pub type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

fn to_f64(r: Q) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn from_inv(inv: Q) -> f64 {
    if inv == Q::from_integer(0) {
        f64::INFINITY
    } else {
        1.0 / to_f64(inv)
    }
}

/// `1/r_max`: `0` in 1D, `1/4` in 2D (endpoint excluded), `(d-2)/(2d)` from 3D on.
pub fn r_max_inv(d: usize) -> Q {
    match d {
        1 => q(0, 1),
        2 => q(1, 4),
        _ => q(d as i64 - 2, 2 * d as i64),
    }
}

/// A pair stored by inverse exponents so the scaling relation is exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrichartzPair {
    pub q_inv: Q,
    pub r_inv: Q,
    pub d: usize,
}

impl StrichartzPair {
    /// The admissible pair with the given `1/r`.
    pub fn from_r_inv(d: usize, r_inv: Q) -> Result<Self> {
        let q_inv = q(d as i64, 4) - Q::from_integer(d as i64) * r_inv / 2;
        let p = StrichartzPair { q_inv, r_inv, d };
        p.check()?;
        Ok(p)
    }

    pub fn new(q_inv: Q, r_inv: Q, d: usize) -> Result<Self> {
        let p = StrichartzPair { q_inv, r_inv, d };
        p.check()?;
        Ok(p)
    }

    pub fn is_admissible(&self) -> bool {
        self.check().is_ok()
    }

    fn check(&self) -> Result<()> {
        let mut violated = Vec::new();
        if !(1..=3).contains(&self.d) {
            violated.push(format!("dimension {} outside 1..=3", self.d));
        }
        if Q::from_integer(2) * self.q_inv + Q::from_integer(self.d as i64) * self.r_inv != q(self.d as i64, 2) {
            violated.push("2/q + d/r = d/2".into());
        }
        if self.r_inv > q(1, 2) || self.r_inv < r_max_inv(self.d) {
            violated.push("2 <= r <= r_max".into());
        }
        if self.q_inv < q(0, 1) || self.q_inv > q(1, 2) {
            violated.push("2 <= q <= inf".into());
        }
        if violated.is_empty() {
            Ok(())
        } else {
            Err(Error::Inadmissible { theorem: "strichartz pair".into(), violated })
        }
    }

    pub fn q(&self) -> f64 {
        from_inv(self.q_inv)
    }

    pub fn r(&self) -> f64 {
        from_inv(self.r_inv)
    }
}

/// `(∞, 2)` and the pair with the largest admissible `r`.
pub fn defining_pairs(d: usize) -> Result<[StrichartzPair; 2]> {
    Ok([StrichartzPair::from_r_inv(d, q(1, 2))?, StrichartzPair::from_r_inv(d, r_max_inv(d))?])
}

/// `2 <= r <= r_max` and `2/p + d/r >= d/2`.
pub fn is_subadmissible(p_inv: Q, r_inv: Q, d: usize) -> bool {
    r_inv <= q(1, 2)
        && r_inv >= r_max_inv(d)
        && p_inv >= q(0, 1)
        && Q::from_integer(2) * p_inv + Q::from_integer(d as i64) * r_inv >= q(d as i64, 2)
}

/// `‖u‖_{L^q([t_k, T])}` for every sample time, by the trapezoid rule; suffix max for `q = ∞`.
pub fn tail_norms(times: &[f64], values: &[f64], qexp: f64) -> Vec<f64> {
    let n = times.len();
    let mut out = vec![0.0; n];
    if n == 0 {
        return out;
    }
    if qexp.is_infinite() {
        let mut m = 0.0f64;
        for k in (0..n).rev() {
            m = m.max(values[k].abs());
            out[k] = m;
        }
        return out;
    }
    let mut acc = 0.0;
    for k in (0..n).rev() {
        if k + 1 < n {
            let h = times[k + 1] - times[k];
            acc += 0.5 * h * (values[k].abs().powf(qexp) + values[k + 1].abs().powf(qexp));
        }
        out[k] = acc.powf(1.0 / qexp);
    }
    out
}

/// `‖u‖_{L^q_t L^r_x([t_from, T])}` for one pair over a sampled series.
pub fn pair_norm(series: &[Field], t_from: f64, pair: &StrichartzPair) -> Result<f64> {
    pair.check()?;
    let sel: Vec<&Field> = series.iter().filter(|f| f.t >= t_from - 1e-12).collect();
    if let Some(f) = sel.first() {
        if f.grid.dim() != pair.d {
            return Err(Error::Dimension { expected: pair.d, got: f.grid.dim() });
        }
    }
    let times: Vec<f64> = sel.iter().map(|f| f.t).collect();
    let vals = sel.iter().map(|f| lp_norm(f, &GridNorm::lp(pair.r()))).collect::<Result<Vec<_>>>()?;
    Ok(tail_norms(&times, &vals, pair.q()).first().copied().unwrap_or(0.0))
}

/// Maximum of [`pair_norm`] over the given pairs; with the defining pairs this is `‖u‖_{S(t)}`.
pub fn strichartz_norm(series: &[Field], t_from: f64, pairs: &[StrichartzPair]) -> Result<f64> {
    let mut m = 0.0f64;
    for p in pairs {
        m = m.max(pair_norm(series, t_from, p)?);
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubadmissibleCheck {
    /// Constant of the transfer bound for this `(p, q)`.
    pub c_tilde: f64,
    /// `sup_t e^{λt}‖u‖_{L^q([t,∞))}`, required to be at most one.
    pub k_q: f64,
    /// `sup_t e^{λt} λ^{1/p-1/q} ‖u‖_{L^p([t,∞))}`.
    pub transferred: f64,
    pub holds: bool,
}

/// Constant for the transfer from `L^q` to `L^p` tails, `p <= q`.
pub fn transfer_constant(p: f64, qexp: f64) -> f64 {
    if p == qexp {
        1.0
    } else if qexp.is_infinite() {
        p.powf(-1.0 / p)
    } else {
        (1.0 - (-p).exp()).powf(-1.0 / p)
    }
}

/// Verify that `‖u‖_{L^q([t,∞))} <= e^{-λt}` implies `‖u‖_{L^p([t,∞))} <= C̃ λ^{1/q-1/p} e^{-λt}`
/// on a sampled scalar series.
pub fn subadmissible_decay_check(times: &[f64], values: &[f64], p: f64, qexp: f64, lambda: f64) -> Result<SubadmissibleCheck> {
    if !(p >= 1.0 && qexp >= p) {
        return Err(Error::param("p/q", format!("need 1 <= p <= q, got p={p} q={qexp}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::param("lambda", "must be positive"));
    }
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::InsufficientSamples { found: times.len().min(values.len()), needed: 2 });
    }
    let weighted_sup = |tails: Vec<f64>| {
        tails.iter().zip(times).fold(0.0f64, |m, (v, t)| m.max(v * (lambda * t).exp()))
    };
    let k_q = weighted_sup(tail_norms(times, values, qexp));
    if k_q > 1.0 + 1e-3 {
        return Err(Error::Hypothesis(format!("L^q tail exceeds e^(-lambda t) by factor {k_q}")));
    }
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let transferred = weighted_sup(tail_norms(times, values, p)) * lambda.powf(inv(p) - inv(qexp));
    let c_tilde = transfer_constant(p, qexp);
    Ok(SubadmissibleCheck { c_tilde, k_q, transferred, holds: transferred <= c_tilde * k_q * (1.0 + 1e-6) })
}

/// Exponents `(p, b)` for the nonlinear Strichartz estimate with power `m`, and the gain `μ`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct N1Choice {
    pub d: usize,
    pub m: f64,
    pub p: f64,
    pub b: f64,
    pub mu: f64,
}

impl N1Choice {
    /// `0 <= b <= 1`, with `b < 1` when `p = d > 1`.
    pub fn b1(&self) -> bool {
        let tol = 1e-12;
        let endpoint = (self.p - self.d as f64).abs() < tol && self.d > 1;
        self.b >= -tol && self.b <= 1.0 + tol && !(endpoint && self.b >= 1.0 - tol)
    }

    /// `(d/m)((m+1)/p - 1/r'_max) <= b <= (d/m)((m+1)/p - 1/2)`.
    pub fn b2(&self) -> bool {
        let (lo, hi) = b2_interval(self.d, self.m, self.p);
        self.b >= lo - 1e-12 && self.b <= hi + 1e-12
    }

    /// `2 <= p <= r_max`.
    pub fn p_range(&self) -> bool {
        let rmax_inv = to_f64(r_max_inv(self.d));
        self.p >= 2.0 - 1e-12 && 1.0 / self.p >= rmax_inv - 1e-12
    }
}

fn b2_interval(d: usize, m: f64, p: f64) -> (f64, f64) {
    let rprime_inv = 1.0 - to_f64(r_max_inv(d));
    let df = d as f64;
    ((df / m) * ((m + 1.0) / p - rprime_inv), (df / m) * ((m + 1.0) / p - 0.5))
}

pub fn choose_n1_exponents(d: usize, m: f64) -> Result<N1Choice> {
    if !(1..=3).contains(&d) {
        return Err(Error::Dimension { expected: 3, got: d });
    }
    if !(m > 0.0 && m < alpha_max(d)) {
        return Err(Error::param("m", format!("{m} outside (0, {})", alpha_max(d))));
    }
    let df = d as f64;
    let (p, b) = match d {
        1 => (2.0, ((m - 1.0) / (2.0 * m)).max(0.0)),
        2 => {
            let lo = ((2.0 * m - 1.0) / (2.0 * m)).max(0.0);
            (2.0, 0.5 * (lo + 1.0))
        }
        _ if m <= 2.0 / (df - 2.0) => (2.0, (df / 2.0 - 1.0 / m).max(0.0)),
        _ => (2.0 * (m + 1.0) * df / (2.0 * (m + 1.0) + df), 1.0),
    };
    let mu = 1.0 - 0.5 * m * (df / 2.0 - b);
    let c = N1Choice { d, m, p, b, mu };
    if !(mu > 0.0 && c.b1() && c.b2() && c.p_range()) {
        return Err(Error::Hypothesis(format!("no valid exponents for d={d}, m={m}: {c:?}")));
    }
    Ok(c)
}
