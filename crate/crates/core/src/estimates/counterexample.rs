//! `u(x, y) = 1_{0<x<1} x^{ma} ψ(x^a y)` in two variables: finite in `L^p` and `L^q` but not in
//! `L^p_x L^q_y` once the inner cutoff `ε` is removed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub m: f64,
    pub a: f64,
    pub p: f64,
    pub q: f64,
    pub eps: Vec<f64>,
    /// `‖u‖_{L^p_x L^q_y}` with `x > ε`, per cutoff.
    pub aniso: Vec<f64>,
    pub iso_p: Vec<f64>,
    pub iso_q: Vec<f64>,
    /// Slope of `log aniso` against `log ε`.
    pub fitted_exponent: f64,
    /// `(1 + ap(m - 1/q))/p`.
    pub expected_exponent: f64,
    /// Increments between successive cutoffs shrink for both isotropic norms.
    pub iso_converge: bool,
    /// Increments of the anisotropic norm do not shrink.
    pub aniso_grows: bool,
}

fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Check `p > q > 0`, `0 < m < 1/q` and `ap(m - 1/q) < -1 < min(ap(m - 1/p), aq(m - 1/q))`.
pub fn validate_counterexample(m: f64, a: f64, p: f64, q: f64) -> Result<()> {
    if !(q > 0.0 && p > q && p.is_finite()) {
        return Err(Error::param("p/q", format!("need p > q > 0, got p = {p}, q = {q}")));
    }
    if !(m > 0.0 && m < 1.0 / q) {
        return Err(Error::Hypothesis(format!("no admissible a exists unless 0 < m < 1/q; got m = {m}")));
    }
    let k_aniso = a * p * (m - 1.0 / q);
    let k_p = a * p * (m - 1.0 / p);
    let k_q = a * q * (m - 1.0 / q);
    if !(a > 0.0 && k_aniso < -1.0 && -1.0 < k_p.min(k_q)) {
        return Err(Error::Hypothesis(format!(
            "exponents {k_aniso}, {k_p}, {k_q} violate ap(m-1/q) < -1 < min(ap(m-1/p), aq(m-1/q))"
        )));
    }
    Ok(())
}

const NX: usize = 64;
const NY: usize = 400;
const Y_CUT: f64 = 8.0;

/// The three norms of `u` with `ψ(z) = amp·e^{-z²}`, the `x`-integral cut at each `ε`.
/// Both integrals are done by Simpson's rule, in `ln x` and in `y` over `|y| < 8 x^{-a}`.
pub fn appendix_b(m: f64, a: f64, p: f64, q: f64, eps: &[f64], amp: f64) -> Result<CounterexampleReport> {
    validate_counterexample(m, a, p, q)?;
    if eps.len() < 2 || eps.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(Error::param("eps", "need at least two cutoffs in (0, 1)"));
    }
    let u = |x: f64, y: f64| amp.abs() * x.powf(m * a) * (-(x.powf(a) * y).powi(2)).exp();
    // ∫|u(x, y)|^e dy
    let inner = |x: f64, e: f64| {
        let w = Y_CUT * x.powf(-a);
        simpson(-w, w, NY, |y| u(x, y).powf(e))
    };
    let norms = |eps: f64| {
        let n = NX * ((-eps.ln()).ceil() as usize).max(1);
        let over_x = |g: &dyn Fn(f64) -> f64| simpson(eps.ln(), 0.0, n, |s| g(s.exp()) * s.exp());
        let aniso = over_x(&|x| inner(x, q).powf(p / q)).powf(1.0 / p);
        let iso_p = over_x(&|x| inner(x, p)).powf(1.0 / p);
        let iso_q = over_x(&|x| inner(x, q)).powf(1.0 / q);
        (aniso, iso_p, iso_q)
    };
    let mut sorted = eps.to_vec();
    sorted.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let vals: Vec<(f64, f64, f64)> = sorted.iter().map(|&e| norms(e)).collect();
    let aniso: Vec<f64> = vals.iter().map(|v| v.0).collect();
    let iso_p: Vec<f64> = vals.iter().map(|v| v.1).collect();
    let iso_q: Vec<f64> = vals.iter().map(|v| v.2).collect();

    let (xs, ys): (Vec<f64>, Vec<f64>) = sorted.iter().zip(&aniso).filter(|(_, v)| **v > 0.0).map(|(e, v)| (e.ln(), v.ln())).unzip();
    let fitted_exponent = if xs.len() >= 2 {
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        sxy / sxx
    } else {
        0.0
    };
    let incs = |v: &[f64]| v.windows(2).map(|w| w[1] - w[0]).collect::<Vec<f64>>();
    let shrinking = |v: &[f64]| incs(v).windows(2).all(|w| w[1].abs() < w[0].abs());
    Ok(CounterexampleReport {
        m,
        a,
        p,
        q,
        eps: sorted,
        iso_converge: shrinking(&iso_p) && shrinking(&iso_q),
        aniso_grows: incs(&aniso).windows(2).all(|w| w[1] >= w[0] && w[0] > 0.0),
        aniso,
        iso_p,
        iso_q,
        fitted_exponent,
        expected_exponent: (1.0 + a * p * (m - 1.0 / q)) / p,
    })
}
