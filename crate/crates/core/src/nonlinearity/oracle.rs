//! Sampling oracles for the pointwise inequalities satisfied by `f`.
//!
//! Each oracle returns both sides of an inequality with the universal constant
//! stripped from the right side; the sup of the ratio over many samples is the
//! empirical constant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Nonlinearity;
use crate::error::{Error, Result};
use crate::grid::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `|f(w1+w2) - f(w1)|`
    Increment,
    /// `|f_z(w1+w2) - f_z(w1)| + |f_zbar(w1+w2) - f_zbar(w1)|`
    DerivativeIncrement,
    /// `|grad [f(w1+w2) - f(w1)]|`
    GradientIncrement,
    /// `|grad [f(w1+w2) - f(w1) - f(w2)]|`
    GradientCross,
    /// `|f(sum w_j) - sum f(w_j)|` with per-term exponent shifts
    Decomposition,
    /// two-term form of `Decomposition`
    PairDecomposition,
}

impl Inequality {
    pub const ALL: [Inequality; 6] = [
        Inequality::Increment,
        Inequality::DerivativeIncrement,
        Inequality::GradientIncrement,
        Inequality::GradientCross,
        Inequality::Decomposition,
        Inequality::PairDecomposition,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Inequality::Increment => "increment",
            Inequality::DerivativeIncrement => "derivative_increment",
            Inequality::GradientIncrement => "gradient_increment",
            Inequality::GradientCross => "gradient_cross",
            Inequality::Decomposition => "decomposition",
            Inequality::PairDecomposition => "pair_decomposition",
        }
    }
}

/// One sample point. `grad` holds one gradient value per entry of `w` (only the
/// gradient oracles read it); `theta` and `phi` are indexed `[i][j]` with `i` the
/// power index, and for the pair form only column 0 is read.
#[derive(Clone, Debug, Default)]
pub struct OracleInput {
    pub w: Vec<C64>,
    pub grad: Vec<C64>,
    pub theta: [Vec<f64>; 2],
    pub phi: [Vec<f64>; 2],
}

impl OracleInput {
    pub fn pair(w1: C64, w2: C64) -> Self {
        OracleInput { w: vec![w1, w2], ..Default::default() }
    }

    pub fn with_gradients(w1: C64, w2: C64, g1: C64, g2: C64) -> Self {
        OracleInput { w: vec![w1, w2], grad: vec![g1, g2], ..Default::default() }
    }

    /// Tuple with the same `theta` and `phi` for every index.
    pub fn tuple(w: Vec<C64>, theta: f64, phi: f64) -> Self {
        let n = w.len();
        OracleInput { w, grad: vec![], theta: [vec![theta; n], vec![theta; n]], phi: [vec![phi; n], vec![phi; n]] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleValue {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

fn ratio(lhs: f64, rhs: f64) -> OracleValue {
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
    OracleValue { lhs, rhs, ratio }
}

/// `x^p` with the convention `0^0 = 1`.
fn pw(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        x.powf(p)
    }
}

fn grad_f(nl: &Nonlinearity, w: C64, g: C64) -> C64 {
    let p = nl.eval_wirtinger(w);
    p.fz * g + p.fzbar * g.conj()
}

fn need(input: &OracleInput, w: usize, grad: usize) -> Result<()> {
    if input.w.len() < w || input.grad.len() < grad {
        return Err(Error::param("oracle input", format!("needs {w} values and {grad} gradients")));
    }
    Ok(())
}

fn check_unit(name: &str, xs: &[f64]) -> Result<()> {
    if xs.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::param(name, "exponent shifts must lie in [0, 1]"));
    }
    Ok(())
}

/// Both sides of the chosen inequality at one sample.
pub fn evaluate(nl: &Nonlinearity, which: Inequality, input: &OracleInput) -> Result<OracleValue> {
    let alphas = nl.alphas();
    match which {
        Inequality::Increment => {
            need(input, 2, 0)?;
            let (w1, w2) = (input.w[0], input.w[1]);
            let lhs = (nl.eval_f(w1 + w2) - nl.eval_f(w1)).norm();
            let (a, b) = (w1.norm(), w2.norm());
            let rhs = alphas.iter().map(|&al| b * pw(a, al) + pw(b, al + 1.0)).sum();
            Ok(ratio(lhs, rhs))
        }
        Inequality::DerivativeIncrement => {
            need(input, 2, 0)?;
            let (w1, w2) = (input.w[0], input.w[1]);
            let p = nl.eval_wirtinger(w1 + w2);
            let q = nl.eval_wirtinger(w1);
            let lhs = (p.fz - q.fz).norm() + (p.fzbar - q.fzbar).norm();
            let (a, b) = (w1.norm(), w2.norm());
            let rhs = alphas.iter().map(|&al| pw(b, al.min(1.0)) * pw(a + b, (al - 1.0).max(0.0))).sum();
            Ok(ratio(lhs, rhs))
        }
        Inequality::GradientIncrement => {
            need(input, 2, 2)?;
            let (w1, w2, g1, g2) = (input.w[0], input.w[1], input.grad[0], input.grad[1]);
            let lhs = (grad_f(nl, w1 + w2, g1 + g2) - grad_f(nl, w1, g1)).norm();
            let (a, b) = (w1.norm(), w2.norm());
            let rhs = alphas
                .iter()
                .map(|&al| {
                    pw(b, al.min(1.0)) * pw(a + b, (al - 1.0).max(0.0)) * g1.norm() + pw(a + b, al) * g2.norm()
                })
                .sum();
            Ok(ratio(lhs, rhs))
        }
        Inequality::GradientCross => {
            need(input, 2, 2)?;
            let (w1, w2, g1, g2) = (input.w[0], input.w[1], input.grad[0], input.grad[1]);
            let lhs = (grad_f(nl, w1 + w2, g1 + g2) - grad_f(nl, w1, g1) - grad_f(nl, w2, g2)).norm();
            let (a, b) = (w1.norm(), w2.norm());
            let rhs = alphas
                .iter()
                .map(|&al| {
                    let m = al.min(1.0);
                    pw(a + b, (al - 1.0).max(0.0)) * (pw(b, m) * g1.norm() + pw(a, m) * g2.norm())
                })
                .sum();
            Ok(ratio(lhs, rhs))
        }
        Inequality::Decomposition => {
            let n = input.w.len();
            for i in 0..2 {
                if input.theta[i].len() < n || input.phi[i].len() < n {
                    return Err(Error::param("theta/phi", "one shift per term and power is required"));
                }
                check_unit("theta", &input.theta[i])?;
                check_unit("phi", &input.phi[i])?;
            }
            let total: C64 = input.w.iter().sum();
            let lhs = (nl.eval_f(total) - input.w.iter().map(|&z| nl.eval_f(z)).sum::<C64>()).norm();
            let mags: Vec<f64> = input.w.iter().map(|z| z.norm()).collect();
            let all: f64 = mags.iter().sum();
            let mut rhs = 0.0;
            for (i, &al) in alphas.iter().enumerate() {
                for (j, &m) in mags.iter().enumerate() {
                    let rest = all - m;
                    let (th, ph) = (input.theta[i][j], input.phi[i][j]);
                    rhs += pw(m, al + th) * pw(rest, 1.0 - th) + pw(m, 1.0 - ph) * pw(rest, al + ph);
                }
            }
            Ok(ratio(lhs, rhs))
        }
        Inequality::PairDecomposition => {
            need(input, 2, 0)?;
            for i in 0..2 {
                if input.theta[i].is_empty() || input.phi[i].is_empty() {
                    return Err(Error::param("theta/phi", "one shift per power is required"));
                }
                check_unit("theta", &input.theta[i][..1])?;
                check_unit("phi", &input.phi[i][..1])?;
            }
            let (w1, w2) = (input.w[0], input.w[1]);
            let lhs = (nl.eval_f(w1 + w2) - nl.eval_f(w1) - nl.eval_f(w2)).norm();
            let (a, b) = (w1.norm(), w2.norm());
            let rhs = alphas
                .iter()
                .enumerate()
                .map(|(i, &al)| {
                    let (th, ph) = (input.theta[i][0], input.phi[i][0]);
                    pw(a, al + th) * pw(b, 1.0 - th) + pw(a, 1.0 - ph) * pw(b, al + ph)
                })
                .sum();
            Ok(ratio(lhs, rhs))
        }
    }
}

/// The weighted arithmetic-geometric step `x + y >= x^{1-theta} y^theta`.
pub fn young_holds(x: f64, y: f64, theta: f64) -> bool {
    x + y >= pw(x, 1.0 - theta) * pw(y, theta)
}

fn disk(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    let a = std::f64::consts::TAU * rng.random::<f64>();
    C64::from_polar(r, a)
}

/// Random sample for `which` with all values drawn uniformly from the disk of `radius`.
pub fn random_input(which: Inequality, rng: &mut ChaCha8Rng, radius: f64, terms: usize) -> OracleInput {
    let n = if which == Inequality::Decomposition { terms.max(2) } else { 2 };
    let w: Vec<C64> = (0..n).map(|_| disk(rng, radius)).collect();
    let grad: Vec<C64> = (0..n).map(|_| disk(rng, radius)).collect();
    let mut draw = || -> [Vec<f64>; 2] { [(0..n).map(|_| rng.random()).collect(), (0..n).map(|_| rng.random()).collect()] };
    let theta = draw();
    let phi = draw();
    OracleInput { w, grad, theta, phi }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleReport {
    pub inequality: Inequality,
    pub radius: f64,
    pub samples: usize,
    pub sup_ratio: f64,
    /// Sup over the first half of the samples.
    pub sup_ratio_half: f64,
    /// Relative change of the sup when the sample count doubles.
    pub relative_change: f64,
}

/// Empirical sup of the ratio over `samples` seeded draws from the disk of `radius`.
pub fn sup_ratio(
    nl: &Nonlinearity,
    which: Inequality,
    radius: f64,
    samples: usize,
    terms: usize,
    seed: u64,
) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup = 0.0f64;
    let mut sup_half = 0.0f64;
    let half = samples / 2;
    for k in 0..samples {
        let v = evaluate(nl, which, &random_input(which, &mut rng, radius, terms))?;
        if !v.ratio.is_finite() {
            return Err(Error::Hypothesis(format!("{} ratio not finite at sample {k}", which.name())));
        }
        sup = sup.max(v.ratio);
        if k + 1 == half {
            sup_half = sup;
        }
    }
    let relative_change = if sup_half > 0.0 { (sup - sup_half) / sup_half } else { 0.0 };
    Ok(OracleReport { inequality: which, radius, samples, sup_ratio: sup, sup_ratio_half: sup_half, relative_change })
}

/// Empirical constant: the largest sup ratio over all oracles at the reference radii.
pub fn estimate_c0(nl: &Nonlinearity, samples: usize, seed: u64) -> Result<f64> {
    let mut c0 = 0.0f64;
    for which in Inequality::ALL {
        for radius in [10.0, 1e-3] {
            c0 = c0.max(sup_ratio(nl, which, radius, samples, 3, seed)?.sup_ratio);
        }
    }
    Ok(c0)
}
