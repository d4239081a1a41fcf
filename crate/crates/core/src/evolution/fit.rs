//! Exponential decay rates fitted to norm time series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values at or below this are ignored by the fit.
pub const FIT_FLOOR: f64 = 1e-12;
/// Largest log-space RMS for which a rate is reported.
pub const MAX_RESIDUAL: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Fitted `λ` in `‖·‖ ≈ C e^{-λt}`; absent when the fit is poor.
    pub lambda_hat: Option<f64>,
    /// `ln C`.
    pub intercept: f64,
    /// Slope-derived rate regardless of quality.
    pub rate: f64,
    /// Rate of the gradient norm over the rate of the norm.
    pub c1_hat: Option<f64>,
    pub window: (f64, f64),
    /// RMS of the log-space residual.
    pub residual: f64,
    pub samples: usize,
    pub norms_tracked: Vec<String>,
}

fn regress(times: &[f64], values: &[f64], window: (f64, f64), needed: usize) -> Result<(f64, f64, f64, usize)> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, v)| **t >= window.0 - 1e-12 && **t <= window.1 + 1e-12 && **v > FIT_FLOOR && v.is_finite())
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if pts.len() < needed.max(2) {
        return Err(Error::InsufficientSamples { found: pts.len(), needed: needed.max(2) });
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    if stt == 0.0 {
        return Err(Error::InsufficientSamples { found: 1, needed });
    }
    let slope = sty / stt;
    let icpt = my - slope * mt;
    let rms = (pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok((-slope, icpt, rms, pts.len()))
}

/// Default window `[t_0 + 0.2 (T - t_0), T]` over the sampled range.
pub fn default_window(times: &[f64]) -> (f64, f64) {
    match (times.first(), times.last()) {
        (Some(&a), Some(&b)) => (a + 0.2 * (b - a), b),
        _ => (0.0, 0.0),
    }
}

/// Log-linear least squares on samples inside `window` above the floor.
pub fn fit_decay(times: &[f64], values: &[f64], window: Option<(f64, f64)>) -> Result<DecayFit> {
    fit_decay_min(times, values, window, 5)
}

/// As [`fit_decay`] with a custom minimum number of usable samples.
pub fn fit_decay_min(times: &[f64], values: &[f64], window: Option<(f64, f64)>, needed: usize) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(Error::param("values", "length differs from times"));
    }
    let window = window.unwrap_or_else(|| default_window(times));
    let (rate, intercept, residual, samples) = regress(times, values, window, needed)?;
    Ok(DecayFit {
        lambda_hat: (residual < MAX_RESIDUAL).then_some(rate),
        intercept,
        rate,
        c1_hat: None,
        window,
        residual,
        samples,
        norms_tracked: Vec::new(),
    })
}

/// As [`fit_decay`], also fitting the gradient norm and reporting the rate ratio.
pub fn fit_decay_with_gradient(
    times: &[f64],
    values: &[f64],
    grad_values: &[f64],
    window: Option<(f64, f64)>,
) -> Result<DecayFit> {
    let mut fit = fit_decay(times, values, window)?;
    let g = fit_decay(times, grad_values, Some(fit.window))?;
    if let (Some(l), Some(lg)) = (fit.lambda_hat, g.lambda_hat) {
        if l != 0.0 {
            fit.c1_hat = Some(lg / l);
        }
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn pure_exponential() {
        let t = grid(0.0, 5.0, 51);
        let v: Vec<f64> = t.iter().map(|t| (-3.0 * t).exp()).collect();
        let f = fit_decay(&t, &v, None).unwrap();
        assert!((f.lambda_hat.unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(f.window, (1.0, 5.0));
    }

    #[test]
    fn sum_of_exponentials() {
        let t = grid(0.0, 3.0, 301);
        let v: Vec<f64> = t.iter().map(|t| (-3.0 * t).exp() + (-10.0 * t).exp()).collect();
        let l = fit_decay(&t, &v, Some((1.0, 3.0))).unwrap().lambda_hat.unwrap();
        // the faster term steepens the log-slope, so the fit lands just above 3
        assert!((l - 3.0001717890317328).abs() < 1e-9, "{l}");
    }

    #[test]
    fn zero_series_is_an_error() {
        let t = grid(0.0, 1.0, 10);
        assert!(matches!(fit_decay(&t, &[0.0; 10], None), Err(Error::InsufficientSamples { found: 0, .. })));
    }

    #[test]
    fn noisy_series_has_no_rate() {
        let t = grid(0.0, 1.0, 40);
        let v: Vec<f64> = (0..40).map(|k| if k % 2 == 0 { 1.0 } else { 1e-3 }).collect();
        let f = fit_decay(&t, &v, Some((0.0, 1.0))).unwrap();
        assert!(f.lambda_hat.is_none() && f.residual > MAX_RESIDUAL);
    }

    #[test]
    fn gradient_ratio() {
        let t = grid(0.0, 4.0, 41);
        let v: Vec<f64> = t.iter().map(|t| (-2.0 * t).exp()).collect();
        let g: Vec<f64> = t.iter().map(|t| 5.0 * (-1.0 * t).exp()).collect();
        let f = fit_decay_with_gradient(&t, &v, &g, None).unwrap();
        assert!((f.c1_hat.unwrap() - 0.5).abs() < 1e-12);
    }
}
