//! Free Schrödinger flow and split-step integration of the full equation.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimates::norms::{lp_norm, GridNorm};
use crate::grid::{Field, Grid, Spectral, C64, PAR_MIN};
use crate::nonlinearity::Nonlinearity;

/// Spectral machinery for `e^{itΔ}` on one grid: multiplier `e^{-i|k|²t}`.
pub struct Propagator {
    grid: Grid,
    spectral: Spectral,
    k2: Vec<f64>,
    cache: Mutex<HashMap<u64, std::sync::Arc<Vec<C64>>>>,
}

impl Propagator {
    pub fn new(grid: &Grid) -> Self {
        Propagator {
            grid: grid.clone(),
            spectral: Spectral::new(grid),
            k2: grid.k_squared(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    fn multiplier(&self, dt: f64) -> std::sync::Arc<Vec<C64>> {
        let mut cache = self.cache.lock().unwrap();
        cache
            .entry(dt.to_bits())
            .or_insert_with(|| std::sync::Arc::new(self.k2.iter().map(|k| C64::from_polar(1.0, -k * dt)).collect()))
            .clone()
    }

    /// Multiply by the Fourier multiplier of `e^{i dt Δ}` in place on raw samples.
    pub fn apply(&self, data: &mut [C64], dt: f64) {
        if dt == 0.0 {
            return;
        }
        let m = self.multiplier(dt);
        self.spectral.forward(data);
        if data.len() >= PAR_MIN {
            data.par_iter_mut().zip(m.par_iter()).for_each(|(z, w)| *z *= w);
        } else {
            data.iter_mut().zip(m.iter()).for_each(|(z, w)| *z *= w);
        }
        self.spectral.inverse(data);
    }

    /// `e^{i dt Δ} u`; the time stamp advances by `dt`.
    pub fn free(&self, u: &Field, dt: f64) -> Result<Field> {
        self.grid.check_same(&u.grid)?;
        let mut data = u.data.clone();
        self.apply(&mut data, dt);
        Ok(Field { grid: u.grid.clone(), t: u.t + dt, data })
    }
}

/// One-shot free propagation.
pub fn free_propagate(u: &Field, dt: f64) -> Result<Field> {
    Propagator::new(&u.grid).free(u, dt)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Second order: half kinetic, nonlinear phase, half kinetic.
    Strang,
    /// Fourth-order triple-jump composition of Strang steps.
    #[default]
    Yoshida4,
}

impl Scheme {
    pub fn order(&self) -> u32 {
        match self {
            Scheme::Strang => 2,
            Scheme::Yoshida4 => 4,
        }
    }

    /// Fractions of `dt` for the composed Strang steps.
    fn weights(&self) -> Vec<f64> {
        match self {
            Scheme::Strang => vec![1.0],
            Scheme::Yoshida4 => {
                let w1 = 1.0 / (2.0 - 2f64.powf(1.0 / 3.0));
                let w0 = -(2f64.powf(1.0 / 3.0)) * w1;
                vec![w1, w0, w1]
            }
        }
    }
}

/// Split-step integrator for `i u_t + Δu + f(u) = 0`.
pub struct SplitStep {
    pub prop: Propagator,
    pub nl: Nonlinearity,
    pub scheme: Scheme,
}

impl SplitStep {
    pub fn new(grid: &Grid, nl: Nonlinearity, scheme: Scheme) -> Self {
        SplitStep { prop: Propagator::new(grid), nl, scheme }
    }

    fn nonlinear_phase(&self, data: &mut [C64], dt: f64) {
        let nl = &self.nl;
        let rot = |z: &mut C64| *z *= C64::from_polar(1.0, nl.g(z.norm_sqr()) * dt);
        if data.len() >= PAR_MIN {
            data.par_iter_mut().for_each(rot);
        } else {
            data.iter_mut().for_each(rot);
        }
    }

    fn strang(&self, data: &mut [C64], dt: f64) {
        self.prop.apply(data, 0.5 * dt);
        self.nonlinear_phase(data, dt);
        self.prop.apply(data, 0.5 * dt);
    }

    /// Advance raw samples by one step of size `dt`.
    pub fn step(&self, data: &mut [C64], dt: f64) {
        for w in self.scheme.weights() {
            self.strang(data, w * dt);
        }
    }

    /// Largest nonlinear phase `g(|u|²) dt` over the samples.
    pub fn max_phase(&self, u: &[C64], dt: f64) -> f64 {
        let w = self.scheme.weights().iter().fold(0.0f64, |m, w| m.max(w.abs()));
        u.iter().map(|z| self.nl.g(z.norm_sqr()).abs()).fold(0.0, f64::max) * dt * w
    }

    /// One step on a field.
    pub fn split_step(&self, u: &Field, dt: f64) -> Result<Field> {
        let mut data = u.data.clone();
        self.step(&mut data, dt);
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite { step: 1, t: u.t + dt });
        }
        Ok(Field { grid: u.grid.clone(), t: u.t + dt, data })
    }

    /// Integrate `steps` steps; `observe(step, field)` sees every `every`-th state including the first.
    pub fn evolve(
        &self,
        u0: &Field,
        dt: f64,
        steps: usize,
        every: usize,
        mut observe: impl FnMut(usize, &Field) -> Result<()>,
    ) -> Result<EvolveSummary> {
        self.prop.grid.check_same(&u0.grid)?;
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::param("dt", "must be finite and nonzero"));
        }
        let every = every.max(1);
        let mut u = u0.clone();
        let m0 = u.mass();
        let mut drift = 0.0f64;
        let mut warnings = Vec::new();
        let phase = self.max_phase(&u.data, dt.abs());
        if phase >= std::f64::consts::PI {
            warnings.push(format!("nonlinear phase per step {phase:.3} exceeds pi"));
        }
        observe(0, &u)?;
        for n in 1..=steps {
            self.step(&mut u.data, dt);
            u.t = u0.t + n as f64 * dt;
            if u.data.iter().any(|z| !z.is_finite()) {
                return Err(Error::NonFinite { step: n, t: u.t });
            }
            if n % every == 0 || n == steps {
                if m0 > 0.0 {
                    drift = drift.max((u.mass() - m0).abs() / m0);
                }
                observe(n, &u)?;
            }
        }
        Ok(EvolveSummary { final_field: u, max_mass_drift: drift, warnings })
    }
}

pub struct EvolveSummary {
    pub final_field: Field,
    pub max_mass_drift: f64,
    pub warnings: Vec<String>,
}

/// Grid `L²` norm of `i u_t + Δu + f(u)` at interior samples, by centred differences in time.
pub fn nls_residual(series: &[Field], nl: &Nonlinearity) -> Result<Vec<f64>> {
    if series.len() < 3 {
        return Err(Error::InsufficientSamples { found: series.len(), needed: 3 });
    }
    let grid = &series[0].grid;
    let dt = series[1].t - series[0].t;
    for w in series.windows(2) {
        grid.check_same(&w[1].grid)?;
        if ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.abs() {
            return Err(Error::param("times", "residual needs uniform time sampling"));
        }
    }
    let spectral = Spectral::new(grid);
    let mut out = Vec::with_capacity(series.len() - 2);
    for k in 1..series.len() - 1 {
        let lap = spectral.laplacian(grid, &series[k].data);
        let data: Vec<C64> = (0..grid.len())
            .map(|i| {
                let ut = (series[k + 1].data[i] - series[k - 1].data[i]) / (2.0 * dt);
                C64::i() * ut + lap[i] + nl.eval_f(series[k].data[i])
            })
            .collect();
        out.push(Field { grid: grid.clone(), t: series[k].t, data }.l2());
    }
    Ok(out)
}

/// `‖e^{itΔ}u‖_p (4π|t|)^{d(½-1/p)} / ‖u‖_{p'}`; at most one when the dispersive bound holds.
pub fn dispersive_ratio(u: &Field, t: f64, p: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(Error::param("p", "dispersive estimate needs p in [2, inf]"));
    }
    let pp = if p.is_infinite() { 1.0 } else { p / (p - 1.0) };
    let d = u.grid.dim() as f64;
    let lhs = lp_norm(&free_propagate(u, t)?, &GridNorm::lp(p))?;
    let rhs = lp_norm(u, &GridNorm::lp(pp))?;
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    Ok(lhs * (4.0 * std::f64::consts::PI * t.abs()).powf(d * (0.5 - inv_p)) / rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solitons::{BoundState, SolitonParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: &Grid, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..grid.len()).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        Field::new(grid, 0.0, data).unwrap()
    }

    #[test]
    fn identity_at_zero_and_unitary() {
        let g = Grid::uniform(2, 32, 5.0).unwrap();
        let u = random_field(&g, 1);
        let same = free_propagate(&u, 0.0).unwrap();
        assert_eq!(same.data, u.data);
        let v = free_propagate(&u, 0.7).unwrap();
        assert!((v.l2() - u.l2()).abs() < 1e-12 * u.l2());
        let back = free_propagate(&v, -0.7).unwrap();
        assert!(back.sub(&u).unwrap().l2() < 1e-12 * u.l2());
    }

    #[test]
    fn constant_state_rotates() {
        let g = Grid::uniform(1, 16, 4.0).unwrap();
        let nl = Nonlinearity::new(2.0, 3.0, 0.5, 1).unwrap();
        let a = C64::new(0.6, 0.3);
        let u = Field::from_fn(&g, 0.0, |_| a);
        for scheme in [Scheme::Strang, Scheme::Yoshida4] {
            let ss = SplitStep::new(&g, nl, scheme);
            let out = ss.evolve(&u, 0.01, 100, 100, |_, _| Ok(())).unwrap().final_field;
            let exact = a * C64::from_polar(1.0, nl.g(a.norm_sqr()) * 1.0);
            assert!(out.data.iter().all(|z| (z - exact).norm() < 1e-12), "{scheme:?}");
        }
    }

    #[test]
    fn strang_is_second_order() {
        let g = Grid::uniform(1, 1024, 40.0).unwrap();
        let nl = Nonlinearity::pure(2.0, 1).unwrap();
        let bs = BoundState::solve(&nl, 1, 1.0, 1e-8).unwrap();
        let sp = SolitonParams::new(1.0, vec![2.0], vec![-5.0], 0.0).unwrap();
        let u0 = bs.soliton_field(&sp, 0.0, &g).unwrap();
        let exact = bs.soliton_field(&sp, 1.0, &g).unwrap();
        let ss = SplitStep::new(&g, nl, Scheme::Strang);
        let err = |dt: f64| {
            let n = (1.0 / dt).round() as usize;
            let out = ss.evolve(&u0, dt, n, n, |_, _| Ok(())).unwrap().final_field;
            out.sub(&exact).unwrap().l2()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
    }

    #[test]
    fn soliton_residual_is_small() {
        let g = Grid::uniform(1, 1024, 40.0).unwrap();
        let nl = Nonlinearity::pure(2.0, 1).unwrap();
        let bs = BoundState::solve(&nl, 1, 1.0, 1e-8).unwrap();
        let sp = SolitonParams::new(1.0, vec![2.0], vec![0.0], 0.3).unwrap();
        let dt = 1e-3;
        let series: Vec<Field> = (0..5).map(|k| bs.soliton_field(&sp, k as f64 * dt, &g).unwrap()).collect();
        let res = nls_residual(&series, &nl).unwrap();
        assert!(res.iter().all(|&r| r < 1e-5), "{res:?}");
        let zero: Vec<Field> = (0..3).map(|k| Field::zeros(&g, k as f64)).collect();
        assert_eq!(nls_residual(&zero, &nl).unwrap(), vec![0.0]);
    }

    #[test]
    fn residual_distinguishes_phase_conventions() {
        // dropping the t factor of the kinetic phase leaves an O(|v|²/4) residual
        let g = Grid::uniform(1, 1024, 40.0).unwrap();
        let nl = Nonlinearity::pure(2.0, 1).unwrap();
        let bs = BoundState::solve(&nl, 1, 1.0, 1e-8).unwrap();
        let sp = SolitonParams::new(1.0, vec![2.0], vec![0.0], 0.0).unwrap();
        let dt = 1e-3;
        let wrong: Vec<Field> = (0..3)
            .map(|k| {
                let t = k as f64 * dt;
                let mut f = bs.soliton_field(&sp, t, &g).unwrap();
                // undo -¼|v|²t and apply a constant -¼|v|² instead
                let fix = C64::from_polar(1.0, 0.25 * 4.0 * t - 0.25 * 4.0);
                f.data.iter_mut().for_each(|z| *z *= fix);
                f
            })
            .collect();
        let res = nls_residual(&wrong, &nl).unwrap()[0];
        assert!(res > 0.5, "{res}");
    }

    #[test]
    fn mass_is_conserved() {
        let g = Grid::uniform(2, 64, 10.0).unwrap();
        let nl = Nonlinearity::pure(1.0, 2).unwrap();
        let u = Field::from_fn(&g, 0.0, |x| C64::new((-(x[0] * x[0] + x[1] * x[1])).exp(), 0.2 * x[0]));
        let ss = SplitStep::new(&g, nl, Scheme::Yoshida4);
        let s = ss.evolve(&u, 1e-2, 200, 10, |_, _| Ok(())).unwrap();
        assert!(s.max_mass_drift < 1e-10, "{}", s.max_mass_drift);
    }

    #[test]
    fn dispersive_ratio_gaussian() {
        let g = Grid::uniform(1, 4096, 200.0).unwrap();
        let u = Field::from_fn(&g, 0.0, |x| C64::new((-x[0] * x[0]).exp(), 0.0));
        for &t in &[0.5, 1.0, 2.0, 4.0] {
            let r = dispersive_ratio(&u, t, f64::INFINITY).unwrap();
            assert!(r <= 1.0 + 1e-3, "{t} {r}");
        }
        assert!(dispersive_ratio(&u, 1.0, 1.5).is_err());
    }
}
