//! Periodic boxes, sampled complex fields and the spectral transforms on them.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Below this length pointwise kernels stay on the calling thread.
pub(crate) const PAR_MIN: usize = 1 << 14;

/// Uniform periodic grid on `[-L, L)` per axis, row-major with axis 0 slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: Vec<usize>,
    pub half_width: Vec<f64>,
}

impl Grid {
    pub fn new(n: Vec<usize>, half_width: Vec<f64>) -> Result<Self> {
        if n.is_empty() || n.len() > 3 {
            return Err(Error::param("grid.n", "between one and three axes are supported"));
        }
        if n.len() != half_width.len() {
            return Err(Error::param("grid.half_width", "one half-width per axis is required"));
        }
        for &k in &n {
            if k < 2 || !k.is_power_of_two() {
                return Err(Error::param("grid.n", format!("{k} is not a power of two >= 2")));
            }
        }
        for &l in &half_width {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::param("grid.half_width", format!("{l} must be positive")));
            }
        }
        Ok(Grid { n, half_width })
    }

    pub fn uniform(dim: usize, n: usize, half_width: f64) -> Result<Self> {
        Grid::new(vec![n; dim], vec![half_width; dim])
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_width[axis] / self.n[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Coordinate of sample `i` along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        -self.half_width[axis] + i as f64 * self.spacing(axis)
    }

    pub fn coords(&self, axis: usize) -> Vec<f64> {
        (0..self.n[axis]).map(|i| self.coord(axis, i)).collect()
    }

    /// Angular wavenumbers along `axis` in FFT storage order.
    pub fn wavenumbers(&self, axis: usize) -> Vec<f64> {
        let n = self.n[axis] as i64;
        let dk = std::f64::consts::PI / self.half_width[axis];
        (0..n).map(|j| if j < n / 2 { j as f64 * dk } else { (j - n) as f64 * dk }).collect()
    }

    /// Multi-index of a flat index, padded with zeros to three axes.
    pub fn unflatten(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for a in (0..self.dim()).rev() {
            out[a] = idx % self.n[a];
            idx /= self.n[a];
        }
        out
    }

    /// Physical point of a flat index, padded with zeros to three axes.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let m = self.unflatten(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim() {
            x[a] = self.coord(a, m[a]);
        }
        x
    }

    /// Squared wavenumber magnitude for every flat index.
    pub fn k_squared(&self) -> Vec<f64> {
        let ks: Vec<Vec<f64>> = (0..self.dim()).map(|a| self.wavenumbers(a)).collect();
        (0..self.len())
            .map(|i| {
                let m = self.unflatten(i);
                (0..self.dim()).map(|a| ks[a][m[a]] * ks[a][m[a]]).sum()
            })
            .collect()
    }

    /// Grid made of the leading `dim` axes of this one.
    pub fn leading(&self, dim: usize) -> Result<Grid> {
        if dim == 0 || dim > self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: dim });
        }
        Grid::new(self.n[..dim].to_vec(), self.half_width[..dim].to_vec())
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.n, other.n)));
        }
        Ok(())
    }
}

/// Complex samples on a grid at one time.
#[derive(Clone, Debug)]
pub struct Field {
    pub grid: Grid,
    pub t: f64,
    pub data: Vec<C64>,
}

impl Field {
    pub fn zeros(grid: &Grid, t: f64) -> Self {
        Field { grid: grid.clone(), t, data: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: &Grid, t: f64, f: impl Fn([f64; 3]) -> C64 + Sync) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); grid.len()];
        if data.len() >= PAR_MIN {
            data.par_iter_mut().enumerate().for_each(|(i, v)| *v = f(grid.point(i)));
        } else {
            data.iter_mut().enumerate().for_each(|(i, v)| *v = f(grid.point(i)));
        }
        Field { grid: grid.clone(), t, data }
    }

    pub fn new(grid: &Grid, t: f64, data: Vec<C64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {}",
                data.len(),
                grid.len()
            )));
        }
        Ok(Field { grid: grid.clone(), t, data })
    }

    /// Discrete mass: sum of |u|^2 times the cell volume.
    pub fn mass(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn l2(&self) -> f64 {
        self.mass().sqrt()
    }

    pub fn sup(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm_sqr().sqrt()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn add_assign(&mut self, other: &Field) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        self.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += *b);
        Ok(())
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Field { grid: self.grid.clone(), t: self.t, data })
    }

    /// Embed a field on the leading axes of `target`, constant along the remaining
    /// axes. The source may be finer than the target by an integer factor per axis.
    pub fn extend_to(&self, target: &Grid) -> Result<Field> {
        let e = self.grid.dim();
        let strides = embedding_strides(&self.grid, target)?;
        let mut out = Field::zeros(target, self.t);
        let inner: usize = target.n[e..].iter().product();
        let src_n = &self.grid.n;
        for (outer, chunk) in out.data.chunks_mut(inner).enumerate() {
            // outer enumerates the leading e axes of the target, row-major
            let mut rem = outer;
            let mut m = [0usize; 3];
            for a in (0..e).rev() {
                m[a] = rem % target.n[a];
                rem /= target.n[a];
            }
            let mut src = 0usize;
            for a in 0..e {
                src = src * src_n[a] + m[a] * strides[a];
            }
            let v = self.data[src];
            chunk.iter_mut().for_each(|z| *z = v);
        }
        Ok(out)
    }
}

/// Sub-sampling factors that map the leading axes of `target` onto `source`.
pub fn embedding_strides(source: &Grid, target: &Grid) -> Result<Vec<usize>> {
    let e = source.dim();
    if e > target.dim() {
        return Err(Error::Dimension { expected: target.dim(), got: e });
    }
    let mut strides = Vec::with_capacity(e);
    for a in 0..e {
        let same_box = (source.half_width[a] - target.half_width[a]).abs()
            <= 1e-12 * target.half_width[a];
        if !same_box || source.n[a] % target.n[a] != 0 {
            return Err(Error::GridMismatch(format!(
                "axis {a}: source ({}, {}) does not refine target ({}, {})",
                source.n[a], source.half_width[a], target.n[a], target.half_width[a]
            )));
        }
        strides.push(source.n[a] / target.n[a]);
    }
    Ok(strides)
}

/// Forward and inverse multi-dimensional FFTs for one grid shape.
pub struct Spectral {
    n: Vec<usize>,
    fwd: Vec<Arc<dyn Fft<f64>>>,
    inv: Vec<Arc<dyn Fft<f64>>>,
}

impl Spectral {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = grid.n.iter().map(|&k| planner.plan_fft_forward(k)).collect();
        let inv = grid.n.iter().map(|&k| planner.plan_fft_inverse(k)).collect();
        Spectral { n: grid.n.clone(), fwd, inv }
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.transform(data, &self.fwd);
    }

    /// Inverse transform, normalised so that `inverse(forward(u)) == u`.
    pub fn inverse(&self, data: &mut [C64]) {
        self.transform(data, &self.inv);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }

    fn transform(&self, data: &mut [C64], plans: &[Arc<dyn Fft<f64>>]) {
        let dim = self.n.len();
        let total: usize = self.n.iter().product();
        assert_eq!(data.len(), total, "field length does not match the transform");
        let parallel = total >= PAR_MIN;
        for axis in 0..dim {
            let na = self.n[axis];
            let stride: usize = self.n[axis + 1..].iter().product();
            let plan = &plans[axis];
            if stride == 1 {
                if parallel && total > na {
                    data.par_chunks_mut(na).for_each(|c| plan.process(c));
                } else {
                    plan.process(data);
                }
                continue;
            }
            // gather each line along `axis` into a contiguous buffer
            let block = na * stride;
            let lines = |chunk: &mut [C64], buf: &mut Vec<C64>| {
                for i in 0..na {
                    for j in 0..stride {
                        buf[j * na + i] = chunk[i * stride + j];
                    }
                }
                plan.process(buf);
                for i in 0..na {
                    for j in 0..stride {
                        chunk[i * stride + j] = buf[j * na + i];
                    }
                }
            };
            if parallel {
                let mut buf = vec![C64::new(0.0, 0.0); total];
                let src = &*data;
                buf.par_chunks_mut(na).enumerate().for_each(|(line, out)| {
                    let (b, j) = (line / stride, line % stride);
                    for (i, z) in out.iter_mut().enumerate() {
                        *z = src[b * block + i * stride + j];
                    }
                    plan.process(out);
                });
                data.par_iter_mut().enumerate().for_each(|(idx, z)| {
                    let (b, r) = (idx / block, idx % block);
                    let (i, j) = (r / stride, r % stride);
                    *z = buf[(b * stride + j) * na + i];
                });
            } else {
                let mut buf = vec![C64::new(0.0, 0.0); block];
                for chunk in data.chunks_mut(block) {
                    lines(chunk, &mut buf);
                }
            }
        }
    }

    /// Spectral partial derivatives of `u` along every axis; the Nyquist mode is dropped.
    pub fn gradient(&self, grid: &Grid, u: &[C64]) -> Vec<Vec<C64>> {
        let mut hat = u.to_vec();
        self.forward(&mut hat);
        (0..grid.dim())
            .map(|axis| {
                let ks = grid.wavenumbers(axis);
                let nyq = grid.n[axis] / 2;
                let mut d = hat.clone();
                for (i, z) in d.iter_mut().enumerate() {
                    let m = grid.unflatten(i)[axis];
                    let k = if m == nyq { 0.0 } else { ks[m] };
                    *z *= C64::new(0.0, k);
                }
                self.inverse(&mut d);
                d
            })
            .collect()
    }

    /// Spectral Laplacian of `u`.
    pub fn laplacian(&self, grid: &Grid, u: &[C64]) -> Vec<C64> {
        let k2 = grid.k_squared();
        let mut hat = u.to_vec();
        self.forward(&mut hat);
        hat.iter_mut().zip(&k2).for_each(|(z, k)| *z *= -k);
        self.inverse(&mut hat);
        hat
    }
}

/// Pointwise magnitude of a gradient, `sqrt(sum_a |d_a u|^2)`.
pub fn gradient_magnitude(grad: &[Vec<C64>]) -> Vec<f64> {
    let n = grad.first().map_or(0, |g| g.len());
    (0..n).map(|i| grad.iter().map(|g| g[i].norm_sqr()).sum::<f64>().sqrt()).collect()
}
