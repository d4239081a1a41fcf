//! Soliton trains: parameter schedules, the frequency functionals `A`, `B`, the
//! separation speed `v_*`, and the choice of construction for a requested shape.

pub mod functionals;
pub mod plan;
pub mod schedule;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, C64, PAR_MIN};
use crate::nonlinearity::Nonlinearity;
use crate::solitons::{BoundState, SolitonParams};

pub use functionals::{class_membership, compute_a, compute_b, ClassMembership, NormIndex};
pub use plan::{plan_construction, PlanRequest, Theorem, TheoremPlan};
pub use schedule::{gen_params, Directions, ParamSchedule};

/// Solitons of one spatial dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub dim: usize,
    pub solitons: Vec<SolitonParams>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainSpec {
    pub groups: Vec<Group>,
    pub a: f64,
    #[serde(rename = "D")]
    pub d_const: f64,
    pub omega_star: f64,
}

impl TrainSpec {
    pub fn new(groups: Vec<Group>, a: f64, d_const: f64, omega_star: f64) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::param("groups", "at least one group is required"));
        }
        let dims: Vec<usize> = groups.iter().map(|g| g.dim).collect();
        let shape_ok = match dims.as_slice() {
            [d] => (1..=3).contains(d),
            [e, d] => *e >= 1 && *e < *d && *d <= e + 3,
            [1, 2, 3] => true,
            _ => false,
        };
        if !shape_ok {
            return Err(Error::param("groups", format!("unsupported dimension shape {dims:?}")));
        }
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::param("a", format!("{a} must lie in (0, 1)")));
        }
        if !(d_const > 0.0) {
            return Err(Error::param("D", "must be positive"));
        }
        for g in &groups {
            for s in &g.solitons {
                if s.dim() != g.dim {
                    return Err(Error::Dimension { expected: g.dim, got: s.dim() });
                }
                if !(s.omega > 0.0 && s.omega < omega_star) {
                    return Err(Error::param("omega", format!("{} outside (0, {omega_star})", s.omega)));
                }
            }
        }
        Ok(TrainSpec { groups, a, d_const, omega_star })
    }

    pub fn single(dim: usize, solitons: Vec<SolitonParams>, a: f64, d_const: f64, omega_star: f64) -> Result<Self> {
        Self::new(vec![Group { dim, solitons }], a, d_const, omega_star)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.dim).collect()
    }

    pub fn group(&self, dim: usize) -> Option<&Group> {
        self.groups.iter().find(|g| g.dim == dim)
    }

    /// Minimum of the within-group and cross-group separation speeds.
    pub fn vstar(&self) -> f64 {
        let mut v = f64::INFINITY;
        for (i, g) in self.groups.iter().enumerate() {
            v = v.min(vstar_within(&g.solitons));
            for h in &self.groups[i + 1..] {
                v = v.min(vstar_across(&g.solitons, &h.solitons));
            }
        }
        v
    }
}

/// `½ inf_{j<k} min(1, ω_j^{1/2}, ω_k^{1/2}) |v_j - v_k|`; `+inf` for fewer than two solitons.
pub fn vstar_within(solitons: &[SolitonParams]) -> f64 {
    let mut v = f64::INFINITY;
    for (j, a) in solitons.iter().enumerate() {
        for b in &solitons[j + 1..] {
            let w = 1f64.min(a.omega.sqrt()).min(b.omega.sqrt());
            v = v.min(0.5 * w * distance(&a.v, &b.v));
        }
    }
    v
}

/// `inf_{j,k} min(σ_k^{1/2}, ω_j^{1/2}) |u_k - v_j'|` where `v_j'` keeps the first `e` components.
pub fn vstar_across(lower: &[SolitonParams], upper: &[SolitonParams]) -> f64 {
    let mut v = f64::INFINITY;
    for k in lower {
        let e = k.dim();
        for j in upper {
            let w = k.omega.sqrt().min(j.omega.sqrt());
            v = v.min(w * distance(&k.v, &j.v[..e]));
        }
    }
    v
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Bound states shared across solitons with the same dimension and frequency.
pub struct BoundStateCache {
    nl: Nonlinearity,
    tol: f64,
    map: Mutex<HashMap<(usize, u64), Arc<BoundState>>>,
}

impl BoundStateCache {
    pub fn new(nl: Nonlinearity, tol: f64) -> Self {
        BoundStateCache { nl, tol, map: Mutex::new(HashMap::new()) }
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    pub fn get(&self, dim: usize, omega: f64) -> Result<Arc<BoundState>> {
        let key = (dim, omega.to_bits());
        if let Some(bs) = self.map.lock().unwrap().get(&key) {
            return Ok(bs.clone());
        }
        let bs = Arc::new(BoundState::solve(&self.nl, dim, omega, self.tol)?);
        self.map.lock().unwrap().insert(key, bs.clone());
        Ok(bs)
    }

    pub fn insert(&self, bs: BoundState) {
        self.map.lock().unwrap().insert((bs.dim, bs.omega.to_bits()), Arc::new(bs));
    }
}

/// A group with its profiles attached, ready for evaluation on grids.
#[derive(Clone)]
pub struct Train {
    pub dim: usize,
    pub members: Vec<(SolitonParams, Arc<BoundState>)>,
}

impl Train {
    pub fn build(group: &Group, cache: &BoundStateCache) -> Result<Self> {
        let members = group
            .solitons
            .iter()
            .map(|s| Ok((s.clone(), cache.get(group.dim, s.omega)?)))
            .collect::<Result<_>>()?;
        Ok(Train { dim: group.dim, members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Each soliton on the grid.
    pub fn components(&self, t: f64, grid: &Grid) -> Result<Vec<Field>> {
        self.members.iter().map(|(sp, bs)| bs.soliton_field(sp, t, grid)).collect()
    }

    /// `T = Σ R_j`.
    pub fn field(&self, t: f64, grid: &Grid) -> Result<Field> {
        if grid.dim() < self.dim {
            return Err(Error::Dimension { expected: self.dim, got: grid.dim() });
        }
        let members = &self.members;
        Ok(Field::from_fn(grid, t, |x| members.iter().map(|(sp, bs)| bs.soliton_at(sp, t, &x)).sum()))
    }

    /// `T` and `∇T` from the exact profile derivatives.
    pub fn field_with_gradient(&self, t: f64, grid: &Grid) -> Result<(Field, Vec<Field>)> {
        let mut u = Field::zeros(grid, t);
        let mut g: Vec<Field> = (0..grid.dim()).map(|_| Field::zeros(grid, t)).collect();
        for (sp, bs) in &self.members {
            let (r, gr) = bs.soliton_with_gradient(sp, t, grid)?;
            u.add_assign(&r)?;
            for (a, b) in g.iter_mut().zip(&gr) {
                a.add_assign(b)?;
            }
        }
        Ok((u, g))
    }

    /// `Σ f(R_j)`.
    pub fn sum_of_f(&self, nl: &Nonlinearity, t: f64, grid: &Grid) -> Result<Field> {
        if grid.dim() < self.dim {
            return Err(Error::Dimension { expected: self.dim, got: grid.dim() });
        }
        let members = &self.members;
        Ok(Field::from_fn(grid, t, |x| {
            members.iter().map(|(sp, bs)| nl.eval_f(bs.soliton_at(sp, t, &x))).sum()
        }))
    }

    /// `Σ |R_j|` as a real field stored in the real part.
    pub fn abs_sum(&self, t: f64, grid: &Grid) -> Result<Field> {
        let comps = self.components(t, grid)?;
        let mut data = vec![C64::new(0.0, 0.0); grid.len()];
        let fill = |(i, d): (usize, &mut C64)| *d = C64::new(comps.iter().map(|c| c.data[i].norm()).sum(), 0.0);
        if grid.len() >= PAR_MIN {
            data.par_iter_mut().enumerate().for_each(fill);
        } else {
            data.iter_mut().enumerate().for_each(fill);
        }
        Field::new(grid, t, data)
    }

    /// `Σ |∇R_j|`.
    pub fn grad_abs_sum(&self, t: f64, grid: &Grid) -> Result<Field> {
        let mut data = vec![C64::new(0.0, 0.0); grid.len()];
        for (sp, bs) in &self.members {
            let (_, g) = bs.soliton_with_gradient(sp, t, grid)?;
            for (i, d) in data.iter_mut().enumerate() {
                d.re += g.iter().map(|c| c.data[i].norm_sqr()).sum::<f64>().sqrt();
            }
        }
        Field::new(grid, t, data)
    }
}
