//! Backward fixed-point construction of the error for two crossing solitons.

use nls_trains::evolution::{forward_deviation, picard_construct, PicardConfig, Scheme};
use nls_trains::solitons::SolitonParams;
use nls_trains::train::{plan_construction, BoundStateCache, PlanRequest, TrainSpec};
use nls_trains::{Grid, Nonlinearity};

fn main() -> nls_trains::Result<()> {
    let nl = Nonlinearity::pure(2.0, 1)?;
    let cache = BoundStateCache::new(nl, 1e-6);
    let sols = vec![SolitonParams::new(1.0, vec![10.0], vec![0.0], 0.0)?, SolitonParams::new(1.0, vec![-10.0], vec![0.0], 0.0)?];
    let spec = TrainSpec::single(1, sols, 0.9, 4.0 * 2f64.sqrt(), 1.5)?;
    let plan = plan_construction(&PlanRequest { dims: vec![1], alpha1: 2.0, alpha2: 2.0, t0: 0.0, rho_ball: 1.0 });
    let mut cfg = PicardConfig::new(0.0, 4.0, 400);
    cfg.store_every = 10;
    let c = picard_construct(&spec, &plan, &cfg, &[Grid::uniform(1, 2048, 80.0)?], &cache)?;
    let run = c.top();
    for t in &run.traces {
        println!("lambda {:>5.2}: converged at {:?}, factors {:.3?}", t.lambda, t.converged_at, t.factors);
    }
    for (name, fit) in run.decay_fits() {
        if let Ok(f) = fit {
            println!("{name}: rate {:.2} lambda_hat {:?}", f.rate, f.lambda_hat);
        }
    }
    println!("time grids: {:?}", c.refinements.iter().map(|r| r.n_time).collect::<Vec<_>>());
    println!("forward deviation {:.2e}", forward_deviation(&run.solution, &nl, Scheme::Yoshida4, 1e-3, 3.2)?);
    Ok(())
}
