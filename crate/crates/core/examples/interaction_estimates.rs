//! Decay of the interaction source of two crossing solitons, with the Hölder chain per slice.

use nls_trains::estimates::{check_h0, soliton_sum_bound};
use nls_trains::solitons::SolitonParams;
use nls_trains::train::{BoundStateCache, Group, Train};
use nls_trains::{Grid, Nonlinearity};

fn main() -> nls_trains::Result<()> {
    let nl = Nonlinearity::pure(2.0, 1)?;
    let cache = BoundStateCache::new(nl, 1e-6);
    let sols = vec![SolitonParams::new(1.0, vec![5.0], vec![0.0], 0.0)?, SolitonParams::new(1.0, vec![-5.0], vec![0.0], 0.0)?];
    let train = Train::build(&Group { dim: 1, solitons: sols }, &cache)?;
    let grid = Grid::uniform(1, 8192, 60.0)?;
    let times: Vec<f64> = (0..=20).map(|k| 0.5 + 0.125 * k as f64).collect();
    let rep = check_h0(&train, &nl, &grid, &times, 2.0, 1.0, 0.9)?;
    println!("v_* = {}, Hölder holds on every slice: {}", rep.vstar, rep.holder_holds);
    for r in &rep.rates {
        println!("{:>4}: rate {:.3} (target {:.3}) ok {}", r.norm, r.fit.rate, r.target, r.ok);
    }
    for p in [1.0, 2.0, f64::INFINITY] {
        let b = soliton_sum_bound(&train, &grid, 0.0, p, 0.9, 4.0 * 2f64.sqrt(), 2.0, false)?;
        println!("p={p}: |sum R_j|_p = {:.4} <= {:.4}", b.measured, b.bound);
    }
    Ok(())
}
