//! Split-step evolution of a moving soliton against its closed form.

use nls_trains::evolution::{Scheme, SplitStep};
use nls_trains::solitons::SolitonParams;
use nls_trains::train::{BoundStateCache, Group, Train};
use nls_trains::{Grid, Nonlinearity};

fn main() -> nls_trains::Result<()> {
    let nl = Nonlinearity::pure(2.0, 1)?;
    let cache = BoundStateCache::new(nl, 1e-6);
    let train = Train::build(&Group { dim: 1, solitons: vec![SolitonParams::new(1.0, vec![2.0], vec![0.0], 0.0)?] }, &cache)?;
    let grid = Grid::uniform(1, 4096, 40.0)?;
    for scheme in [Scheme::Strang, Scheme::Yoshida4] {
        let ss = SplitStep::new(&grid, nl, scheme);
        let run = ss.evolve(&train.field(0.0, &grid)?, 1e-3, 5000, 1000, |_, u| {
            let exact = train.field(u.t, &grid)?;
            println!("{scheme:?} t={:.1} error {:.3e}", u.t, u.sub(&exact)?.l2() / exact.l2());
            Ok(())
        })?;
        println!("{scheme:?} mass drift {:.2e}", run.max_mass_drift);
    }
    Ok(())
}
