//! Empirical constants of the pointwise nonlinear inequalities.

use nls_trains::nonlinearity::oracle::{estimate_c0, sup_ratio, Inequality};
use nls_trains::Nonlinearity;

fn main() -> nls_trains::Result<()> {
    let nl = Nonlinearity::new(1.0, 3.0, 0.5, 1)?;
    for which in Inequality::ALL {
        for radius in [10.0, 1e-3] {
            let r = sup_ratio(&nl, which, radius, 20_000, 3, 0)?;
            println!("{:<22} |w| <= {radius:<6} sup {:.4} change on doubling {:.1}%", which.name(), r.sup_ratio, 100.0 * r.relative_change);
        }
    }
    println!("C0 ~ {:.4}", estimate_c0(&nl, 10_000, 0)?);
    Ok(())
}
