//! Radial ground states in one to three dimensions and their decay certificates.

use nls_trains::solitons::BoundState;
use nls_trains::Nonlinearity;

fn main() -> nls_trains::Result<()> {
    let nl = Nonlinearity::pure(1.2, 3)?;
    for dim in 1..=3 {
        let bs = BoundState::solve(&nl.in_dim(dim)?, dim, 1.0, 1e-6)?;
        let d_min = bs.minimal_decay_constant(0.9);
        let cert = bs.certify_decay(0.9, 1.01 * d_min)?;
        println!(
            "d={dim}: phi(0)={:.6} residual {:.1e} minimal D {:.4}, bound with 1.01 D holds: {} (margin {:.3e})",
            bs.peak(),
            bs.residual,
            d_min,
            cert.holds,
            cert.worst_margin
        );
    }
    // cubic 1D has the closed form sqrt(2) sech(x)
    let cubic = BoundState::solve(&Nonlinearity::pure(2.0, 1)?, 1, 1.0, 1e-6)?;
    println!("cubic 1D: phi(1) = {:.8}, closed form {:.8}", cubic.value(1.0), 2f64.sqrt() / 1f64.cosh());
    Ok(())
}
