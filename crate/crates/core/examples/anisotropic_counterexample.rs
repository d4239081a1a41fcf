//! A function whose isotropic norms converge while a mixed norm blows up.

use nls_trains::estimates::appendix_b;

fn main() -> nls_trains::Result<()> {
    let eps: Vec<f64> = (2..=8).map(|k| 10f64.powi(-k)).collect();
    let r = appendix_b(0.25, 1.5, 4.0, 2.0, &eps, 1.0)?;
    for (k, e) in r.eps.iter().enumerate() {
        println!("eps {e:.0e}: mixed {:.5} L^4 {:.5} L^2 {:.5}", r.aniso[k], r.iso_p[k], r.iso_q[k]);
    }
    println!("fitted exponent {:.4} (expected {})", r.fitted_exponent, r.expected_exponent);
    Ok(())
}
