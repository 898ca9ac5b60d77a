//! Saddle-connection periods of `q2 = z^3 - 1` and the envelope decay slope.

use hml::poly::HolomorphicPoly;
use hml::spectral::{envelope_fit, periods, QuadraticDifferential};

fn main() -> hml::Result<()> {
    let q = QuadraticDifferential::new(HolomorphicPoly::from_real(&[-1.0, 0.0, 0.0, 1.0]))?;
    let tab = periods(&q)?;
    for p in &tab.pairs {
        println!("({}, {}): Z = {:.12} {:+.12}i  length {:.12}", p.i, p.j, p.z.re, p.z.im, p.m);
    }
    println!("M = {:.12}, |Z_gamma0| = {:.12}", tab.m, tab.z_gamma0());
    let ts: Vec<f64> = (0..9).map(|k| 4.0 + k as f64).collect();
    let f = envelope_fit(&tab, &ts)?;
    println!("slope {:.5} (3/2 log t removed) vs predicted {:.5}", f.full_log.slope, f.slope_predicted);
    Ok(())
}
