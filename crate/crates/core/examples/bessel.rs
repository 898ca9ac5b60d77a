//! K0 on each evaluation branch, compared with the quadrature reference,
//! and the Bessel tail of the model profile.

use hml::painleve::solve_u1;
use hml::specfn::{k0_eval, k0_quadrature};
use std::f64::consts::PI;

fn main() -> hml::Result<()> {
    for x in [0.5, 1.0, 2.0, 10.0, 25.0, 60.0] {
        let e = k0_eval(x)?;
        let q = k0_quadrature(x);
        println!("K0({x:>4}) = {:.16e}  {:?}  rel vs quadrature {:.1e}", e.value, e.method, (e.value - q).abs() / q);
    }
    let u = solve_u1(1e-4, 12.0, 4000)?;
    for r in [3.0, 5.0, 8.0, 10.0] {
        let ratio = PI * u.eval(r)?.0 / hml::specfn::k0(8.0 * f64::powf(r, 1.5) / 3.0)?;
        println!("pi u(r) / K0(8 r^1.5 / 3) at r = {r}: {ratio:.8}");
    }
    println!("max deviation on [3, 10]: {:.2e}", u.bessel_match(3.0, 10.0)?);
    Ok(())
}
