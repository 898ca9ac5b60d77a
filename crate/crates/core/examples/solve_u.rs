//! Solve the radial model ODE and print the profile at a few radii.
//!
//! `cargo run --example solve_u`

use hml::painleve::solve_u1;

fn main() -> hml::Result<()> {
    let u = solve_u1(1e-4, 12.0, 4000)?;
    println!("nodes {}  newton iterations {}  residual {:.2e}", u.len(), u.iterations, u.residual);
    println!("u + log(r)/2 -> c0 = {:.12}", u.c0);
    for r in [1e-3, 0.1, 0.5, 1.0, 2.0, 4.0] {
        let (v, d) = u.eval(r)?;
        println!("r = {r:<6} u = {v:.12e}  u' = {d:.6e}");
    }
    Ok(())
}
