//! `sup |F^model - F^app|` on the cutoff annulus against the quotient bound.

use hml::localmodel::{Cutoff, LocalModel};
use hml::painleve::solve_u1;
use hml::poly::HolomorphicPoly;
use hml::varsolve::{max_principle_bound, solve_deviation, VarGrid};
use hml::C64;

fn main() -> hml::Result<()> {
    let u = solve_u1(1e-4, 12.0, 4000)?;
    let p = HolomorphicPoly::from_real(&[1.0]);
    for t in [4.0, 8.0, 12.0, 16.0] {
        let m = LocalModel::new(&u, t, Cutoff::default())?;
        let d = solve_deviation(&m, &p, &VarGrid::default())?;
        let f_app = |z: C64| Ok(m.f_x(&p, z)? + d.eval(z)?);
        let diff = |z: C64| Ok(-d.eval(z)?);
        let b = max_principle_bound(&m, &p, &f_app, &diff, 200, 32)?;
        println!(
            "t = {t:>4}: sup {:.4e}  rim {:.4e}  bound {:.4e} / {:.4e}  ok {}",
            b.lhs, b.rim, b.rhs_typeset, b.rhs_pde, b.satisfied
        );
    }
    Ok(())
}
