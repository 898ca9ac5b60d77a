//! Disk integral of the model-versus-limit density against its boundary form.

use hml::localmodel::{Cutoff, LocalModel};
use hml::metricdiff::{stokes_check, DiskGrid};
use hml::painleve::solve_u1;
use hml::poly::HolomorphicPoly;

fn main() -> hml::Result<()> {
    let u = solve_u1(1e-4, 12.0, 4000)?;
    for coeffs in [vec![1.0], vec![0.0, 1.0], vec![1.0, 1.0]] {
        let p = HolomorphicPoly::from_real(&coeffs);
        for t in [2.0, 4.0, 8.0] {
            let m = LocalModel::new(&u, t, Cutoff::default())?;
            let s = stokes_check(&m, &p, DiskGrid::default())?;
            println!("Pdot {coeffs:?} t = {t}: disk {:.12e} boundary {:.12e} rel {:.1e}", s.lhs, s.rhs, s.rel_err);
        }
    }
    Ok(())
}
