//! Semiflat disk value from the limiting triple against the cover integral.

use hml::metricdiff::{sf_disk_consistency, weighted_norm_closed_form, DiskGrid};
use hml::poly::HolomorphicPoly;

fn main() -> hml::Result<()> {
    for coeffs in [vec![1.0], vec![0.0, 1.0], vec![0.5, -1.0, 2.0]] {
        let p = HolomorphicPoly::from_real(&coeffs);
        let s = sf_disk_consistency(&p, DiskGrid::default())?;
        println!(
            "Pdot {coeffs:?}: lhs {:.15e} rhs {:.15e} rel {:.1e}; int |Pdot|^2/|z| = {:.15e}",
            s.lhs,
            s.rhs,
            s.rel_err,
            weighted_norm_closed_form(&p)
        );
    }
    Ok(())
}
