//! `g_app - g_sf` on the unit disk along a ray of `t`, with the fitted rates.
//! Takes around 15 s.

use hml::localmodel::Cutoff;
use hml::metricdiff::{decay_scan, default_t_grid, DiskGrid};
use hml::painleve::solve_u1;
use hml::poly::HolomorphicPoly;
use hml::varsolve::VarGrid;

fn main() -> hml::Result<()> {
    let u = solve_u1(1e-4, 12.0, 4000)?;
    let p = HolomorphicPoly::from_real(&[1.0]);
    let d = decay_scan(&u, Cutoff::default(), &p, &default_t_grid(), DiskGrid::default(), VarGrid::default())?;
    println!("{:>8} {:>14} {:>14} {:>14}", "t", "diff", "app-model", "model-inf");
    for r in &d.rows {
        println!("{:>8.3} {:>14.6e} {:>14.6e} {:>14.6e}", r.t, r.diff, r.term_app_model, r.term_model_inf);
    }
    println!("total: gamma {:.4} (r^2 {:.5}), nearest boundary rate at R = {}", d.gamma_fit, d.r_squared, d.mechanism_radius);
    println!("model-inf channel: gamma {:.4} vs {:.4}", d.model_inf.gamma_fit, d.model_inf.gamma_predicted);
    println!("app-model channel: gamma {:.4} vs {:.4}", d.app_model.gamma_fit, d.app_model.gamma_predicted);
    Ok(())
}
