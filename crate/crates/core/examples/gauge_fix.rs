//! Infinitesimal gauge fixing for a random SU(4) field with two ramified
//! blocks in different coordinates.

use hml::sunform::{check_simple_crossing, crossing_samples, gauge_fix, random_instance, report};
use rand::SeedableRng;

fn main() -> hml::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let (phi, pd) = random_instance(&mut rng, 4, 2, true)?;
    for (k, b) in phi.blocks.iter().enumerate() {
        println!("block {k}: size {}, base value at 0 = {:.6}", b.size(), b.base().coeff(0));
    }
    println!("simple crossing: {}", check_simple_crossing(&phi.matrix(), &crossing_samples(phi.radius)));
    let g = gauge_fix(&phi, &pd)?;
    let r = report(&phi, &pd, &g)?;
    println!("normal-form residual {:.2e}, oracle deviation {:.2e}", r.residual, r.oracle_deviation);
    for d in &r.denominators {
        println!("pair {:?} {:?}: min |den| {:.3e}, winding {}", d.pair, d.kind, d.min_modulus, d.winding);
    }
    Ok(())
}
