//! Seeded random polynomial fields through the Coulomb-gauge identity.

use hml::defalg::coulomb_batch;

fn main() -> hml::Result<()> {
    let b = coulomb_batch(7, 60, &[2, 3, 4], 2)?;
    println!(
        "{} instances (ranks {:?}, degree {}): max Re residual {:.2e}, max Im residual {:.2e}, worst #{}",
        b.instances, b.ranks, b.degree, b.max_re_residual, b.max_im_residual, b.worst
    );
    Ok(())
}
