//! Realization -> squared EDM -> centered Gram -> realization, then compare.

use distgeom::linalg::{
    gram_from_sqedm, is_psd, numerical_rank, realize_from_gram, sqedm_from_realization,
    RANK_TOL_FACTOR,
};
use distgeom::model::{congruent, Realization, DEFAULT_TOL};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> distgeom::error::Result<()> {
    let x = Realization::random_uniform(12, 3, &mut ChaCha8Rng::seed_from_u64(2024));
    let d = sqedm_from_realization(&x);
    let b = gram_from_sqedm(&d);
    println!("Gram matrix PSD: {}", is_psd(&b, DEFAULT_TOL)?);
    println!(
        "Gram rank:       {}",
        numerical_rank(b.matrix(), RANK_TOL_FACTOR)
    );

    let y = realize_from_gram(&b, 3, DEFAULT_TOL)?;
    let e = sqedm_from_realization(&y);
    let mut worst: f64 = 0.0;
    for i in 0..x.n() {
        for j in 0..x.n() {
            worst = worst.max((d.matrix()[(i, j)] - e.matrix()[(i, j)]).abs());
        }
    }
    println!("max |D(x) - D(y)| = {worst:.2e}");
    // y is x up to rotation, translation and possibly a reflection.
    println!("congruent: {}", congruent(&x, &y, 1e-8, true)?);
    Ok(())
}
