//! Branch-and-prune on a random DMDGP instance, and the same solution set
//! rebuilt from one solution with the pruning group.

use distgeom::bp::{
    bp_solve, classify_order, dmdgp_instance, orbit_generate, predicted_solution_count,
    pruning_group, BpOptions,
};
use distgeom::model::Realization;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> distgeom::error::Result<()> {
    let x = Realization::random_uniform(9, 3, &mut ChaCha8Rng::seed_from_u64(7));
    // One long-range distance between vertices 2 and 7 prunes part of the tree.
    let inst = dmdgp_instance(&x, &[(1, 6)])?;
    let order = classify_order(&inst);
    println!("order: {:?}", order.kind);

    let set = bp_solve(&inst, &BpOptions::default())?;
    println!("solutions: {}", set.solutions.len());
    println!(
        "level counts: {:?}, pruned {}",
        set.level_counts, set.pruned_count
    );
    println!(
        "predicted: {:?}",
        predicted_solution_count(&order, &inst, true)?
    );

    let group = pruning_group(&order, &inst)?;
    let orbit = orbit_generate(&set.solutions[0], &group, &inst, 1e-6, true)?;
    println!(
        "generators at levels {:?}; orbit of one solution has {} members",
        group.generator_levels,
        orbit.solutions.len()
    );
    Ok(())
}
