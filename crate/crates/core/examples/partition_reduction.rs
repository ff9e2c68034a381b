//! Partition as a one-dimensional DGP on a cycle: a balanced split of the
//! integers is exactly a closed walk on the line.

use distgeom::bp::{bp_solve, BpOptions};
use distgeom::embed::{
    partition_bruteforce, partition_from_realization, partition_to_edgp1, realize_partition_yes,
};
use distgeom::model::validate;

fn main() -> distgeom::error::Result<()> {
    for a in [vec![3u64, 1, 1, 2, 2, 1], vec![1, 2, 4]] {
        let inst = partition_to_edgp1(&a)?;
        let found = bp_solve(&inst, &BpOptions::default())?;
        println!(
            "{a:?}: {} realizations mod reflection",
            found.solutions.len()
        );
        match partition_bruteforce(&a) {
            Some(set) => {
                let x = realize_partition_yes(&a, &set)?;
                println!(
                    "  witness {set:?} -> error {}",
                    validate(&inst, &x, 0.0)?.max_abs_error
                );
                let back = partition_from_realization(&a, &found.solutions[0])?;
                println!("  witness read off a BP solution: {back:?}");
            }
            None => println!("  no balanced split"),
        }
    }
    Ok(())
}
