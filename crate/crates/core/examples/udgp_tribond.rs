//! Rebuild a point set from its unlabeled distances.

use std::time::Duration;

use distgeom::model::Realization;
use distgeom::udgp::{best_assignment, same_shape, tribond, DistanceList, TribondOutcome};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> distgeom::error::Result<()> {
    let x = Realization::random_uniform(6, 2, &mut ChaCha8Rng::seed_from_u64(11));
    let list = DistanceList::from_realization(&x);
    println!("{} distances, e.g. {:.4}", list.m(), list.values()[0]);

    match tribond(&list, 1e-8, Some(Duration::from_secs(30)))? {
        TribondOutcome::Realized(y) => {
            let (_, cost) = best_assignment(&y, &list);
            println!(
                "realized, cost {cost:.2e}, same shape: {}",
                same_shape(&x, &y, 1e-6)
            );
        }
        other => println!("{other:?}"),
    }

    // Three points on a line cannot have distances 1, 1 and 5.
    let bad = DistanceList::new(1, 3, vec![1.0, 1.0, 5.0])?;
    println!("{{1, 1, 5}}: {:?}", tribond(&bad, 1e-6, None)?);
    Ok(())
}
