//! Rigidity of a few classic graphs: infinitesimal, generic, Laman, pebble
//! game, global, and the 3D double banana.

use distgeom::graph::Graph;
use distgeom::model::{DgpInstance, Edge, Framework, Realization};
use distgeom::rigidity::{
    count_condition, double_banana, generic_rigidity, globally_rigid, infinitesimal_rigidity,
    laman_bruteforce, pebble_game_2_3,
};

fn main() -> distgeom::error::Result<()> {
    // Path 1-2-3 in the plane bends freely at the middle vertex.
    let x = Realization::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]])?;
    let path = DgpInstance::new(3, 2, vec![Edge::exact(0, 1, 1.0), Edge::exact(1, 2, 1.0)])?;
    let v = infinitesimal_rigidity(&Framework::new(path, x)?, 1e-9);
    println!(
        "bent path:    {:?}, rank {}, dof {}",
        v.status, v.rank, v.dof
    );

    let k4 = Graph::complete(4);
    println!("K4 generic:   {:?}", generic_rigidity(&k4, 2, 3, 0).status);
    println!("K4 Laman:     {}", laman_bruteforce(&k4)?);
    println!("K4 pebble:    {:?}", pebble_game_2_3(&k4).verdict);
    println!("K4 global:    {}", globally_rigid(&k4, 2, 3, 0)?);

    let bowtie = Graph::new(5, vec![(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])?;
    let out = pebble_game_2_3(&bowtie);
    println!(
        "bowtie:       {:?}, clusters {:?}",
        out.verdict, out.components
    );

    // Counts say rigid in 3D, yet the two bananas rotate about their hinge.
    let db = double_banana();
    println!(
        "double banana: counts {}, generic {:?}",
        count_condition(&db, 3)?,
        generic_rigidity(&db, 3, 3, 0).status
    );
    Ok(())
}
