//! Bond-dilution rigidity percolation on a triangular patch.

use distgeom::percolation::{crossing, run_percolation, sweep, LatticePatch};

fn main() {
    let patch = LatticePatch::Triangular { rows: 10, cols: 10 };

    let t = run_percolation(&patch, 0.75, 1);
    if let Some(s) = t.snapshots.iter().find(|s| s.has_spanning_cluster) {
        println!(
            "one run at p = 0.75: spanning cluster after {} bonds (eta {:.4}), largest cluster {}",
            s.edge_count, s.eta, s.largest_rigid_component_size
        );
    }

    let ps: Vec<f64> = (0..8).map(|i| 0.50 + 0.05 * i as f64).collect();
    let rows = sweep(&patch, &ps, 100, 0, 1);
    for r in &rows {
        println!("p = {:.2}  spanning {:.2}", r.p, r.fraction_spanning_rigid);
    }
    println!(
        "fraction crosses 1/2 at p ≈ {:.3}",
        crossing(&rows, 0.5).unwrap_or(f64::NAN)
    );
}
