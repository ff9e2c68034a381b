//! Fréchet embedding of a graph metric into l∞, and a random projection of
//! high-dimensional points with its distortion report.

use distgeom::embed::{frechet_embed, jll_project, linf_distance, shortest_path_metric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> distgeom::error::Result<()> {
    let ring: Vec<(usize, usize, f64)> = (0..6).map(|v| (v, (v + 1) % 6, 1.0 + v as f64)).collect();
    let metric = shortest_path_metric(6, &ring)?;
    let x = frechet_embed(&metric);
    let worst = (0..6)
        .flat_map(|u| (0..6).map(move |v| (u, v)))
        .map(|(u, v)| (linf_distance(x.point(u), x.point(v)) - metric.d(u, v)).abs())
        .fold(0.0, f64::max);
    println!("weighted 6-cycle in l∞^6: max distortion {worst}");

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let points: Vec<Vec<f64>> = (0..200)
        .map(|_| (0..2000).map(|_| rng.random::<f64>()).collect())
        .collect();
    let (projected, report) = jll_project(&points, 0.3, 5)?;
    println!(
        "200 points: 2000 -> {} dimensions, {:.1}% of pairs within 1 ± ε, ratios in [{:.3}, {:.3}]",
        projected[0].len(),
        100.0 * report.fraction_within_bounds,
        report.worst_ratio_low,
        report.worst_ratio_high
    );
    Ok(())
}
