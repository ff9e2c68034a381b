//! Bond-dilution rigidity percolation in the plane.
//!
//! Each bond of a patch is kept independently with probability `p`; the kept
//! bonds are inserted in random order into an incremental (2,3) pebble game.
//!
//! Two notions of "rigid enough" are tracked. `is_spanning_rigid` asks for the
//! whole patch to be one rigid body. `has_spanning_cluster` is the percolation
//! notion: some rigid cluster touches all four sides of a lattice patch. On
//! an open patch the corners have degree 2, so the former stays rare well
//! above the bulk threshold; sweeps report the latter.

use std::thread;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::model::eta_of;
use crate::rigidity::PebbleGame;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticePatch {
    /// `rows × cols` vertices of the triangular tessellation with open
    /// boundary: horizontal, vertical and one diagonal bond per cell.
    Triangular { rows: usize, cols: usize },
    /// Complete graph on `n` vertices; diluting it gives `G(n, p)`.
    ErdosRenyi { n: usize },
}

impl LatticePatch {
    pub fn n(&self) -> usize {
        match *self {
            LatticePatch::Triangular { rows, cols } => rows * cols,
            LatticePatch::ErdosRenyi { n } => n,
        }
    }

    /// Every bond of the undiluted patch.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        match *self {
            LatticePatch::Triangular { rows, cols } => {
                let id = |r: usize, c: usize| r * cols + c;
                let mut edges = Vec::new();
                for r in 0..rows {
                    for c in 0..cols {
                        if c + 1 < cols {
                            edges.push((id(r, c), id(r, c + 1)));
                        }
                        if r + 1 < rows {
                            edges.push((id(r, c), id(r + 1, c)));
                            if c + 1 < cols {
                                edges.push((id(r, c), id(r + 1, c + 1)));
                            }
                        }
                    }
                }
                edges
            }
            LatticePatch::ErdosRenyi { n } => (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect(),
        }
    }

    /// Whether one of the rigid `clusters` spans the patch: meets all four
    /// sides of a lattice, or covers every vertex of a complete graph.
    pub fn spanned_by(&self, clusters: &[Vec<usize>]) -> bool {
        match *self {
            LatticePatch::Triangular { rows, cols } => clusters.iter().any(|c| {
                let touches = |side: &dyn Fn(usize) -> bool| c.iter().any(|&v| side(v));
                touches(&|v| v % cols == 0)
                    && touches(&|v| v % cols == cols - 1)
                    && touches(&|v| v / cols == 0)
                    && touches(&|v| v / cols == rows - 1)
            }),
            LatticePatch::ErdosRenyi { n } => clusters.iter().any(|c| c.len() == n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Snapshot {
    pub edge_count: usize,
    pub eta: f64,
    pub largest_rigid_component_size: usize,
    pub is_spanning_rigid: bool,
    pub has_spanning_cluster: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercolationTrajectory {
    pub snapshots: Vec<Snapshot>,
}

impl PercolationTrajectory {
    pub fn last(&self) -> &Snapshot {
        self.snapshots
            .last()
            .expect("a trajectory starts with the empty graph")
    }
}

/// Records a snapshot for the empty graph and after every inserted edge.
/// Clusters are recomputed only after independent edges; a redundant edge
/// lies inside an existing cluster and changes nothing.
fn trace(patch: &LatticePatch, order: &[(usize, usize)]) -> PercolationTrajectory {
    let n = patch.n();
    let mut game = PebbleGame::new(n);
    let summary = |clusters: Vec<Vec<usize>>| {
        let largest = clusters.iter().map(Vec::len).max().unwrap_or(0);
        (largest, patch.spanned_by(&clusters))
    };
    let (mut largest, mut spans) = summary(game.clusters(n, &[]));
    let mut snapshots = vec![Snapshot {
        edge_count: 0,
        eta: 0.0,
        largest_rigid_component_size: largest,
        is_spanning_rigid: game.is_rigid(),
        has_spanning_cluster: spans,
    }];
    for (i, &(u, v)) in order.iter().enumerate() {
        if game.try_add_edge(u, v) {
            (largest, spans) = summary(game.clusters(n, &order[..=i]));
        }
        snapshots.push(Snapshot {
            edge_count: i + 1,
            eta: eta_of(n, i + 1),
            largest_rigid_component_size: largest,
            is_spanning_rigid: game.is_rigid(),
            has_spanning_cluster: spans,
        });
    }
    PercolationTrajectory { snapshots }
}

/// Bonds kept with probability `p`, in random insertion order.
fn diluted(patch: &LatticePatch, p: f64, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = rng::task_rng(seed, &[0x70657263]);
    let mut kept: Vec<_> = patch
        .edges()
        .into_iter()
        .filter(|_| rng.random_bool(p.clamp(0.0, 1.0)))
        .collect();
    kept.shuffle(&mut rng);
    kept
}

pub fn run_percolation(patch: &LatticePatch, p: f64, seed: u64) -> PercolationTrajectory {
    trace(patch, &diluted(patch, p, seed))
}

/// The open-ended process: `steps` times, draw a bond of the patch uniformly
/// and insert it with probability `p` unless it is already present.
pub fn run_percolation_resampling(
    patch: &LatticePatch,
    p: f64,
    steps: usize,
    seed: u64,
) -> PercolationTrajectory {
    let bonds = patch.edges();
    let mut rng = rng::task_rng(seed, &[0x72657361]);
    let mut present = vec![false; bonds.len()];
    let mut order = Vec::new();
    for _ in 0..steps {
        if bonds.is_empty() {
            break;
        }
        let b = rng.random_range(0..bonds.len());
        if !present[b] && rng.random_bool(p.clamp(0.0, 1.0)) {
            present[b] = true;
            order.push(bonds[b]);
        }
    }
    trace(patch, &order)
}

/// Whether the diluted patch ends up with a spanning cluster, and the edge
/// count at which one first appeared. Same draws as [`run_percolation`].
/// Rigid clusters only grow as edges are added, so the first moment is found
/// by bisection over prefixes instead of tracking clusters edge by edge.
fn spanning_outcome(patch: &LatticePatch, p: f64, seed: u64) -> Option<usize> {
    let n = patch.n();
    let order = diluted(patch, p, seed);
    let spans_after = |m: usize| {
        let prefix = &order[..m];
        let mut game = PebbleGame::new(n);
        for &(u, v) in prefix {
            game.try_add_edge(u, v);
        }
        patch.spanned_by(&game.clusters(n, prefix))
    };
    if !spans_after(order.len()) {
        return None;
    }
    let (mut lo, mut hi) = (0, order.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if spans_after(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    /// Fraction of trials that end with a spanning rigid cluster.
    pub fraction_spanning_rigid: f64,
    /// Mean edge density at the moment a spanning cluster appeared, over the
    /// trials where one did; `None` when none did.
    pub mean_eta_at_rigidity: Option<f64>,
}

/// Monte-Carlo table over `p_values`. Trial `t` at the `i`-th probability
/// uses the seed derived from `(seed, i, t)`, so `jobs` only affects speed.
pub fn sweep(
    patch: &LatticePatch,
    p_values: &[f64],
    trials_per_p: usize,
    seed: u64,
    jobs: usize,
) -> Vec<SweepRow> {
    let trials = trials_per_p.max(1);
    let tasks: Vec<(usize, usize)> = (0..p_values.len())
        .flat_map(|i| (0..trials).map(move |t| (i, t)))
        .collect();
    let run = |&(i, t): &(usize, usize)| {
        spanning_outcome(
            patch,
            p_values[i],
            rng::derive_seed(seed, &[i as u64, t as u64]),
        )
    };
    let outcomes: Vec<Option<usize>> = if jobs <= 1 {
        tasks.iter().map(run).collect()
    } else {
        let chunk = tasks.len().div_ceil(jobs).max(1);
        thread::scope(|s| {
            let handles: Vec<_> = tasks
                .chunks(chunk)
                .map(|part| s.spawn(move || part.iter().map(run).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("percolation worker panicked"))
                .collect()
        })
    };
    let n = patch.n();
    p_values
        .iter()
        .zip(outcomes.chunks(trials))
        .map(|(&p, rows)| {
            let rigid: Vec<usize> = rows.iter().flatten().copied().collect();
            SweepRow {
                p,
                fraction_spanning_rigid: rigid.len() as f64 / trials as f64,
                mean_eta_at_rigidity: (!rigid.is_empty())
                    .then(|| rigid.iter().map(|&m| eta_of(n, m)).sum::<f64>() / rigid.len() as f64),
            }
        })
        .collect()
}

/// First `p` at which the spanning fraction reaches `level`, interpolated
/// linearly between the two table rows that straddle it.
pub fn crossing(rows: &[SweepRow], level: f64) -> Option<f64> {
    let first = rows.first()?;
    if first.fraction_spanning_rigid >= level {
        return Some(first.p);
    }
    rows.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        (a.fraction_spanning_rigid < level && b.fraction_spanning_rigid >= level).then(|| {
            let t = (level - a.fraction_spanning_rigid)
                / (b.fraction_spanning_rigid - a.fraction_spanning_rigid);
            a.p + t * (b.p - a.p)
        })
    })
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("p,fraction_spanning_rigid,mean_eta\n");
    for r in rows {
        let eta = r
            .mean_eta_at_rigidity
            .map(crate::io::format_g17)
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{}\n",
            crate::io::format_g17(r.p),
            crate::io::format_g17(r.fraction_spanning_rigid),
            eta
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::rigidity::pebble_game_2_3;
    use proptest::prelude::*;

    #[test]
    fn triangular_patch_shape() {
        let patch = LatticePatch::Triangular { rows: 4, cols: 5 };
        let edges = patch.edges();
        // (cols-1)·rows + (rows-1)·cols + (rows-1)·(cols-1)
        assert_eq!(edges.len(), 4 * 4 + 3 * 5 + 3 * 4);
        let g = Graph::new(patch.n(), edges).unwrap();
        // An interior vertex has the six neighbours of the tessellation.
        assert_eq!(g.neighbors(6).len(), 6);
        assert_eq!(LatticePatch::ErdosRenyi { n: 5 }.edges().len(), 10);
    }

    #[test]
    fn empty_and_full_patches() {
        let patch = LatticePatch::Triangular { rows: 5, cols: 5 };
        let none = run_percolation(&patch, 0.0, 1);
        assert_eq!(none.snapshots.len(), 1);
        assert_eq!(none.last().largest_rigid_component_size, 1);
        assert!(!none.last().is_spanning_rigid);

        let full = run_percolation(&patch, 1.0, 1);
        assert!(full.last().is_spanning_rigid);
        assert_eq!(full.last().largest_rigid_component_size, 25);
        assert_eq!(full.last().edge_count, patch.edges().len());
    }

    #[test]
    fn a_path_never_becomes_rigid() {
        // A one-row patch is a path.
        let path = LatticePatch::Triangular { rows: 1, cols: 6 };
        let t = run_percolation(&path, 1.0, 3);
        assert!(!t.last().is_spanning_rigid);
        assert_eq!(t.last().largest_rigid_component_size, 2);
    }

    #[test]
    fn sweep_far_from_threshold() {
        let patch = LatticePatch::Triangular { rows: 6, cols: 6 };
        let rows = sweep(&patch, &[0.1, 0.95], 50, 5, 1);
        assert_eq!(rows[0].fraction_spanning_rigid, 0.0);
        assert_eq!(rows[0].mean_eta_at_rigidity, None);
        assert!(rows[1].fraction_spanning_rigid >= 0.9, "{:?}", rows[1]);
    }

    #[test]
    fn sweep_ignores_job_count() {
        let patch = LatticePatch::Triangular { rows: 5, cols: 5 };
        let ps = [0.5, 0.7, 0.9];
        assert_eq!(sweep(&patch, &ps, 20, 9, 1), sweep(&patch, &ps, 20, 9, 4));
    }

    #[test]
    fn sweep_agrees_with_full_trajectories() {
        let patch = LatticePatch::Triangular { rows: 5, cols: 5 };
        let rows = sweep(&patch, &[0.75], 30, 2, 1);
        let firsts: Vec<usize> = (0..30)
            .filter_map(|t| {
                run_percolation(&patch, 0.75, rng::derive_seed(2, &[0, t]))
                    .snapshots
                    .iter()
                    .find(|s| s.has_spanning_cluster)
                    .map(|s| s.edge_count)
            })
            .collect();
        assert!(!firsts.is_empty() && firsts.len() < 30);
        assert_eq!(rows[0].fraction_spanning_rigid, firsts.len() as f64 / 30.0);
        let eta = firsts.iter().map(|&m| eta_of(25, m)).sum::<f64>() / firsts.len() as f64;
        assert!((rows[0].mean_eta_at_rigidity.unwrap() - eta).abs() < 1e-12);
    }

    #[test]
    fn whole_patch_rigidity_is_capped_by_the_corners() {
        // Two corners of the patch have degree 2; rigidity needs all four of
        // their bonds, so P(rigid) <= p^4 however large the patch.
        let patch = LatticePatch::Triangular { rows: 6, cols: 6 };
        let degree_two = {
            let g = Graph::new(36, patch.edges()).unwrap();
            (0..36).filter(|&v| g.neighbors(v).len() == 2).count()
        };
        assert_eq!(degree_two, 2);
        let trials = 400;
        let rigid = (0..trials)
            .filter(|&s| run_percolation(&patch, 0.95, s).last().is_spanning_rigid)
            .count() as f64
            / trials as f64;
        let cap = 0.95f64.powi(4);
        assert!(
            rigid <= cap + 3.0 * (cap * (1.0 - cap) / trials as f64).sqrt(),
            "{rigid}"
        );
    }

    #[test]
    fn crossing_interpolates() {
        let row = |p, f| SweepRow {
            p,
            fraction_spanning_rigid: f,
            mean_eta_at_rigidity: None,
        };
        let rows = [row(0.5, 0.0), row(0.6, 0.2), row(0.7, 0.6), row(0.8, 1.0)];
        assert!((crossing(&rows, 0.5).unwrap() - 0.675).abs() < 1e-12);
        assert_eq!(crossing(&rows[..2], 0.5), None);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let rows = sweep(&LatticePatch::ErdosRenyi { n: 6 }, &[0.0, 1.0], 3, 0, 1);
        let csv = sweep_to_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "p,fraction_spanning_rigid,mean_eta");
        assert_eq!(lines[1], "0.0,0.0,");
        assert!(lines[2].starts_with("1.0,1.0,"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn trajectory_invariants(rows in 1usize..7, cols in 1usize..7, p in 0.0f64..=1.0, seed in any::<u64>()) {
            let patch = LatticePatch::Triangular { rows, cols };
            let n = patch.n();
            let t = run_percolation(&patch, p, seed);
            for w in t.snapshots.windows(2) {
                prop_assert!(w[1].edge_count > w[0].edge_count);
                prop_assert!(w[1].has_spanning_cluster >= w[0].has_spanning_cluster);
                prop_assert!(w[1].eta >= w[0].eta);
                prop_assert!(w[1].largest_rigid_component_size >= w[0].largest_rigid_component_size);
            }
            for s in &t.snapshots {
                if s.is_spanning_rigid && n >= 2 {
                    prop_assert!(s.edge_count >= 2 * n - 3);
                }
                prop_assert!(!s.is_spanning_rigid || s.has_spanning_cluster);
            }
            // The final snapshot agrees with a batch pebble game on the kept bonds.
            let kept = diluted(&patch, p, seed);
            let batch = pebble_game_2_3(&Graph::new(n, kept).unwrap());
            let largest = batch.components.iter().map(Vec::len).max().unwrap_or(0);
            prop_assert_eq!(t.last().largest_rigid_component_size, largest);
        }

        #[test]
        fn clusters_refine_connectivity(rows in 1usize..6, cols in 1usize..6, p in 0.0f64..=1.0, seed in any::<u64>()) {
            let patch = LatticePatch::Triangular { rows, cols };
            let g = Graph::new(patch.n(), diluted(&patch, p, seed)).unwrap();
            let mut component = vec![0; g.n()];
            for (i, c) in g.components().iter().enumerate() {
                for &v in c {
                    component[v] = i;
                }
            }
            for cluster in pebble_game_2_3(&g).components {
                prop_assert!(cluster.iter().all(|&v| component[v] == component[cluster[0]]));
            }
        }

        #[test]
        fn resampling_never_repeats_a_bond(p in 0.0f64..=1.0, steps in 0usize..300, seed in any::<u64>()) {
            let patch = LatticePatch::ErdosRenyi { n: 8 };
            let t = run_percolation_resampling(&patch, p, steps, seed);
            prop_assert!(t.last().edge_count <= patch.edges().len());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(6))]

        #[test]
        fn fraction_is_monotone_in_p_up_to_noise(seed in any::<u64>()) {
            let patch = LatticePatch::Triangular { rows: 6, cols: 6 };
            let ps = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9];
            let rows = sweep(&patch, &ps, 100, seed, 1);
            for w in rows.windows(2) {
                prop_assert!(w[1].fraction_spanning_rigid >= w[0].fraction_spanning_rigid - 0.1, "{:?}", w);
            }
        }
    }
}
