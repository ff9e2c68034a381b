//! Rigidity of frameworks and graphs.
//!
//! A framework is infinitesimally rigid when the only solutions of `R ẋ = 0`
//! are the `K(K+1)/2` rigid motions, i.e. `rank R = Kn - K(K+1)/2`. Generic
//! rigidity samples random realizations and takes the largest rank seen; in
//! the plane the combinatorial (Laman) counts and the pebble game decide it
//! exactly.

mod pebble;

pub use pebble::{pebble_game_2_3, PebbleGame, PebbleOutcome, PebbleVerdict};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{numerical_rank, Matrix, RANK_TOL_FACTOR};
use crate::model::{Framework, Realization};
use crate::rng::task_rng;

pub const DEFAULT_TRIALS: usize = 3;
/// Guard on the exponential subset enumeration.
pub const BRUTEFORCE_MAX_N: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityMatrix {
    pub matrix: Matrix,
    pub edge_index: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RigidityStatus {
    Rigid,
    Flexible,
    DegenerateAffineHull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RigidityVerdict {
    pub status: RigidityStatus,
    pub rank: usize,
    pub dof: usize,
}

/// Rank of a rigid framework on `n` points in `R^k`. Below `k + 1` points
/// every pair is independent, so the complete graph has full edge rank.
pub fn rigid_rank(n: usize, k: usize) -> usize {
    if n > k {
        k * n - k * (k + 1) / 2
    } else {
        n * n.saturating_sub(1) / 2
    }
}

fn matrix_for(edges: &[(usize, usize)], x: &Realization) -> Matrix {
    let k = x.k();
    let mut m = Matrix::zeros(edges.len(), k * x.n());
    for (row, &(u, v)) in edges.iter().enumerate() {
        let (pu, pv) = (x.point(u), x.point(v));
        for c in 0..k {
            m[(row, k * u + c)] = pu[c] - pv[c];
            m[(row, k * v + c)] = pv[c] - pu[c];
        }
    }
    m
}

pub fn rigidity_matrix(fw: &Framework) -> RigidityMatrix {
    let edge_index: Vec<_> = fw.instance.edges().iter().map(|e| (e.u, e.v)).collect();
    RigidityMatrix {
        matrix: matrix_for(&edge_index, &fw.realization),
        edge_index,
    }
}

/// Dimension of the affine hull of the points.
pub fn affine_dimension(x: &Realization, tol: f64) -> usize {
    let n = x.n();
    if n == 0 {
        return 0;
    }
    let k = x.k();
    let mut mean = vec![0.0; k];
    for p in x.rows() {
        for (m, c) in mean.iter_mut().zip(p) {
            *m += c / n as f64;
        }
    }
    let rows = x
        .rows()
        .map(|p| p.iter().zip(&mean).map(|(c, m)| c - m).collect())
        .collect();
    numerical_rank(&Matrix::from_rows(rows).unwrap(), tol)
}

fn verdict(n: usize, k: usize, rank: usize) -> RigidityVerdict {
    let status = if rank == rigid_rank(n, k) {
        RigidityStatus::Rigid
    } else {
        RigidityStatus::Flexible
    };
    RigidityVerdict {
        status,
        rank,
        dof: k * n - rank,
    }
}

/// Infinitesimal rigidity of a concrete framework. `tol` is the relative
/// singular-value threshold of the rank computation.
pub fn infinitesimal_rigidity(fw: &Framework, tol: f64) -> RigidityVerdict {
    let (n, k) = (fw.instance.n(), fw.instance.k());
    let rank = numerical_rank(&rigidity_matrix(fw).matrix, tol);
    let mut v = verdict(n, k, rank);
    if affine_dimension(&fw.realization, tol) < k {
        v.status = RigidityStatus::DegenerateAffineHull;
    }
    v
}

fn random_realization(n: usize, k: usize, seed: u64, trial: usize) -> Realization {
    let mut rng = task_rng(seed, &[0x7269_6769, trial as u64]);
    let rows = (0..n)
        .map(|_| (0..k).map(|_| rng.random::<f64>()).collect())
        .collect();
    Realization::new(k, rows).unwrap()
}

/// Largest rigidity-matrix rank over `trials` uniform random realizations.
pub fn generic_rank(graph: &Graph, k: usize, trials: usize, seed: u64) -> usize {
    (0..trials.max(1))
        .map(|t| {
            let x = random_realization(graph.n(), k, seed, t);
            numerical_rank(&matrix_for(graph.edges(), &x), RANK_TOL_FACTOR)
        })
        .max()
        .unwrap()
}

/// Randomized generic rigidity: correct with probability one per trial.
pub fn generic_rigidity(graph: &Graph, k: usize, trials: usize, seed: u64) -> RigidityVerdict {
    verdict(graph.n(), k, generic_rank(graph, k, trials, seed))
}

/// On the line, generic rigidity is connectivity.
pub fn rigid_k1(graph: &Graph) -> bool {
    graph.is_connected()
}

/// Checks `|E| = k|V| - k(k+1)/2` and `|E'| <= k|V'| - k(k+1)/2` for every
/// vertex subset with at least `max(2, k)` vertices (smaller subsets would
/// have a negative bound for `k >= 3`).
pub fn count_condition(graph: &Graph, k: usize) -> Result<bool> {
    let n = graph.n();
    if n > BRUTEFORCE_MAX_N {
        return Err(Error::TooLarge {
            n,
            limit: BRUTEFORCE_MAX_N,
        });
    }
    let bound = |size: usize| (k * size) as i64 - (k * (k + 1) / 2) as i64;
    if n < 2 || graph.m() as i64 != bound(n) {
        return Ok(false);
    }
    let min_size = k.max(2) as u32;
    for mask in 1u64..(1u64 << n) {
        let size = mask.count_ones();
        if size >= min_size && graph.induced_edge_count(mask) as i64 > bound(size as usize) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Laman's conditions for generic minimal rigidity in the plane, by
/// exhaustive enumeration of vertex subsets.
pub fn laman_bruteforce(graph: &Graph) -> Result<bool> {
    count_condition(graph, 2)
}

/// Generic rigidity survives the deletion of any single edge.
pub fn redundantly_rigid(graph: &Graph, k: usize, trials: usize, seed: u64) -> bool {
    let target = rigid_rank(graph.n(), k);
    if generic_rank(graph, k, trials, seed) != target {
        return false;
    }
    (0..graph.m()).all(|i| generic_rank(&graph.without_edge(i), k, trials, seed) == target)
}

/// Generic global rigidity for `k = 1` (2-connectivity) and `k = 2`
/// (3-connectivity plus redundant rigidity). Complete graphs on at most
/// `k + 1` vertices are globally rigid outright.
pub fn globally_rigid(graph: &Graph, k: usize, trials: usize, seed: u64) -> Result<bool> {
    let n = graph.n();
    match k {
        1 => Ok(if n <= 2 {
            graph.is_connected()
        } else {
            graph.is_k_vertex_connected(2)
        }),
        2 => {
            if n <= 3 {
                return Ok(graph.is_complete());
            }
            Ok(graph.is_k_vertex_connected(3) && redundantly_rigid(graph, 2, trials, seed))
        }
        _ => Err(Error::UnsupportedDimension(k)),
    }
}

/// The "double banana": two copies of `K5` minus an edge, glued along the
/// two vertices of the missing edge (which stay non-adjacent).
pub fn double_banana() -> Graph {
    let mut edges = Vec::new();
    for side in [[2, 3, 4], [5, 6, 7]] {
        let verts = [0, 1, side[0], side[1], side[2]];
        for (i, &a) in verts.iter().enumerate() {
            for &b in &verts[i + 1..] {
                if (a, b) != (0, 1) {
                    edges.push((a, b));
                }
            }
        }
    }
    Graph::new(8, edges).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DgpInstance, Edge};

    fn framework(k: usize, rows: Vec<Vec<f64>>, edges: &[(usize, usize)]) -> Framework {
        let x = Realization::new(k, rows).unwrap();
        let inst = DgpInstance::new(
            x.n(),
            k,
            edges
                .iter()
                .map(|&(u, v)| Edge::exact(u, v, x.dist(u, v)))
                .collect(),
        )
        .unwrap();
        Framework::new(inst, x).unwrap()
    }

    #[test]
    fn single_bar_matrix() {
        let fw = framework(1, vec![vec![0.0], vec![1.0]], &[(0, 1)]);
        let r = rigidity_matrix(&fw);
        assert_eq!(r.matrix.to_rows(), vec![vec![-1.0, 1.0]]);
        assert_eq!(numerical_rank(&r.matrix, RANK_TOL_FACTOR), 1);
    }

    #[test]
    fn path_matrix_and_verdict() {
        let fw = framework(
            2,
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]],
            &[(0, 1), (1, 2)],
        );
        let r = rigidity_matrix(&fw);
        assert_eq!(
            r.matrix.to_rows(),
            vec![
                vec![-1.0, 0.0, 1.0, 0.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0, -1.0, 0.0, 1.0]
            ]
        );
        let v = infinitesimal_rigidity(&fw, 1e-8);
        assert_eq!(
            v,
            RigidityVerdict {
                status: RigidityStatus::Flexible,
                rank: 2,
                dof: 4
            }
        );
    }

    #[test]
    fn triangle_is_rigid() {
        let fw = framework(
            2,
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            &[(0, 1), (1, 2), (0, 2)],
        );
        let v = infinitesimal_rigidity(&fw, 1e-8);
        assert_eq!(
            v,
            RigidityVerdict {
                status: RigidityStatus::Rigid,
                rank: 3,
                dof: 3
            }
        );
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let fw = framework(
            2,
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]],
            &[(0, 1), (1, 2), (0, 2)],
        );
        assert_eq!(
            infinitesimal_rigidity(&fw, 1e-8).status,
            RigidityStatus::DegenerateAffineHull
        );
    }

    #[test]
    fn generic_verdicts() {
        assert_eq!(
            generic_rigidity(&Graph::path(5), 1, 3, 0).status,
            RigidityStatus::Rigid
        );
        let k4 = generic_rigidity(&Graph::complete(4), 2, 3, 0);
        assert_eq!((k4.status, k4.rank), (RigidityStatus::Rigid, 5));
        let db = generic_rigidity(&double_banana(), 3, 3, 0);
        assert_eq!(db.status, RigidityStatus::Flexible);
        assert_eq!(db.rank, 17);
    }

    #[test]
    fn double_banana_passes_counts() {
        let g = double_banana();
        assert_eq!((g.n(), g.m()), (8, 18));
        assert!(count_condition(&g, 3).unwrap());
    }

    #[test]
    fn k1_connectivity() {
        assert!(rigid_k1(&Graph::path(3)));
        assert!(!rigid_k1(&Graph::new(4, vec![(0, 1), (2, 3)]).unwrap()));
        assert!(rigid_k1(&Graph::new(1, vec![]).unwrap()));
    }

    #[test]
    fn laman_examples() {
        assert!(laman_bruteforce(&Graph::complete(3)).unwrap());
        assert!(!laman_bruteforce(&Graph::cycle(4)).unwrap());
        assert!(!laman_bruteforce(&Graph::complete(4)).unwrap());
        assert_eq!(
            laman_bruteforce(&Graph::path(17)),
            Err(Error::TooLarge { n: 17, limit: 16 })
        );
    }

    #[test]
    fn redundancy_and_global_rigidity() {
        assert!(redundantly_rigid(&Graph::complete(4), 2, 3, 1));
        assert!(!redundantly_rigid(&Graph::complete(3), 2, 3, 1));
        assert!(redundantly_rigid(&Graph::cycle(4), 1, 3, 1));
        assert!(globally_rigid(&Graph::cycle(4), 1, 3, 1).unwrap());
        assert!(!globally_rigid(&Graph::path(3), 1, 3, 1).unwrap());
        assert!(globally_rigid(&Graph::complete(4), 2, 3, 1).unwrap());
        assert_eq!(
            globally_rigid(&Graph::complete(4), 3, 3, 1),
            Err(Error::UnsupportedDimension(3))
        );
    }
}
