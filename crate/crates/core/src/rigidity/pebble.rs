//! The (2,3) pebble game for planar generic rigidity.
//!
//! Every vertex starts with two pebbles. An edge is independent when four
//! pebbles can be gathered on its endpoints; it is then covered by one of
//! them and oriented away from the covering vertex. Pebbles travel backwards
//! along directed paths, reversing the edges they cross, so
//! `pebbles(v) + outdeg(v) = 2` holds at every vertex throughout.

use std::collections::VecDeque;

use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PebbleVerdict {
    MinimallyRigid,
    RigidWithRedundancy,
    Flexible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PebbleOutcome {
    pub verdict: PebbleVerdict,
    pub independent: usize,
    pub redundant: usize,
    /// Maximal rigid clusters, each sorted, ordered by smallest vertex.
    /// Clusters may share hinge vertices; an isolated vertex is its own cluster.
    pub components: Vec<Vec<usize>>,
}

/// Incremental pebble game state.
#[derive(Debug, Clone)]
pub struct PebbleGame {
    pebbles: Vec<u8>,
    out: Vec<Vec<usize>>,
    independent: usize,
    // Scratch buffers reused across searches.
    parent: Vec<usize>,
    queue: VecDeque<usize>,
}

impl PebbleGame {
    pub fn new(n: usize) -> Self {
        PebbleGame {
            pebbles: vec![2; n],
            out: vec![Vec::new(); n],
            independent: 0,
            parent: vec![usize::MAX; n],
            queue: VecDeque::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.pebbles.len()
    }

    pub fn independent(&self) -> usize {
        self.independent
    }

    pub fn free_pebbles(&self) -> usize {
        self.pebbles.iter().map(|&p| p as usize).sum()
    }

    /// Rigid on all `n` vertices: `2n - 3` independent edges.
    pub fn is_rigid(&self) -> bool {
        let n = self.n();
        n < 2 || self.independent == 2 * n - 3
    }

    /// Tries to move one extra pebble onto `target` without taking any from
    /// `pinned` vertices (which paths may still cross).
    fn gather(&mut self, target: usize, pinned: &[usize]) -> bool {
        self.parent.fill(usize::MAX);
        self.parent[target] = target;
        self.queue.clear();
        self.queue.push_back(target);
        let mut found = None;
        'search: while let Some(a) = self.queue.pop_front() {
            for &b in &self.out[a] {
                if self.parent[b] != usize::MAX {
                    continue;
                }
                self.parent[b] = a;
                if self.pebbles[b] > 0 && !pinned.contains(&b) {
                    found = Some(b);
                    break 'search;
                }
                self.queue.push_back(b);
            }
        }
        let Some(w) = found else { return false };
        let mut b = w;
        while b != target {
            let a = self.parent[b];
            let pos = self.out[a].iter().position(|&x| x == b).unwrap();
            self.out[a].swap_remove(pos);
            self.out[b].push(a);
            b = a;
        }
        self.pebbles[w] -= 1;
        self.pebbles[target] += 1;
        true
    }

    fn collect(&mut self, target: usize, want: u8, pinned: &[usize]) -> bool {
        while self.pebbles[target] < want {
            if !self.gather(target, pinned) {
                return false;
            }
        }
        true
    }

    /// Inserts edge `{u, v}` if it is independent of the edges accepted so
    /// far. Returns whether it was accepted.
    pub fn try_add_edge(&mut self, u: usize, v: usize) -> bool {
        let pins = [u, v];
        if !(self.collect(u, 2, &pins) && self.collect(v, 2, &pins)) {
            return false;
        }
        self.pebbles[u] -= 1;
        self.out[u].push(v);
        self.independent += 1;
        true
    }

    /// Maximal rigid clusters of the graph formed by `edges`, all of which
    /// must have been offered to [`try_add_edge`](Self::try_add_edge).
    /// Vertices without edges come out as singletons.
    pub fn clusters(&mut self, n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut covered = vec![false; edges.len()];
        let mut touched = vec![false; n];
        let mut components: Vec<Vec<usize>> = Vec::new();
        for (i, &(u, v)) in edges.iter().enumerate() {
            touched[u] = true;
            touched[v] = true;
            if covered[i] {
                continue;
            }
            let cluster = self.cluster_of(u, v);
            let mut inside = vec![false; n];
            for &w in &cluster {
                inside[w] = true;
            }
            for (j, &(a, b)) in edges.iter().enumerate() {
                if inside[a] && inside[b] {
                    covered[j] = true;
                }
            }
            components.push(cluster);
        }
        components.extend((0..n).filter(|&w| !touched[w]).map(|w| vec![w]));
        components.sort();
        components
    }

    /// Rigid cluster containing edge `{u, v}`: gather three pebbles on the
    /// endpoints, then keep every vertex that cannot reach a free pebble.
    fn cluster_of(&mut self, u: usize, v: usize) -> Vec<usize> {
        let pins = [u, v];
        while self.pebbles[u] + self.pebbles[v] < 3 {
            let moved = self.gather(u, &pins) || self.gather(v, &pins);
            debug_assert!(moved, "three pebbles always fit on an edge");
            if !moved {
                break;
            }
        }
        let n = self.n();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (a, outs) in self.out.iter().enumerate() {
            for &b in outs {
                rev[b].push(a);
            }
        }
        let mut reaches = vec![false; n];
        let mut queue: VecDeque<usize> = (0..n)
            .filter(|&w| w != u && w != v && self.pebbles[w] > 0)
            .collect();
        for &w in &queue {
            reaches[w] = true;
        }
        while let Some(b) = queue.pop_front() {
            for &a in &rev[b] {
                if !reaches[a] && a != u && a != v {
                    reaches[a] = true;
                    queue.push_back(a);
                }
            }
        }
        (0..n)
            .filter(|&w| w == u || w == v || !reaches[w])
            .collect()
    }
}

/// Runs the (2,3) pebble game over the edges of `graph` in order.
pub fn pebble_game_2_3(graph: &Graph) -> PebbleOutcome {
    let n = graph.n();
    let mut game = PebbleGame::new(n);
    let mut redundant = 0;
    for &(u, v) in graph.edges() {
        if !game.try_add_edge(u, v) {
            redundant += 1;
        }
    }
    let independent = game.independent();
    let verdict = if n >= 2 && independent == 2 * n - 3 {
        if redundant == 0 {
            PebbleVerdict::MinimallyRigid
        } else {
            PebbleVerdict::RigidWithRedundancy
        }
    } else {
        PebbleVerdict::Flexible
    };

    let components = game.clusters(n, graph.edges());
    PebbleOutcome {
        verdict,
        independent,
        redundant,
        components,
    }
}
