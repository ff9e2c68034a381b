//! Simple undirected graphs and the connectivity queries used by the rigidity
//! tests.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u >= n || v >= n || u == v {
                return Err(Error::Invariant(format!(
                    "invalid edge ({u},{v}) for n={n}"
                )));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::Invariant(format!("duplicate edge ({u},{v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(Graph { n, edges, adj })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Graph::new(n, edges).unwrap()
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i - 1, i)).collect()).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            edges.push((0, n - 1));
        }
        Graph::new(n, edges).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn is_complete(&self) -> bool {
        self.m() == self.n * self.n.saturating_sub(1) / 2
    }

    pub fn without_edge(&self, index: usize) -> Graph {
        let mut edges = self.edges.clone();
        edges.remove(index);
        Graph::new(self.n, edges).unwrap()
    }

    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph> {
        let mut edges = self.edges.clone();
        edges.push((u, v));
        Graph::new(self.n, edges)
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut comp = vec![s];
            label[s] = id;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if label[w] == usize::MAX {
                        label[w] = id;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// Number of edges with both endpoints in the vertex set encoded by `mask`.
    pub fn induced_edge_count(&self, mask: u64) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1)
            .count()
    }

    /// Vertex connectivity. Complete graphs on `n` vertices have connectivity
    /// `n - 1`; otherwise the minimum over non-adjacent pairs of the number of
    /// internally vertex-disjoint paths.
    pub fn vertex_connectivity(&self) -> usize {
        if self.is_complete() {
            return self.n.saturating_sub(1);
        }
        let mut best = usize::MAX;
        for s in 0..self.n {
            for t in s + 1..self.n {
                if self.has_edge(s, t) {
                    continue;
                }
                best = best.min(self.disjoint_paths(s, t, best));
                if best == 0 {
                    return 0;
                }
            }
        }
        best
    }

    pub fn is_k_vertex_connected(&self, k: usize) -> bool {
        self.n > k && self.vertex_connectivity() >= k
    }

    /// Max flow from `s` to `t` with unit vertex capacities, stopping at `cap`.
    fn disjoint_paths(&self, s: usize, t: usize, cap: usize) -> usize {
        // Split v into v_in = 2v and v_out = 2v + 1.
        let nn = 2 * self.n;
        let big = i32::MAX / 4;
        let mut res = vec![0i32; nn * nn];
        for v in 0..self.n {
            res[(2 * v) * nn + 2 * v + 1] = if v == s || v == t { big } else { 1 };
        }
        for &(u, v) in &self.edges {
            res[(2 * u + 1) * nn + 2 * v] = big;
            res[(2 * v + 1) * nn + 2 * u] = big;
        }
        let (src, snk) = (2 * s + 1, 2 * t);
        let mut flow = 0;
        let mut parent = vec![usize::MAX; nn];
        while flow < cap {
            parent.fill(usize::MAX);
            parent[src] = src;
            let mut queue = VecDeque::from([src]);
            while let Some(a) = queue.pop_front() {
                if a == snk {
                    break;
                }
                for b in 0..nn {
                    if parent[b] == usize::MAX && res[a * nn + b] > 0 {
                        parent[b] = a;
                        queue.push_back(b);
                    }
                }
            }
            if parent[snk] == usize::MAX {
                break;
            }
            let mut b = snk;
            while b != src {
                let a = parent[b];
                res[a * nn + b] -= 1;
                res[b * nn + a] += 1;
                b = a;
            }
            flow += 1;
        }
        flow
    }
}
