use std::thread;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{classify_order, pruning_by_vertex, DiscretizationOrder, OrderKind, SolutionSet};
use crate::error::{Error, Result};
use crate::geom::{self, MERGE_DISTANCE};
use crate::model::{congruent, DgpInstance, Realization, Weight, DEFAULT_TOL};
use crate::rng::task_rng;

#[derive(Debug, Clone, PartialEq)]
pub struct BpOptions {
    pub tol: f64,
    /// `None` explores the whole tree.
    pub max_solutions: Option<usize>,
    pub fix_reflection: bool,
    /// Drives the order in which the two candidates of a node are explored.
    pub seed: u64,
    /// Worker threads for exhaustive searches.
    pub jobs: usize,
}

impl Default for BpOptions {
    fn default() -> Self {
        BpOptions {
            tol: DEFAULT_TOL,
            max_solutions: None,
            fix_reflection: true,
            seed: 0,
            jobs: 1,
        }
    }
}

struct Problem<'a> {
    n: usize,
    k: usize,
    tol: f64,
    refs: &'a [Vec<usize>],
    radii: Vec<Vec<f64>>,
    pruning: Vec<Vec<(usize, Weight)>>,
}

#[derive(Clone)]
struct Node {
    level: usize,
    coords: Vec<f64>,
}

struct Search {
    level_counts: Vec<u64>,
    pruned: u64,
    found: Vec<Vec<f64>>,
    limit: usize,
    truncated: bool,
    rng: ChaCha8Rng,
}

impl Problem<'_> {
    fn point<'c>(&self, coords: &'c [f64], i: usize) -> &'c [f64] {
        &coords[i * self.k..(i + 1) * self.k]
    }

    fn satisfies_pruning(&self, coords: &[f64], v: usize, p: &[f64]) -> bool {
        self.pruning[v]
            .iter()
            .all(|&(u, w)| w.error(geom::dist(self.point(coords, u), p)) <= self.tol)
    }

    /// Feasible children of `node`, in exploration order.
    fn children(&self, node: &Node, search: &mut Search) -> Result<Vec<Node>> {
        let i = node.level;
        let centers: Vec<&[f64]> = self.refs[i]
            .iter()
            .map(|&u| self.point(&node.coords, u))
            .collect();
        let mut cands = geom::sphere_intersect(&centers, &self.radii[i], self.tol)?;
        if cands.is_empty() {
            search.pruned += 1;
        }
        if cands.len() == 2 && search.rng.random::<bool>() {
            cands.swap(0, 1);
        }
        let mut out = Vec::with_capacity(cands.len());
        for p in cands {
            if !self.satisfies_pruning(&node.coords, i, &p) {
                search.pruned += 1;
                continue;
            }
            search.level_counts[i] += 1;
            let mut coords = node.coords.clone();
            coords.extend_from_slice(&p);
            out.push(Node {
                level: i + 1,
                coords,
            });
        }
        Ok(out)
    }

    fn dfs(&self, node: Node, search: &mut Search) -> Result<()> {
        if search.found.len() >= search.limit {
            search.truncated = true;
            return Ok(());
        }
        if node.level == self.n {
            search.found.push(node.coords);
            return Ok(());
        }
        for child in self.children(&node, search)? {
            self.dfs(child, search)?;
        }
        Ok(())
    }
}

/// Places the first `min(n, K+1)` vertices in the canonical frame: vertex `j`
/// lies in the span of the first `j` axes with nonnegative `j`-th coordinate.
/// The last of them gets both signs unless the reflection is fixed.
fn initial_nodes(
    instance: &DgpInstance,
    k: usize,
    tol: f64,
    fix_reflection: bool,
) -> Result<Vec<Node>> {
    let m = instance.n().min(k + 1);
    let d = |u: usize, v: usize| instance.weight(u, v).and_then(|w| w.exact()).unwrap();
    let mut pts: Vec<Vec<f64>> = vec![vec![0.0; k]];
    for j in 1..m {
        let prev: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let radii: Vec<f64> = (0..j).map(|l| d(l, j)).collect();
        let y = geom::place_canonical(&prev, &radii, k)?;
        for (l, p) in pts.iter().enumerate() {
            let err = (geom::dist(p, &y) - d(l, j)).abs();
            if err > tol {
                return Err(Error::InfeasibleInitialClique(format!(
                    "distance between vertices {} and {} is off by {err:.3e}",
                    l + 1,
                    j + 1
                )));
            }
        }
        pts.push(y);
    }
    let base = Node {
        level: m,
        coords: pts.concat(),
    };
    let last = m - 1;
    if fix_reflection || m <= k || pts[last][k - 1] * 2.0 < MERGE_DISTANCE {
        return Ok(vec![base]);
    }
    let mut mirror = base.clone();
    mirror.coords[last * k + k - 1] *= -1.0;
    Ok(vec![base, mirror])
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Enumerates the incongruent realizations of a discretizable instance.
///
/// With `fix_reflection` the solutions are distinct up to all isometries;
/// without it mirror images are both reported. Solutions come out sorted
/// lexicographically by coordinates. Exhaustive searches with `jobs > 1`
/// split the tree into subtrees explored on separate threads; the result
/// does not depend on the number of workers.
pub fn bp_solve(instance: &DgpInstance, opts: &BpOptions) -> Result<SolutionSet> {
    let order = classify_order(instance);
    solve_with_order(instance, &order, opts)
}

pub(crate) fn solve_with_order(
    instance: &DgpInstance,
    order: &DiscretizationOrder,
    opts: &BpOptions,
) -> Result<SolutionSet> {
    if order.kind == OrderKind::NotDiscretizable {
        return Err(Error::NotDiscretizable);
    }
    let (n, k) = (instance.n(), instance.k());
    let radii = order
        .reference_predecessors
        .iter()
        .enumerate()
        .map(|(i, refs)| {
            refs.iter()
                .map(|&u| instance.weight(u, i).and_then(|w| w.exact()).unwrap())
                .collect()
        })
        .collect();
    let problem = Problem {
        n,
        k,
        tol: opts.tol,
        refs: &order.reference_predecessors,
        radii,
        pruning: pruning_by_vertex(instance, order),
    };
    let limit = opts.max_solutions.unwrap_or(usize::MAX);
    let new_search = |stream: u64| Search {
        level_counts: vec![0; n],
        pruned: 0,
        found: Vec::new(),
        limit,
        truncated: false,
        rng: task_rng(opts.seed, &[stream]),
    };

    let roots = initial_nodes(instance, k, opts.tol, opts.fix_reflection)?;
    let mut main = new_search(0);
    for l in 0..roots[0].level {
        main.level_counts[l] = if l + 1 == roots[0].level {
            roots.len() as u64
        } else {
            1
        };
    }

    let jobs = opts.jobs.max(1);
    if jobs == 1 || opts.max_solutions.is_some() {
        for root in roots {
            problem.dfs(root, &mut main)?;
        }
    } else {
        // Breadth-first until there is enough independent work to share out.
        let mut frontier = roots;
        while frontier.len() < 4 * jobs && frontier.first().is_some_and(|f| f.level < n) {
            let mut next = Vec::new();
            for node in &frontier {
                next.extend(problem.children(node, &mut main)?);
            }
            frontier = next;
        }
        let chunk = frontier.len().div_ceil(jobs).max(1);
        let results: Vec<Result<Search>> = thread::scope(|s| {
            let handles: Vec<_> = frontier
                .chunks(chunk)
                .enumerate()
                .map(|(w, nodes)| {
                    let problem = &problem;
                    let mut search = new_search(w as u64 + 1);
                    s.spawn(move || {
                        for node in nodes {
                            problem.dfs(node.clone(), &mut search)?;
                        }
                        Ok(search)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        });
        for r in results {
            let part = r?;
            for (a, b) in main.level_counts.iter_mut().zip(&part.level_counts) {
                *a += b;
            }
            main.pruned += part.pruned;
            main.found.extend(part.found);
        }
    }

    main.found.sort_by(|a, b| lex_cmp(a, b));
    let mut solutions: Vec<Realization> = Vec::new();
    for coords in main.found {
        let rows = coords.chunks(k).map(<[f64]>::to_vec).collect();
        let x = Realization::new(k, rows)?;
        let mut duplicate = false;
        for y in &solutions {
            if congruent(&x, y, opts.tol, opts.fix_reflection)? {
                duplicate = true;
                break;
            }
        }
        if !duplicate {
            solutions.push(x);
        }
    }
    Ok(SolutionSet {
        solutions,
        level_counts: main.level_counts,
        pruned_count: main.pruned,
        reflection_fixed: opts.fix_reflection,
        truncated: main.truncated,
    })
}
