//! Branch-and-Prune for discretizable instances.
//!
//! When every vertex after the first `K` has `K` exactly-known distances to
//! earlier vertices, its position is one of at most two points (the
//! intersection of `K` spheres in `R^K`). BP walks the resulting binary tree
//! depth first and discards candidates that violate the remaining
//! ("pruning") distances. For DMDGP orders the solution set is the orbit of
//! any one solution under a group of partial reflections known in advance.

mod solve;
mod symmetry;

pub use solve::{bp_solve, BpOptions};
pub use symmetry::{
    orbit_generate, partial_reflection, predicted_solution_count, pruning_group, PruningGroup,
};

use serde::Serialize;

use crate::model::{DgpInstance, Edge, Realization, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrderKind {
    #[serde(rename = "DMDGP")]
    Dmdgp,
    #[serde(rename = "DDGP")]
    Ddgp,
    NotDiscretizable,
}

/// Vertex indices are 0-based; `reference_predecessors[i]` is empty for
/// `i < K`. Edge lists hold indices into `instance.edges()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscretizationOrder {
    pub kind: OrderKind,
    pub k: usize,
    pub reference_predecessors: Vec<Vec<usize>>,
    pub discretization_edges: Vec<usize>,
    pub pruning_edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    pub solutions: Vec<Realization>,
    pub level_counts: Vec<u64>,
    pub pruned_count: u64,
    pub reflection_fixed: bool,
    /// The search stopped at `max_solutions` before exhausting the tree.
    pub truncated: bool,
}

/// The DMDGP instance of `x`: every vertex is joined to its `K` immediate
/// predecessors, plus the `extra` (pruning) pairs, all weighted exactly by `x`.
pub fn dmdgp_instance(
    x: &Realization,
    extra: &[(usize, usize)],
) -> crate::error::Result<DgpInstance> {
    let (n, k) = (x.n(), x.k());
    let mut edges = Vec::new();
    for v in 1..n {
        for u in v.saturating_sub(k)..v {
            edges.push(Edge::exact(u, v, x.dist(u, v)));
        }
    }
    for &(u, v) in extra {
        edges.push(Edge::exact(u, v, x.dist(u, v)));
    }
    DgpInstance::new(n, k, edges)
}

/// Classifies the given vertex order. DMDGP is preferred when both apply.
/// Only exact edges can discretize; interval edges always end up pruning.
pub fn classify_order(instance: &DgpInstance) -> DiscretizationOrder {
    let (n, k) = (instance.n(), instance.k());
    let exact = |u: usize, v: usize| instance.weight(u, v).is_some_and(|w| w.is_exact());
    let not_discretizable = DiscretizationOrder {
        kind: OrderKind::NotDiscretizable,
        k,
        reference_predecessors: Vec::new(),
        discretization_edges: Vec::new(),
        pruning_edges: Vec::new(),
    };

    let initial = n.min(k);
    let clique = (0..initial).all(|u| (u + 1..initial).all(|v| exact(u, v)));
    if n <= k || !clique {
        return not_discretizable;
    }

    let mut refs = vec![Vec::new(); n];
    let mut immediate = true;
    for (i, slot) in refs.iter_mut().enumerate().skip(k) {
        let preds: Vec<usize> = (0..i).filter(|&u| exact(u, i)).collect();
        if preds.len() < k {
            return not_discretizable;
        }
        let chosen = preds[preds.len() - k..].to_vec();
        immediate &= chosen[0] == i - k;
        *slot = chosen;
    }

    let mut discretization_edges = Vec::new();
    let mut pruning_edges = Vec::new();
    for (idx, e) in instance.edges().iter().enumerate() {
        let (u, v) = (e.u.min(e.v), e.u.max(e.v));
        let in_clique = v < k;
        if in_clique || refs[v].contains(&u) {
            discretization_edges.push(idx);
        } else {
            pruning_edges.push(idx);
        }
    }
    DiscretizationOrder {
        kind: if immediate {
            OrderKind::Dmdgp
        } else {
            OrderKind::Ddgp
        },
        k,
        reference_predecessors: refs,
        discretization_edges,
        pruning_edges,
    }
}

/// Pruning edges grouped by their later endpoint: `(earlier, weight)`.
pub(crate) fn pruning_by_vertex(
    instance: &DgpInstance,
    order: &DiscretizationOrder,
) -> Vec<Vec<(usize, Weight)>> {
    let mut out = vec![Vec::new(); instance.n()];
    for &idx in &order.pruning_edges {
        let e = &instance.edges()[idx];
        out[e.u.max(e.v)].push((e.u.min(e.v), e.weight));
    }
    out
}


#[cfg(test)]
mod props {
    use super::*;
    use crate::model::{congruent, validate, DEFAULT_TOL};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random DMDGP instance, optionally with one pruning edge `{u, v}`, `v - u > K`.
    fn instance(n: usize, k: usize, pruned: bool, seed: u64) -> DgpInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Realization::random_uniform(n, k, &mut rng);
        let extra = if pruned && n > k + 1 {
            let v = rng.random_range(k + 1..n);
            vec![(rng.random_range(0..v - k), v)]
        } else {
            vec![]
        };
        dmdgp_instance(&x, &extra).unwrap()
    }

    fn same_sets(a: &[Realization], b: &[Realization], tol: f64) -> bool {
        a.len() == b.len()
            && a.iter()
                .all(|x| b.iter().any(|y| congruent(x, y, tol, true).unwrap()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn solutions_validate_and_match_the_predicted_count(
            n in 3usize..=10, k in 2usize..=3, pruned in any::<bool>(), seed in any::<u64>(),
        ) {
            prop_assume!(n > k);
            let inst = instance(n, k, pruned, seed);
            let set = bp_solve(&inst, &BpOptions::default()).unwrap();
            for x in &set.solutions {
                prop_assert!(validate(&inst, x, DEFAULT_TOL).unwrap().max_abs_error < DEFAULT_TOL);
            }
            let predicted = predicted_solution_count(&classify_order(&inst), &inst, true).unwrap();
            prop_assert_eq!(Some(set.solutions.len() as u128), predicted);
        }

        #[test]
        fn orbit_of_one_solution_is_the_whole_set(
            n in 3usize..=10, k in 2usize..=3, pruned in any::<bool>(), seed in any::<u64>(),
        ) {
            prop_assume!(n > k);
            let inst = instance(n, k, pruned, seed);
            let order = classify_order(&inst);
            let set = bp_solve(&inst, &BpOptions::default()).unwrap();
            let group = pruning_group(&order, &inst).unwrap();
            let orbit = orbit_generate(&set.solutions[0], &group, &inst, 1e-6, true).unwrap();
            prop_assert!(same_sets(&orbit.solutions, &set.solutions, 1e-6));
        }

        #[test]
        fn level_counts_double_past_the_first_branch(n in 3usize..=10, k in 2usize..=3, seed in any::<u64>()) {
            prop_assume!(n > k);
            let set = bp_solve(&instance(n, k, false, seed), &BpOptions::default()).unwrap();
            // 0-based vertex j; the branch at vertex K is fixed by the reflection.
            let expected: Vec<u64> = (0..n).map(|j| 1 << j.saturating_sub(k)).collect();
            prop_assert_eq!(set.level_counts, expected);
        }

        #[test]
        fn exploration_order_does_not_change_the_answer(
            n in 3usize..=9, k in 2usize..=3, pruned in any::<bool>(), seed in any::<u64>(), other in any::<u64>(),
        ) {
            prop_assume!(n > k);
            let inst = instance(n, k, pruned, seed);
            let a = bp_solve(&inst, &BpOptions { seed: 0, ..BpOptions::default() }).unwrap();
            let b = bp_solve(&inst, &BpOptions { seed: other, ..BpOptions::default() }).unwrap();
            prop_assert!(same_sets(&a.solutions, &b.solutions, 1e-6));
        }
    }
}
