//! Partial reflection symmetries of DMDGP instances.
//!
//! `g_i` fixes vertices before level `i` and reflects the rest through the
//! hyperplane spanned by the `K` vertices preceding `i`. A pruning edge
//! `{u, v}` is preserved by `g_i` only when `i` does not fall in
//! `(u + K, v]`; the surviving generators span the group whose orbit of one
//! solution is the whole solution set.

use serde::Serialize;

use super::{DiscretizationOrder, OrderKind, SolutionSet};
use crate::error::{Error, Result};
use crate::geom;
use crate::model::{congruent, validate, DgpInstance, Realization};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PruningGroup {
    /// 1-based levels `i` whose reflection `g_i` is a generator.
    pub generator_levels: Vec<usize>,
}

impl PruningGroup {
    /// `2^(number of generators)`, saturating.
    pub fn order(&self) -> u128 {
        1u128
            .checked_shl(self.generator_levels.len() as u32)
            .unwrap_or(u128::MAX)
    }
}

pub fn pruning_group(order: &DiscretizationOrder, instance: &DgpInstance) -> Result<PruningGroup> {
    if order.kind != OrderKind::Dmdgp {
        return Err(Error::NotDmdgp);
    }
    let (n, k) = (instance.n(), instance.k());
    // 1-based endpoints of the pruning edges.
    let spans: Vec<(usize, usize)> = order
        .pruning_edges
        .iter()
        .map(|&idx| {
            let e = &instance.edges()[idx];
            (e.u.min(e.v) + 1, e.u.max(e.v) + 1)
        })
        .collect();
    let generator_levels = (k + 1..=n)
        .filter(|&i| !spans.iter().any(|&(u, v)| u + k < i && i <= v))
        .collect();
    Ok(PruningGroup { generator_levels })
}

/// Applies `g_i` (1-based level `i > K`).
pub fn partial_reflection(x: &Realization, level: usize, k: usize) -> Result<Realization> {
    if level <= k || level > x.n() || k != x.k() {
        return Err(Error::DegenerateHyperplane(level));
    }
    let first = level - 1 - k;
    let origin = x.point(first).to_vec();
    let diffs: Vec<Vec<f64>> = (first + 1..level - 1)
        .map(|j| geom::sub(x.point(j), &origin))
        .collect();
    let scale = diffs.iter().map(|d| geom::norm(d)).fold(1.0, f64::max);
    let basis = geom::orthonormal_basis(&diffs, scale).ok_or(Error::DegenerateHyperplane(level))?;
    let normal = geom::complement_unit(&basis, k);
    let mut y = x.clone();
    for j in level - 1..x.n() {
        let p = geom::reflect(x.point(j), &origin, &normal);
        y.point_mut(j).copy_from_slice(&p);
    }
    Ok(y)
}

/// The orbit of `x` under `group`, keeping members that satisfy every edge
/// within `tol`. Members are deduplicated by congruence; with
/// `allow_reflection` a realization and its mirror image count as one.
pub fn orbit_generate(
    x: &Realization,
    group: &PruningGroup,
    instance: &DgpInstance,
    tol: f64,
    allow_reflection: bool,
) -> Result<SolutionSet> {
    let report = validate(instance, x, tol)?;
    if !report.is_valid() {
        return Err(Error::InvalidSeedSolution(report.max_abs_error));
    }
    let k = instance.k();
    let g = group.generator_levels.len();
    if g >= 32 {
        return Err(Error::TooLarge { n: g, limit: 31 });
    }
    let mut members: Vec<Realization> = Vec::new();
    for mask in 0u32..(1u32 << g) {
        let mut y = x.clone();
        for (bit, &level) in group.generator_levels.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                y = partial_reflection(&y, level, k)?;
            }
        }
        if !validate(instance, &y, tol)?.is_valid() {
            continue;
        }
        let mut seen = false;
        for m in &members {
            if congruent(&y, m, tol, allow_reflection)? {
                seen = true;
                break;
            }
        }
        if !seen {
            members.push(y);
        }
    }
    members.sort_by(|a, b| {
        a.rows()
            .flatten()
            .zip(b.rows().flatten())
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(SolutionSet {
        solutions: members,
        level_counts: Vec::new(),
        pruned_count: 0,
        reflection_fixed: allow_reflection,
        truncated: false,
    })
}

/// Predicted number of incongruent solutions, `2^(|generators| - [fix_reflection])`.
/// `None` when a pruning edge is an interval, since the count then depends
/// on the interval widths.
pub fn predicted_solution_count(
    order: &DiscretizationOrder,
    instance: &DgpInstance,
    fix_reflection: bool,
) -> Result<Option<u128>> {
    let group = pruning_group(order, instance)?;
    if order
        .pruning_edges
        .iter()
        .any(|&idx| !instance.edges()[idx].weight.is_exact())
    {
        return Ok(None);
    }
    let order = group.order();
    Ok(Some(if fix_reflection { order / 2 } else { order }))
}
