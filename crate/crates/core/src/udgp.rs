//! Unassigned distance geometry: a multiset of distances without the
//! knowledge of which pair each one belongs to.
//!
//! `tribond` is an exact backtracking search for complete lists. Vertices 0
//! and 1 take the largest distance and, with the next `K - 2` vertices, form
//! the centers. Once the centers are placed, every other vertex is one of the
//! finitely many points whose distances to all centers are unused values;
//! the search then looks for `n - K` of those points whose mutual distances
//! account for the rest of the list.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::geom;
use crate::model::Realization;

pub const TRIBOND_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceList {
    k: usize,
    n: usize,
    values: Vec<f64>,
}

impl DistanceList {
    pub fn new(k: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::Invariant(format!(
                "need K > 0 and n > 0 (got K={k}, n={n})"
            )));
        }
        if let Some(bad) = values.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(Error::Invariant(format!(
                "distance {bad} is not a positive real"
            )));
        }
        let pairs = n * (n - 1) / 2;
        if values.len() > pairs {
            return Err(Error::BadCardinality {
                m: values.len(),
                n,
                expected: pairs,
            });
        }
        Ok(DistanceList { k, n, values })
    }

    /// All pairwise distances of `x`, in pair order `(0,1), (0,2), ...`.
    pub fn from_realization(x: &Realization) -> Self {
        let values = all_pairs(x.n()).map(|(u, v)| x.dist(u, v)).collect();
        DistanceList {
            k: x.k(),
            n: x.n(),
            values,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_complete(&self) -> bool {
        self.m() == self.n * (self.n - 1) / 2
    }
}

fn all_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| (u, v)))
}

/// List index `i` is assigned to the vertex pair `pairs[i]` (0-based, `u < v`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub pairs: Vec<(usize, usize)>,
}

/// Sum of squared residuals `(‖x_u − x_v‖ − d_i)²` under assignment `a`.
pub fn udgp_cost(x: &Realization, list: &DistanceList, a: &Assignment) -> Result<f64> {
    if a.pairs.len() != list.m() {
        return Err(Error::IncompleteAssignment(format!(
            "{} pairs assigned for {} distances",
            a.pairs.len(),
            list.m()
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for &(u, v) in &a.pairs {
        if u >= x.n() || v >= x.n() || u == v || !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::IncompleteAssignment(format!(
                "pair ({}, {}) is invalid or repeated",
                u + 1,
                v + 1
            )));
        }
    }
    Ok(a.pairs
        .iter()
        .zip(list.values())
        .map(|(&(u, v), d)| (x.dist(u, v) - d).powi(2))
        .sum())
}

/// The assignment minimizing [`udgp_cost`] for a fixed `x`.
///
/// Squared residuals are convex in the difference, so some optimal matching
/// is monotone: pairs and values sorted by length are matched in order.
/// Complete lists match one-to-one; shorter lists pick which pairs to use by
/// dynamic programming over the two sorted sequences.
pub fn best_assignment(x: &Realization, list: &DistanceList) -> (Assignment, f64) {
    let mut pairs: Vec<((usize, usize), f64)> = all_pairs(x.n())
        .map(|(u, v)| ((u, v), x.dist(u, v)))
        .collect();
    pairs.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut idx: Vec<usize> = (0..list.m()).collect();
    idx.sort_by(|&a, &b| list.values[a].total_cmp(&list.values[b]));
    let (m, big_n) = (idx.len(), pairs.len());

    let mut chosen = vec![(0, 0); m];
    let mut cost = 0.0;
    if m == big_n {
        for (&i, &(pair, r)) in idx.iter().zip(&pairs) {
            chosen[i] = pair;
            cost += (r - list.values[i]).powi(2);
        }
    } else {
        // best[i][j]: first i sorted values matched into the first j sorted pairs.
        let inf = f64::INFINITY;
        let mut best = vec![vec![inf; big_n + 1]; m + 1];
        best[0].fill(0.0);
        for i in 1..=m {
            let d = list.values[idx[i - 1]];
            for j in i..=big_n {
                let take = best[i - 1][j - 1] + (pairs[j - 1].1 - d).powi(2);
                best[i][j] = take.min(best[i][j - 1]);
            }
        }
        cost = best[m][big_n];
        let (mut i, mut j) = (m, big_n);
        while i > 0 {
            if best[i][j] == best[i][j - 1] && j > i {
                j -= 1;
            } else {
                chosen[idx[i - 1]] = pairs[j - 1].0;
                i -= 1;
                j -= 1;
            }
        }
    }
    (Assignment { pairs: chosen }, cost)
}

/// Whether some relabeling of `x` is congruent to `y` (reflections allowed).
pub fn same_shape(x: &Realization, y: &Realization, tol: f64) -> bool {
    fn extend(
        x: &Realization,
        y: &Realization,
        tol: f64,
        map: &mut Vec<usize>,
        free: &mut [bool],
    ) -> bool {
        let i = map.len();
        if i == x.n() {
            return true;
        }
        for j in 0..y.n() {
            if !free[j]
                || !map
                    .iter()
                    .enumerate()
                    .all(|(a, &b)| (x.dist(a, i) - y.dist(b, j)).abs() <= tol)
            {
                continue;
            }
            free[j] = false;
            map.push(j);
            if extend(x, y, tol, map, free) {
                return true;
            }
            map.pop();
            free[j] = true;
        }
        false
    }
    x.n() == y.n()
        && extend(
            x,
            y,
            tol,
            &mut Vec::with_capacity(x.n()),
            &mut vec![true; y.n()],
        )
}

#[derive(Debug, Clone, PartialEq)]
pub enum TribondOutcome {
    Realized(Realization),
    /// The search was exhausted; `best_depth` vertices were the most ever placed.
    Infeasible {
        best_depth: usize,
    },
    TimedOut {
        best_depth: usize,
    },
}

/// Points at list distances from every center, flat with stride `K`:
/// distances to the centers in `r`, coordinates in `y`, sorted by
/// decreasing distance to vertex 0.
struct Candidates {
    r: Vec<f64>,
    y: Vec<f64>,
    /// Nonnegative last coordinate; the first free vertex must have one.
    upper: Vec<bool>,
}

struct Tribond<'a> {
    k: usize,
    n: usize,
    tol: f64,
    vals: &'a [f64],
    used: Vec<bool>,
    /// Buckets of `[0, max]` lying within `tol` of some value, used or not.
    near: Vec<bool>,
    bucket_scale: f64,
    /// Placed points, flat. Center `l < K` lies in the span of the first `l`
    /// axes, so every later vertex solves a triangular system against them.
    pts: Vec<f64>,
    best_depth: usize,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl Tribond<'_> {
    fn pt(&self, i: usize) -> &[f64] {
        &self.pts[i * self.k..(i + 1) * self.k]
    }

    /// First vertex that is not a center. Vertex 1 is fixed on the first axis
    /// even when `K = 1`.
    fn first_free(&self) -> usize {
        self.k.max(2)
    }

    /// Unused value closest to `target` within `tol`.
    fn take_nearest(&self, target: f64) -> Option<usize> {
        let start = self.vals.partition_point(|&v| v < target - self.tol);
        (start..self.vals.len())
            .take_while(|&i| self.vals[i] <= target + self.tol)
            .filter(|&i| !self.used[i])
            .min_by(|&a, &b| {
                (self.vals[a] - target)
                    .abs()
                    .total_cmp(&(self.vals[b] - target).abs())
            })
    }

    fn out_of_time(&mut self) -> bool {
        if self.deadline.is_some_and(|d| Instant::now() > d) {
            self.timed_out = true;
        }
        self.timed_out
    }

    /// Unused values no larger than `v`. Every vertex still to be placed needs
    /// its own distance to vertex 0 in that range.
    fn room_below(&self, v: f64) -> usize {
        let end = self.vals.partition_point(|&w| w <= v + self.tol);
        self.used[..end].iter().filter(|u| !**u).count()
    }

    /// Distances from center `l` to the points at distances `r0, ...` from
    /// centers `0..l` (coordinates `y[0..l-1]` already fixed, the rest on a
    /// sphere of radius `h` in the remaining axes).
    fn range_to(&self, l: usize, r0: f64, y: &[f64]) -> (f64, f64) {
        let p = self.pt(l);
        let fixed: f64 = (0..l - 1).map(|c| (p[c] - y[c]).powi(2)).sum();
        let h = (r0 * r0 - y[..l - 1].iter().map(|v| v * v).sum::<f64>())
            .max(0.0)
            .sqrt();
        let a = p[l - 1].abs();
        (
            (fixed + (a - h).powi(2)).sqrt(),
            (fixed + (a + h).powi(2)).sqrt(),
        )
    }

    /// Enumerates distance tuples `r` to the first `c` centers, one unused
    /// value at a time, and hands each completed point to `leaf`. With
    /// `r[0..l]` fixed the coordinates `y[0..l-1]` are determined, so the
    /// admissible range for `r[l]` is known in closed form.
    #[allow(clippy::type_complexity)]
    fn tuples(
        &mut self,
        l: usize,
        (hi0, hi1): (f64, Option<f64>),
        room: usize,
        r: &mut [f64],
        y: &mut [f64],
        leaf: &mut dyn FnMut(&mut Self, &[f64], &[f64], f64) -> bool,
    ) -> bool {
        let c = r.len();
        if l == c {
            let axis = c - 1;
            let h2 = r[0] * r[0] - y[..axis].iter().map(|v| v * v).sum::<f64>();
            if h2 < -2.0 * r[0] * self.tol {
                return false;
            }
            y[axis] = h2.max(0.0).sqrt();
            y[axis + 1..].fill(0.0);
            if h2 < 0.0 && (0..c).any(|l| (geom::dist(self.pt(l), y) - r[l]).abs() > self.tol) {
                return false;
            }
            return leaf(self, r, y, h2);
        }
        let (lo, hi) = if l == 0 {
            (0.0, hi0)
        } else {
            let (lo, hi) = self.range_to(l, r[0], y);
            // Vertices 0 and 1 are labeled so that vertex 2 is farther from
            // vertex 0 than any vertex is from vertex 1. `None` means the
            // point is vertex 2 itself.
            (
                lo,
                if l == 1 {
                    hi.min(hi1.unwrap_or(r[0]))
                } else {
                    hi
                },
            )
        };
        let start = self.vals.partition_point(|&v| v < lo - self.tol);
        let end = self.vals.partition_point(|&v| v <= hi + self.tol);
        let mut last = f64::NAN;
        // Largest first at every level: the free vertex with the largest
        // distance to vertex 0 comes first, so large values are likely.
        for i in (start..end).rev() {
            let v = self.vals[i];
            if self.used[i] || v == last {
                continue;
            }
            if l == 0 && self.room_below(v) < room {
                break;
            }
            last = v;
            r[l] = v;
            if l > 0 {
                let p = self.pt(l);
                let pivot = p[l - 1];
                if pivot.abs() <= geom::DEGENERACY_TOL * r[0].max(1.0) {
                    return false;
                }
                let partial: f64 = (0..l - 1).map(|c| p[c] * y[c]).sum();
                y[l - 1] = (geom::dot(p, p) + r[0] * r[0] - v * v - 2.0 * partial) / (2.0 * pivot);
            }
            self.used[i] = true;
            let done = self.tuples(l + 1, (hi0, hi1), room, r, y, leaf);
            self.used[i] = false;
            if done || self.timed_out {
                return done;
            }
        }
        false
    }

    /// Places center `j` (2 <= j < K), then the free vertices.
    fn center(&mut self, j: usize) -> bool {
        self.best_depth = self.best_depth.max(j);
        if j == self.n {
            return true;
        }
        if j == self.first_free() {
            return self.free_vertices();
        }
        if self.out_of_time() {
            return false;
        }
        let cap = geom::norm(self.pt(j - 1));
        let mut r = vec![0.0; j];
        let mut y = vec![0.0; self.k];
        // Vertex 2 bounds the distances from both vertex 0 and vertex 1.
        let room = if j == 2 { 2 * (self.n - 2) } else { self.n - j };
        let hi1 = (j > 2).then(|| geom::norm(self.pt(2)));
        self.tuples(0, (cap, hi1), room, &mut r, &mut y, &mut |s, _, y, _| {
            s.pts.extend_from_slice(y);
            if s.center(j + 1) {
                return true;
            }
            s.pts.truncate(j * s.k);
            false
        })
    }

    /// With the centers fixed, every other vertex is one of finitely many
    /// candidate points; collect them and search for a compatible subset.
    fn free_vertices(&mut self) -> bool {
        let j0 = self.first_free();
        if j0 >= self.n {
            return true;
        }
        let cap = geom::norm(self.pt(j0 - 1));
        // The bound on the distance to vertex 1 is d(0,2), which is known
        // here only when vertex 2 is a center.
        let hi1 = if self.k >= 3 {
            geom::norm(self.pt(2))
        } else {
            f64::INFINITY
        };
        let mut found: Vec<(Vec<f64>, Vec<f64>, bool)> = Vec::new();
        let mut r = vec![0.0; self.k];
        let mut y = vec![0.0; self.k];
        let mut collect = |_: &mut Self, r: &[f64], y: &[f64], h2: f64| {
            found.push((r.to_vec(), y.to_vec(), true));
            let h = h2.max(0.0).sqrt();
            if 2.0 * h >= geom::MERGE_DISTANCE {
                let mut low = y.to_vec();
                *low.last_mut().unwrap() = -h;
                found.push((r.to_vec(), low, false));
            }
            false
        };
        self.tuples(0, (cap, Some(hi1)), 0, &mut r, &mut y, &mut collect);
        found.sort_by(|a, b| b.0[0].total_cmp(&a.0[0]));
        let cands = Candidates {
            r: found.iter().flat_map(|c| c.0.iter().copied()).collect(),
            y: found.iter().flat_map(|c| c.1.iter().copied()).collect(),
            upper: found.iter().map(|c| c.2).collect(),
        };
        self.select(&cands, j0, cap, hi1)
    }

    fn select(&mut self, cands: &Candidates, j: usize, cap: f64, hi1: f64) -> bool {
        self.best_depth = self.best_depth.max(j);
        if j == self.n {
            return true;
        }
        if self.out_of_time() {
            return false;
        }
        let k = self.k;
        let count = cands.upper.len();
        let (mut first, mut hi) = (0, count);
        while first < hi {
            let mid = (first + hi) / 2;
            if cands.r[mid * k] > cap + self.tol {
                first = mid + 1;
            } else {
                hi = mid;
            }
        }
        let mut last_r0 = f64::NAN;
        for c in first..count {
            let (r, y) = (&cands.r[c * k..(c + 1) * k], &cands.y[c * k..(c + 1) * k]);
            // Hot path: most candidates fail their distance to some placed
            // free vertex, which the bucket table rejects without a search.
            let placed = &self.pts[k * k..j * k];
            if !placed.chunks_exact(k).all(|p| {
                let d2: f64 = p.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                self.near[((d2.sqrt() * self.bucket_scale) as usize).min(self.near.len() - 1)]
            }) {
                continue;
            }
            if r[0] != last_r0 {
                let room = if k == 2 && j == 2 {
                    2 * (self.n - 2)
                } else {
                    self.n - j
                };
                if self.room_below(r[0]) < room {
                    break;
                }
                last_r0 = r[0];
            }
            // Reflection through the span of the centers: the first free
            // vertex takes the upper side. On the line that is automatic.
            if k >= 2 && j == k && !cands.upper[c] {
                continue;
            }
            let hi1 = if k == 2 && j == 2 { r[0] } else { hi1 };
            if k >= 2 && r[1] > hi1 + self.tol {
                continue;
            }
            let mut taken = Vec::with_capacity(j);
            let ok = (k..j).chain(0..k).all(|q| {
                let d = if q < k {
                    r[q]
                } else {
                    geom::dist(self.pt(q), y)
                };
                match self.take_nearest(d) {
                    Some(i) => {
                        self.used[i] = true;
                        taken.push(i);
                        true
                    }
                    None => false,
                }
            });
            if ok {
                self.pts.extend_from_slice(y);
                if self.select(cands, j + 1, r[0], hi1) {
                    return true;
                }
                self.pts.truncate(j * k);
            }
            for i in taken {
                self.used[i] = false;
            }
            if self.timed_out {
                return false;
            }
        }
        false
    }
}

/// Exact search for a realization whose pairwise distances are the list.
pub fn tribond(list: &DistanceList, tol: f64, timeout: Option<Duration>) -> Result<TribondOutcome> {
    let (n, k) = (list.n(), list.k());
    if !list.is_complete() {
        return Err(Error::BadCardinality {
            m: list.m(),
            n,
            expected: n * (n - 1) / 2,
        });
    }
    let mut vals = list.values().to_vec();
    vals.sort_by(f64::total_cmp);
    let mut search = Tribond {
        k,
        n,
        tol,
        vals: &vals,
        used: vec![false; vals.len()],
        near: Vec::new(),
        bucket_scale: 0.0,
        pts: vec![0.0; k],
        best_depth: 1,
        deadline: timeout.map(|t| Instant::now() + t),
        timed_out: false,
    };
    let found = n == 1 || {
        let dmax = *vals.last().unwrap();
        let buckets = 64 * vals.len();
        search.bucket_scale = buckets as f64 / (dmax + 2.0 * tol);
        search.near = vec![false; buckets + 1];
        for &v in &vals {
            let lo = ((v - tol).max(0.0) * search.bucket_scale) as usize;
            let hi = ((v + tol) * search.bucket_scale) as usize;
            search.near[lo..=hi.min(buckets)].fill(true);
        }
        search.used[vals.len() - 1] = true;
        search.pts.push(dmax);
        search.pts.extend(std::iter::repeat_n(0.0, k - 1));
        search.center(2)
    };
    if found {
        let rows = search.pts.chunks(k).map(<[f64]>::to_vec).collect();
        return Ok(TribondOutcome::Realized(Realization::new(k, rows)?));
    }
    let best_depth = search.best_depth;
    Ok(if search.timed_out {
        TribondOutcome::TimedOut { best_depth }
    } else {
        TribondOutcome::Infeasible { best_depth }
    })
}
