//! Reductions and embeddings: Partition as a 1D cycle instance, the Fréchet
//! embedding of a finite metric into ℓ∞, and Gaussian random projection.
//!
//! Index sets for Partition are 0-based positions into `a`.

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom;
use crate::linalg::Matrix;
use crate::model::{DgpInstance, Edge, Realization};
use crate::rng;

/// Constant in `K = ceil(C ln|Y| / ε²)`.
pub const JLL_C: f64 = 4.0;

/// Slack allowed in metric checks and in the Fréchet isometry.
pub const METRIC_TOL: f64 = 1e-12;

/// Cycle `0 - 1 - ... - (n-1) - 0` in one dimension: edge `{0, n-1}` has
/// weight `a[0]` and edge `{i-1, i}` has weight `a[i]`.
pub fn partition_to_edgp1(a: &[u64]) -> Result<DgpInstance> {
    let n = a.len();
    if n < 3 {
        return Err(Error::TooShort(n));
    }
    if a.contains(&0) {
        return Err(Error::Invariant(
            "partition entries must be positive".into(),
        ));
    }
    let mut edges = vec![Edge::exact(0, n - 1, a[0] as f64)];
    edges.extend((1..n).map(|i| Edge::exact(i - 1, i, a[i] as f64)));
    DgpInstance::new(n, 1, edges)
}

fn in_set(n: usize, set: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &i in set {
        if i >= n {
            return Err(Error::Invariant(format!("index {i} outside 0..{n}")));
        }
        mask[i] = true;
    }
    Ok(mask)
}

/// Positions on the line from a witness `set`: vertex `i` steps right by
/// `a[i]` when `i` is in the set, left otherwise. A witness without index 0
/// is replaced by its complement, which is also a witness.
pub fn realize_partition_yes(a: &[u64], set: &[usize]) -> Result<Realization> {
    let n = a.len();
    if n < 3 {
        return Err(Error::TooShort(n));
    }
    let mut mask = in_set(n, set)?;
    let inside: u64 = a
        .iter()
        .zip(&mask)
        .filter(|(_, m)| **m)
        .map(|(v, _)| v)
        .sum();
    let outside: u64 = a.iter().sum::<u64>() - inside;
    if inside != outside {
        return Err(Error::NotAWitness {
            left: inside,
            right: outside,
        });
    }
    if !mask[0] {
        mask.iter_mut().for_each(|m| *m = !*m);
    }
    let mut x = vec![0i64; n];
    for i in 1..n {
        let step = a[i] as i64;
        x[i] = if mask[i] {
            x[i - 1] + step
        } else {
            x[i - 1] - step
        };
    }
    Realization::new(1, x.into_iter().map(|v| vec![v as f64]).collect())
}

/// Reads a witness off a realization of the cycle: the indices whose step
/// around the cycle goes right. Index 0 is the closing step `n-1 → 0`.
pub fn partition_from_realization(a: &[u64], x: &Realization) -> Result<Vec<usize>> {
    let n = a.len();
    if n < 3 {
        return Err(Error::TooShort(n));
    }
    if x.n() != n || x.k() != 1 {
        return Err(Error::InvalidRealization(format!(
            "expected {n} points on a line, got {} in R^{}",
            x.n(),
            x.k()
        )));
    }
    let pos = |i: usize| x.point(i)[0];
    let mut set = Vec::new();
    for (i, &ai) in a.iter().enumerate() {
        let prev = if i == 0 { n - 1 } else { i - 1 };
        let step = pos(i) - pos(prev);
        let want = ai as f64;
        if (step.abs() - want).abs() > crate::model::DEFAULT_TOL * want.max(1.0) {
            return Err(Error::InvalidRealization(format!(
                "edge {{{},{}}} has length {} but weight {}",
                prev + 1,
                i + 1,
                step.abs(),
                want
            )));
        }
        if step > 0.0 {
            set.push(i);
        }
    }
    Ok(set)
}

/// Exhaustive Partition oracle; returns a witness containing index 0.
pub fn partition_bruteforce(a: &[u64]) -> Option<Vec<usize>> {
    let n = a.len();
    assert!(n < 64, "brute force limited to 63 entries");
    let total: u64 = a.iter().sum();
    if total % 2 == 1 || n == 0 {
        return None;
    }
    // Index 0 is always in the set, so only the other n-1 bits vary.
    (0u64..1 << (n - 1))
        .map(|rest| rest << 1 | 1)
        .find_map(|mask| {
            let s: u64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| a[i]).sum();
            (2 * s == total).then(|| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        })
}

/// Symmetric matrix of positive off-diagonal distances obeying the triangle
/// inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetric {
    d: Matrix,
}

impl FiniteMetric {
    pub fn new(d: Matrix) -> Result<Self> {
        let n = d.rows();
        if d.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "metric must be square, got {n}×{}",
                d.cols()
            )));
        }
        for u in 0..n {
            if d[(u, u)] != 0.0 {
                return Err(Error::MetricViolation(format!(
                    "d({0},{0}) = {1} is not zero",
                    u + 1,
                    d[(u, u)]
                )));
            }
            for v in u + 1..n {
                let (a, b) = (d[(u, v)], d[(v, u)]);
                if !a.is_finite() || a <= 0.0 {
                    return Err(Error::MetricViolation(format!(
                        "d({},{}) = {a} is not positive",
                        u + 1,
                        v + 1
                    )));
                }
                if (a - b).abs() > METRIC_TOL * a.max(1.0) {
                    return Err(Error::MetricViolation(format!(
                        "d({0},{1}) = {a} but d({1},{0}) = {b}",
                        u + 1,
                        v + 1
                    )));
                }
            }
        }
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    let (direct, detour) = (d[(u, w)], d[(u, v)] + d[(v, w)]);
                    if direct > detour + METRIC_TOL * detour.max(1.0) {
                        return Err(Error::MetricViolation(format!(
                            "d({},{}) = {direct} exceeds d({},{}) + d({},{}) = {detour}",
                            u + 1,
                            w + 1,
                            u + 1,
                            v + 1,
                            v + 1,
                            w + 1
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetric { d })
    }

    pub fn n(&self) -> usize {
        self.d.rows()
    }

    pub fn d(&self, u: usize, v: usize) -> f64 {
        self.d[(u, v)]
    }

    pub fn matrix(&self) -> &Matrix {
        &self.d
    }
}

/// Shortest-path metric of a connected graph with positive edge weights
/// `(u, v, w)`, by Floyd–Warshall.
pub fn shortest_path_metric(n: usize, edges: &[(usize, usize, f64)]) -> Result<FiniteMetric> {
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[(i, j)] = f64::INFINITY;
            }
        }
    }
    for &(u, v, w) in edges {
        if u >= n || v >= n || u == v || !(w > 0.0 && w.is_finite()) {
            return Err(Error::Invariant(format!("bad weighted edge ({u},{v},{w})")));
        }
        d[(u, v)] = d[(u, v)].min(w);
        d[(v, u)] = d[(u, v)];
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[(i, m)] + d[(m, j)];
                if via < d[(i, j)] {
                    d[(i, j)] = via;
                }
            }
        }
    }
    if (0..n).any(|j| d[(0, j)].is_infinite()) {
        return Err(Error::MetricViolation("graph is disconnected".into()));
    }
    FiniteMetric::new(d)
}

/// Point `v` is row `v` of the distance matrix. By the triangle inequality
/// the ℓ∞ distance between rows `u` and `v` is attained at coordinate `u`.
pub fn frechet_embed(metric: &FiniteMetric) -> Realization {
    let n = metric.n();
    Realization::new(n, metric.matrix().to_rows()).unwrap_or_else(|_| Realization::zeros(n, n))
}

pub fn linf_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    pub epsilon_target: f64,
    #[serde(rename = "K_used")]
    pub k_used: usize,
    pub fraction_within_bounds: f64,
    pub worst_ratio_low: f64,
    pub worst_ratio_high: f64,
}

/// Target dimension for `count` points: `ceil(c ln(count) / ε²)`, at least 1.
pub fn jll_dimension(count: usize, epsilon: f64, c: f64) -> usize {
    ((c * (count as f64).ln() / (epsilon * epsilon)).ceil() as usize).max(1)
}

pub fn jll_project(
    points: &[Vec<f64>],
    epsilon: f64,
    seed: u64,
) -> Result<(Vec<Vec<f64>>, DistortionReport)> {
    jll_project_with(points, epsilon, JLL_C, seed)
}

/// Projects with a dense `K×m` matrix of independent `N(0, 1/K)` entries and
/// reports the distortion over all pairs of distinct points.
pub fn jll_project_with(
    points: &[Vec<f64>],
    epsilon: f64,
    c: f64,
    seed: u64,
) -> Result<(Vec<Vec<f64>>, DistortionReport)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::BadEpsilon(epsilon));
    }
    if points.len() < 2 {
        return Err(Error::Invariant(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    let m = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != m) {
        return Err(Error::DimensionMismatch(format!(
            "points of dimension {m} and {}",
            p.len()
        )));
    }
    let k = jll_dimension(points.len(), epsilon, c);
    let mut rng = rng::task_rng(seed, &[0x6a6c6c]);
    let scale = 1.0 / (k as f64).sqrt();
    let map: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    scale * z
                })
                .collect()
        })
        .collect();
    let projected: Vec<Vec<f64>> = points
        .iter()
        .map(|p| map.iter().map(|row| geom::dot(row, p)).collect())
        .collect();

    let (mut total, mut within) = (0usize, 0usize);
    let (mut low, mut high) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let before = geom::dist(&points[i], &points[j]);
            if before == 0.0 {
                continue;
            }
            let ratio = geom::dist(&projected[i], &projected[j]) / before;
            total += 1;
            if (1.0 - epsilon..=1.0 + epsilon).contains(&ratio) {
                within += 1;
            }
            low = low.min(ratio);
            high = high.max(ratio);
        }
    }
    let report = if total == 0 {
        DistortionReport {
            epsilon_target: epsilon,
            k_used: k,
            fraction_within_bounds: 1.0,
            worst_ratio_low: 1.0,
            worst_ratio_high: 1.0,
        }
    } else {
        DistortionReport {
            epsilon_target: epsilon,
            k_used: k,
            fraction_within_bounds: within as f64 / total as f64,
            worst_ratio_low: low,
            worst_ratio_high: high,
        }
    };
    Ok((projected, report))
}
