//! Instances, realizations and frameworks, plus the checks every other module
//! leans on: edge validation, congruence and edge density.
//!
//! Vertices are 0-based here. The JSON layer in [`crate::io`] converts from and
//! to the 1-based labels used in files.

use std::collections::HashSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geom;
use crate::graph::Graph;

/// Default tolerance for distance equality.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Edge weight: an exact distance or an uncertainty interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Exact(f64),
    Interval { lo: f64, hi: f64 },
}

impl Weight {
    pub fn is_exact(&self) -> bool {
        matches!(self, Weight::Exact(_))
    }

    pub fn exact(&self) -> Option<f64> {
        match *self {
            Weight::Exact(d) => Some(d),
            Weight::Interval { .. } => None,
        }
    }

    /// How far `d` lies from the admissible set of this weight.
    pub fn error(&self, d: f64) -> f64 {
        match *self {
            Weight::Exact(w) => (d - w).abs(),
            Weight::Interval { lo, hi } => {
                if d < lo {
                    lo - d
                } else if d > hi {
                    d - hi
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: Weight,
}

impl Edge {
    pub fn exact(u: usize, v: usize, d: f64) -> Self {
        Edge {
            u,
            v,
            weight: Weight::Exact(d),
        }
    }

    pub fn interval(u: usize, v: usize, lo: f64, hi: f64) -> Self {
        Edge {
            u,
            v,
            weight: Weight::Interval { lo, hi },
        }
    }
}

/// A weighted simple graph together with the target dimension `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct DgpInstance {
    n: usize,
    k: usize,
    edges: Vec<Edge>,
}

impl DgpInstance {
    pub fn new(n: usize, k: usize, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invariant("vertex count must be positive".into()));
        }
        if k == 0 {
            return Err(Error::Invariant("dimension K must be positive".into()));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(Error::Invariant(format!(
                    "edge {{{},{}}} references a vertex outside 1..{}",
                    e.u + 1,
                    e.v + 1,
                    n
                )));
            }
            if e.u == e.v {
                return Err(Error::Invariant(format!("self-loop at vertex {}", e.u + 1)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::Invariant(format!(
                    "duplicate edge {{{},{}}}",
                    e.u + 1,
                    e.v + 1
                )));
            }
            match e.weight {
                Weight::Exact(d) if !(d.is_finite() && d > 0.0) => {
                    return Err(Error::Invariant(format!(
                        "edge {{{},{}}} has nonpositive weight {}",
                        e.u + 1,
                        e.v + 1,
                        d
                    )));
                }
                Weight::Interval { lo, hi }
                    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) =>
                {
                    return Err(Error::Invariant(format!(
                        "edge {{{},{}}} has invalid interval [{}, {}]",
                        e.u + 1,
                        e.v + 1,
                        lo,
                        hi
                    )));
                }
                _ => {}
            }
        }
        Ok(DgpInstance { n, k, edges })
    }

    /// The complete graph on the points of `x`, weighted by their distances.
    pub fn complete_from(x: &Realization) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..x.n() {
            for v in u + 1..x.n() {
                edges.push(Edge::exact(u, v, x.dist(u, v)));
            }
        }
        DgpInstance::new(x.n(), x.k(), edges)
    }

    /// Same graph, weights taken from the realization `x`.
    pub fn reweighted(&self, x: &Realization) -> Result<Self> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::exact(e.u, e.v, x.dist(e.u, e.v)))
            .collect();
        DgpInstance::new(self.n, self.k, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn with_dimension(&self, k: usize) -> Result<Self> {
        DgpInstance::new(self.n, k, self.edges.clone())
    }

    /// Underlying unweighted graph.
    pub fn graph(&self) -> Graph {
        Graph::new(self.n, self.edges.iter().map(|e| (e.u, e.v)).collect())
            .expect("instance invariants imply a simple graph")
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<Weight> {
        self.edges
            .iter()
            .find(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u))
            .map(|e| e.weight)
    }
}

/// `n` points in `R^K`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    n: usize,
    k: usize,
    coords: Vec<f64>,
}

impl Realization {
    pub fn new(k: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invariant("dimension K must be positive".into()));
        }
        let n = rows.len();
        let mut coords = Vec::with_capacity(n * k);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} coordinates, expected {}",
                    i + 1,
                    row.len(),
                    k
                )));
            }
            if row.iter().any(|c| !c.is_finite()) {
                return Err(Error::Invariant(format!(
                    "row {} has a non-finite entry",
                    i + 1
                )));
            }
            coords.extend(row);
        }
        Ok(Realization { n, k, coords })
    }

    /// `n` points drawn uniformly from the unit cube `[0,1)^K`.
    pub fn random_uniform(n: usize, k: usize, rng: &mut impl Rng) -> Self {
        let mut x = Realization::zeros(n, k);
        x.coords.iter_mut().for_each(|c| *c = rng.random());
        x
    }

    pub fn zeros(n: usize, k: usize) -> Self {
        Realization {
            n,
            k,
            coords: vec![0.0; n * k],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.k..(i + 1) * self.k]
    }

    pub fn point_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coords[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks(self.k)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn dist(&self, u: usize, v: usize) -> f64 {
        geom::dist(self.point(u), self.point(v))
    }

    /// Applies `p -> q p + t` to every point, with `q` given row-major.
    pub fn transformed(&self, q: &[f64], t: &[f64]) -> Realization {
        let k = self.k;
        let mut out = Realization::zeros(self.n, k);
        for i in 0..self.n {
            let p = self.point(i);
            let dst = out.point_mut(i);
            for r in 0..k {
                dst[r] = t[r] + (0..k).map(|c| q[r * k + c] * p[c]).sum::<f64>();
            }
        }
        out
    }
}

/// A graph together with one of its realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct Framework {
    pub instance: DgpInstance,
    pub realization: Realization,
}

impl Framework {
    pub fn new(instance: DgpInstance, realization: Realization) -> Result<Self> {
        check_shapes(&instance, &realization)?;
        Ok(Framework {
            instance,
            realization,
        })
    }
}

fn check_shapes(instance: &DgpInstance, x: &Realization) -> Result<()> {
    if instance.n() != x.n() || instance.k() != x.k() {
        return Err(Error::DimensionMismatch(format!(
            "instance is n={}, K={} but realization is n={}, K={}",
            instance.n(),
            instance.k(),
            x.n(),
            x.k()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolatedEdge {
    pub u: usize,
    pub v: usize,
    pub realized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub max_abs_error: f64,
    pub mean_sq_error: f64,
    pub violated_edges: Vec<ViolatedEdge>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violated_edges.is_empty()
    }
}

/// Checks every edge of `instance` against `x`. Exact edges contribute
/// `| ||x_u - x_v|| - d |`, interval edges their distance to `[lo, hi]`.
pub fn validate(instance: &DgpInstance, x: &Realization, tol: f64) -> Result<ValidationReport> {
    check_shapes(instance, x)?;
    let mut max_abs_error: f64 = 0.0;
    let mut sq = 0.0;
    let mut violated_edges = Vec::new();
    for e in instance.edges() {
        let d = x.dist(e.u, e.v);
        let err = e.weight.error(d);
        max_abs_error = max_abs_error.max(err);
        sq += err * err;
        if err > tol {
            violated_edges.push(ViolatedEdge {
                u: e.u,
                v: e.v,
                realized: d,
            });
        }
    }
    let m = instance.edges().len();
    Ok(ValidationReport {
        max_abs_error,
        mean_sq_error: if m == 0 { 0.0 } else { sq / m as f64 },
        violated_edges,
    })
}

/// Indices of `K+1` affinely independent points of `x` chosen greedily, or
/// `None` if the affine hull of `x` is lower-dimensional.
pub(crate) fn affine_frame(x: &Realization) -> Option<Vec<usize>> {
    let k = x.k();
    if x.n() < k + 1 {
        return None;
    }
    let origin = x.point(0);
    let scale = (1..x.n())
        .map(|i| x.dist(0, i))
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut frame = vec![0];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        for i in 1..x.n() {
            if frame.contains(&i) {
                continue;
            }
            let r = geom::residual(&geom::sub(x.point(i), origin), &basis);
            let len = geom::norm(&r);
            if best.as_ref().is_none_or(|(l, _, _)| len > *l) {
                best = Some((len, i, r));
            }
        }
        let (len, i, r) = best?;
        if len <= 1e-9 * scale {
            return None;
        }
        frame.push(i);
        basis.push(r.into_iter().map(|c| c / len).collect());
    }
    Some(frame)
}

fn frame_orientation(x: &Realization, frame: &[usize]) -> f64 {
    let o = x.point(frame[0]);
    let m: Vec<Vec<f64>> = frame[1..]
        .iter()
        .map(|&i| geom::sub(x.point(i), o))
        .collect();
    geom::determinant(m)
}

/// Congruence test by comparison of full pairwise-distance matrices.
///
/// With `allow_reflection == false` the orientation of a common affine frame
/// must also agree. A realization whose affine hull is lower-dimensional is
/// congruent to its mirror image by a proper rotation.
pub fn congruent(
    x: &Realization,
    y: &Realization,
    tol: f64,
    allow_reflection: bool,
) -> Result<bool> {
    if x.n() != y.n() || x.k() != y.k() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compare n={},K={} with n={},K={}",
            x.n(),
            x.k(),
            y.n(),
            y.k()
        )));
    }
    for u in 0..x.n() {
        for v in u + 1..x.n() {
            if (x.dist(u, v) - y.dist(u, v)).abs() > tol {
                return Ok(false);
            }
        }
    }
    if allow_reflection {
        return Ok(true);
    }
    match affine_frame(x) {
        None => Ok(true),
        Some(frame) => {
            let sx = frame_orientation(x, &frame);
            let sy = frame_orientation(y, &frame);
            Ok(sx.signum() == sy.signum())
        }
    }
}

/// Edge density `2|E| / (n (n-1))`; zero for graphs with fewer than two vertices.
pub fn eta(instance: &DgpInstance) -> f64 {
    eta_of(instance.n(), instance.edges().len())
}

pub fn eta_of(n: usize, m: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    2.0 * m as f64 / (n as f64 * (n as f64 - 1.0))
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    /// Random orthogonal `K×K` matrix (row-major) by Gram–Schmidt on
    /// Gaussian rows, flipped to a rotation when `proper` is set.
    fn orthogonal(k: usize, proper: bool, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        while rows.len() < k {
            let mut v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
            for r in &rows {
                let d = geom::dot(&v, r);
                v.iter_mut().zip(r).for_each(|(a, b)| *a -= d * b);
            }
            let len = geom::norm(&v);
            if len > 1e-3 {
                rows.push(v.iter().map(|a| a / len).collect());
            }
        }
        if proper && geom::determinant(rows.clone()) < 0.0 {
            rows[0].iter_mut().for_each(|a| *a = -*a);
        }
        rows.concat()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exact_constructions_validate_with_zero_error(n in 2usize..12, k in 1usize..5, seed in any::<u64>()) {
            let x = Realization::random_uniform(n, k, &mut ChaCha8Rng::seed_from_u64(seed));
            let inst = DgpInstance::complete_from(&x).unwrap();
            prop_assert_eq!(validate(&inst, &x, 0.0).unwrap().max_abs_error, 0.0);
        }

        #[test]
        fn congruence_is_reflexive_symmetric_and_motion_invariant(
            n in 1usize..10, k in 1usize..5, seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = Realization::random_uniform(n, k, &mut rng);
            let t: Vec<f64> = (0..k).map(|_| rng.random_range(-5.0..5.0)).collect();
            let y = x.transformed(&orthogonal(k, true, &mut rng), &t);
            for allow in [false, true] {
                prop_assert!(congruent(&x, &x, DEFAULT_TOL, allow).unwrap());
                prop_assert!(congruent(&x, &y, DEFAULT_TOL, allow).unwrap());
                prop_assert!(congruent(&y, &x, DEFAULT_TOL, allow).unwrap());
            }
            let z = x.transformed(&orthogonal(k, false, &mut rng), &t);
            prop_assert!(congruent(&x, &z, DEFAULT_TOL, true).unwrap());
            prop_assert_eq!(
                congruent(&x, &z, DEFAULT_TOL, false).unwrap(),
                congruent(&z, &x, DEFAULT_TOL, false).unwrap()
            );
        }
    }
}
