//! Small dense geometry kernels on `&[f64]` points: Gram-Schmidt frames,
//! determinants, sphere intersection and hyperplane reflection.

use crate::error::{Error, Result};

/// Relative threshold under which a Gram-Schmidt residual counts as zero.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Two intersection points closer than this are merged into one.
pub const MERGE_DISTANCE: f64 = 1e-7;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Residual of `v` after removing its components along the orthonormal `basis`
/// (two passes of modified Gram-Schmidt).
pub fn residual(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for e in basis {
            let c = dot(&r, e);
            for (ri, ei) in r.iter_mut().zip(e) {
                *ri -= c * ei;
            }
        }
    }
    r
}

/// Orthonormal basis of the span of `vectors`, or `None` if they are linearly
/// dependent relative to `scale`.
pub fn orthonormal_basis(vectors: &[Vec<f64>], scale: f64) -> Option<Vec<Vec<f64>>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    let thresh = DEGENERACY_TOL * scale.max(1e-300);
    for v in vectors {
        let r = residual(v, &basis);
        let len = norm(&r);
        if len <= thresh {
            return None;
        }
        basis.push(r.into_iter().map(|x| x / len).collect());
    }
    Some(basis)
}

/// A unit vector in `R^dim` orthogonal to the orthonormal `basis`
/// (which must have fewer than `dim` vectors).
pub fn complement_unit(basis: &[Vec<f64>], dim: usize) -> Vec<f64> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for axis in (0..dim).rev() {
        let mut e = vec![0.0; dim];
        e[axis] = 1.0;
        let r = residual(&e, basis);
        let len = norm(&r);
        if best.as_ref().is_none_or(|(l, _)| len > *l + 1e-12) {
            best = Some((len, r));
        }
    }
    let (len, r) = best.expect("dim > 0");
    r.into_iter().map(|x| x / len).collect()
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            let (top, bottom) = m.split_at_mut(row);
            for (dst, src) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *dst -= f * src;
            }
        }
    }
    det
}

/// Intersection of `l` spheres in `R^d` with affinely independent centers:
/// the points `foot + h u` for unit `u` orthogonal to the centers' affine
/// hull, where `h = sqrt(h2)`. Empty when `h2 < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Locus {
    pub foot: Vec<f64>,
    pub h2: f64,
    /// Orthonormal basis of the directions of the centers' affine hull.
    pub basis: Vec<Vec<f64>>,
}

impl Locus {
    /// Smallest and largest distance from `p` to a point of the locus.
    pub fn distance_range(&self, p: &[f64]) -> (f64, f64) {
        let w = sub(p, &self.foot);
        let b = residual(&w, &self.basis);
        let beta = norm(&b);
        let along = dot(&w, &w) - beta * beta;
        let h = self.h2.max(0.0).sqrt();
        let lo = (along.max(0.0) + (beta - h) * (beta - h)).sqrt();
        let hi = (along.max(0.0) + (beta + h) * (beta + h)).sqrt();
        (lo, hi)
    }
}

pub fn sphere_locus(centers: &[&[f64]], radii: &[f64]) -> Result<Locus> {
    let c0 = centers[0];
    let diffs: Vec<Vec<f64>> = centers[1..].iter().map(|c| sub(c, c0)).collect();
    let scale = diffs.iter().map(|d| norm(d)).fold(0.0, f64::max).max(1.0);
    let basis = orthonormal_basis(&diffs, scale).ok_or(Error::DegenerateCenters)?;

    // q = p - c0 = sum_k a_k e_k + (orthogonal part); q . b_j = (|b_j|^2 + r0^2 - r_j^2) / 2.
    // b_j only has components on e_1..e_j, so forward substitution suffices.
    let mut a = vec![0.0; basis.len()];
    for (j, b) in diffs.iter().enumerate() {
        let rhs = 0.5 * (dot(b, b) + radii[0] * radii[0] - radii[j + 1] * radii[j + 1]);
        let mut acc = rhs;
        for l in 0..j {
            acc -= dot(b, &basis[l]) * a[l];
        }
        a[j] = acc / dot(b, &basis[j]);
    }
    let mut foot = c0.to_vec();
    for (ak, e) in a.iter().zip(&basis) {
        for (f, ei) in foot.iter_mut().zip(e) {
            *f += ak * ei;
        }
    }
    let h2 = radii[0] * radii[0] - dot(&a, &a);
    Ok(Locus { foot, h2, basis })
}

/// Points of `R^K` at the prescribed distances from `K` centers.
///
/// Returns zero, one or two points. Two points are mirror images through the
/// affine hull of the centers and come out in a fixed order (`+normal` side
/// first). Near-tangent configurations whose two points lie closer than
/// [`MERGE_DISTANCE`] collapse into a single point.
pub fn sphere_intersect(centers: &[&[f64]], radii: &[f64], tol: f64) -> Result<Vec<Vec<f64>>> {
    let k = centers.len();
    if k == 0 || radii.len() != k || centers.iter().any(|c| c.len() != k) {
        return Err(Error::DimensionMismatch(format!(
            "sphere_intersect needs K centers in R^K and K radii (got {} centers, {} radii)",
            k,
            radii.len()
        )));
    }
    let Locus { foot, h2, basis } = sphere_locus(centers, radii)?;
    let normal = complement_unit(&basis, k);

    let fits = |p: &[f64]| {
        centers
            .iter()
            .zip(radii)
            .all(|(c, r)| (dist(p, c) - r).abs() <= tol)
    };

    if h2 <= 0.0 || 2.0 * h2.sqrt() < MERGE_DISTANCE {
        return Ok(if fits(&foot) { vec![foot] } else { Vec::new() });
    }
    let h = h2.sqrt();
    let plus: Vec<f64> = foot.iter().zip(&normal).map(|(f, n)| f + h * n).collect();
    let minus: Vec<f64> = foot.iter().zip(&normal).map(|(f, n)| f - h * n).collect();
    Ok(vec![plus, minus])
}

/// Places a point at distances `radii` from `prev` in the canonical frame.
///
/// `prev[l]` must lie in the span of the first `l` axes (so `prev[0]` is the
/// origin). The result lies in the span of the first `prev.len()` axes of
/// `R^dim` with a nonnegative last coordinate; a slightly negative squared
/// height is clamped to zero, so callers should check the distances.
pub fn place_canonical(prev: &[&[f64]], radii: &[f64], dim: usize) -> Result<Vec<f64>> {
    let j = prev.len();
    let mut y = vec![0.0; dim];
    // 2 p_l . y = |p_l|^2 + r_0^2 - r_l^2, and p_l only spans axes < l.
    for l in 1..j {
        let p = prev[l];
        let pivot = p[l - 1];
        if pivot.abs() <= DEGENERACY_TOL * norm(p).max(1.0) {
            return Err(Error::DegenerateCenters);
        }
        let rhs = 0.5 * (dot(p, p) + radii[0] * radii[0] - radii[l] * radii[l]);
        let partial: f64 = (0..l - 1).map(|c| p[c] * y[c]).sum();
        y[l - 1] = (rhs - partial) / pivot;
    }
    let h2 = radii[0] * radii[0] - y[..j - 1].iter().map(|c| c * c).sum::<f64>();
    y[j - 1] = h2.max(0.0).sqrt();
    Ok(y)
}

/// Reflects `p` through the hyperplane with unit normal `normal` passing through `origin`.
pub fn reflect(p: &[f64], origin: &[f64], normal: &[f64]) -> Vec<f64> {
    let s = 2.0 * dot(&sub(p, origin), normal);
    p.iter().zip(normal).map(|(x, n)| x - s * n).collect()
}
