//! Dense symmetric linear algebra for distance geometry.
//!
//! Squared distance matrices and Gram matrices are linked by
//! `D = r 1ᵀ + 1 rᵀ - 2B` and, for centered point sets, `B = -½ J D J` with
//! `J = I - (1/n) 1 1ᵀ`. A Gram matrix is exactly a PSD matrix; factoring its
//! eigendecomposition `B = P Λ Pᵀ` as `x = P √Λ` recovers a realization
//! (classical MDS).
//!
//! Eigenvalues come from a cyclic Jacobi solver. Singular values (used for
//! numerical ranks) come from one-sided Jacobi on the matrix itself, which
//! keeps zero singular values at roundoff level instead of at the square
//! root of roundoff that forming `MᵀM` would give.

use crate::error::{Error, Result};
use crate::model::{DgpInstance, Realization, Weight};

/// Relative off-diagonal threshold for Jacobi convergence.
pub const JACOBI_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;
/// Default relative threshold for [`numerical_rank`].
pub const RANK_TOL_FACTOR: f64 = 1e-10;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    c
                )));
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks(self.cols.max(1))
            .take(self.rows)
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Matrix of squared pairwise distances: symmetric, zero diagonal, nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredEdm(Matrix);

impl SquaredEdm {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch(
                "squared EDM must be square".into(),
            ));
        }
        let tol = 1e-12 * m.max_abs().max(1.0);
        for i in 0..m.rows() {
            if m[(i, i)].abs() > tol {
                return Err(Error::Invariant(format!(
                    "diagonal entry {} is nonzero",
                    i + 1
                )));
            }
            for j in 0..m.cols() {
                if m[(i, j)] < -tol || !m[(i, j)].is_finite() {
                    return Err(Error::Invariant(format!(
                        "entry ({},{}) is negative or not finite",
                        i + 1,
                        j + 1
                    )));
                }
                if (m[(i, j)] - m[(j, i)]).abs() > tol {
                    return Err(Error::Invariant("squared EDM must be symmetric".into()));
                }
            }
        }
        Ok(SquaredEdm(m))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

/// Symmetric matrix interpreted as (a candidate for) `x xᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix(Matrix);

impl GramMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_symmetric(1e-12 * m.max_abs().max(1.0)) {
            return Err(Error::Invariant("Gram matrix must be symmetric".into()));
        }
        Ok(GramMatrix(m))
    }

    /// `x xᵀ` of a realization (not centered).
    pub fn from_realization(x: &Realization) -> Self {
        let n = x.n();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = crate::geom::dot(x.point(i), x.point(j));
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        GramMatrix(m)
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Sorted in descending order.
    pub values: Vec<f64>,
    /// Column `j` is the unit eigenvector for `values[j]`.
    pub vectors: Matrix,
}

impl EigenDecomposition {
    /// `P Λ Pᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.values.len();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = (0..n)
                    .map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)])
                    .sum();
            }
        }
        m
    }
}

pub fn sqedm_from_realization(x: &Realization) -> SquaredEdm {
    let n = x.n();
    let mut m = Matrix::zeros(n, n);
    for u in 0..n {
        for v in u + 1..n {
            let d = x.dist(u, v);
            m[(u, v)] = d * d;
            m[(v, u)] = d * d;
        }
    }
    SquaredEdm(m)
}

/// `B = -½ J D J`, evaluated entrywise through row, column and grand means.
pub fn gram_from_sqedm(d: &SquaredEdm) -> GramMatrix {
    let n = d.n();
    let m = d.matrix();
    let nf = n as f64;
    let row_mean: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)]).sum::<f64>() / nf)
        .collect();
    let grand = row_mean.iter().sum::<f64>() / nf;
    let mut b = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = -0.5 * (m[(i, j)] - row_mean[i] - row_mean[j] + grand);
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    GramMatrix(b)
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Converges when the off-diagonal Frobenius norm drops below
/// `rel_tol * ||B||_F`; fails after [`MAX_SWEEPS`] sweeps.
pub fn eigen_sym(b: &GramMatrix, rel_tol: f64) -> Result<EigenDecomposition> {
    let n = b.n();
    let mut a = b.matrix().clone();
    let mut v = Matrix::identity(n);
    let norm = a.frobenius();
    let off = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = norm == 0.0 || off(&a) <= rel_tol * norm;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Convergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        converged = off(&a) <= rel_tol * norm;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        // First entry of non-negligible size is made positive.
        let lead = (0..n)
            .map(|r| v[(r, src)])
            .find(|x| x.abs() > 1e-12)
            .unwrap_or(1.0);
        let sign = if lead < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            vectors[(r, col)] = sign * v[(r, src)];
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

pub fn is_psd(b: &GramMatrix, tol: f64) -> Result<bool> {
    let eig = eigen_sym(b, JACOBI_TOL)?;
    Ok(eig.values.last().is_none_or(|&min| min >= -tol))
}

/// Factors a PSD matrix as `x xᵀ` with `x` of width `K`, coordinates ordered
/// by descending eigenvalue and zero-padded beyond the rank.
pub fn realize_from_gram(b: &GramMatrix, k: usize, tol: f64) -> Result<Realization> {
    if k == 0 {
        return Err(Error::Invariant("dimension K must be positive".into()));
    }
    let n = b.n();
    let eig = eigen_sym(b, JACOBI_TOL)?;
    if let Some(&min) = eig.values.last() {
        if min < -tol {
            return Err(Error::NotPsd(min));
        }
    }
    let rank = eig.values.iter().filter(|&&l| l > tol).count();
    if rank > k {
        return Err(Error::RankExceedsK { rank, k });
    }
    let mut x = Realization::zeros(n, k);
    for (col, &lambda) in eig.values.iter().enumerate().take(rank) {
        let s = lambda.sqrt();
        for i in 0..n {
            x.point_mut(i)[col] = s * eig.vectors[(i, col)];
        }
    }
    Ok(x)
}

/// Singular values in descending order, by one-sided Jacobi.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    // Rotate columns of the orientation with fewer columns.
    let a = if m.cols() > m.rows() {
        m.transpose()
    } else {
        m.clone()
    };
    let (r, c) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<f64>> = (0..c)
        .map(|j| (0..r).map(|i| a[(i, j)]).collect())
        .collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let (lo, hi) = cols.split_at_mut(q);
                for (xp, xq) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (u, w) = (*xp, *xq);
                    *xp = cs * u - sn * w;
                    *xq = sn * u + cs * w;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = cols
        .iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `tol_factor * σ_max * max(rows, cols)`.
pub fn numerical_rank(m: &Matrix, tol_factor: f64) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    let thresh = tol_factor * smax * m.rows().max(m.cols()) as f64;
    s.iter().filter(|&&v| v > thresh).count()
}

/// `⌊(√(8m+1) − 1)/2⌋` in integer arithmetic: the largest `K` with
/// `K(K+1)/2 ≤ m`.
pub fn barvinok_bound(m: u64) -> u64 {
    let r = (8 * m + 1).isqrt();
    (r - 1) / 2
}

/// Largest violation of `B_ii + B_jj - 2 B_ij = d_ij²` over the edges.
pub fn edmcp_residual(b: &GramMatrix, instance: &DgpInstance) -> Result<f64> {
    if b.n() != instance.n() {
        return Err(Error::DimensionMismatch(format!(
            "Gram matrix is {}x{} but instance has {} vertices",
            b.n(),
            b.n(),
            instance.n()
        )));
    }
    let m = b.matrix();
    let mut worst: f64 = 0.0;
    for e in instance.edges() {
        let Weight::Exact(d) = e.weight else {
            return Err(Error::IntervalEdgePresent(e.u + 1, e.v + 1));
        };
        let lhs = m[(e.u, e.u)] + m[(e.v, e.v)] - 2.0 * m[(e.u, e.v)];
        worst = worst.max((lhs - d * d).abs());
    }
    Ok(worst)
}
