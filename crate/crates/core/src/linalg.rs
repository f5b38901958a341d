//! Small dense linear algebra over any [`Scalar`].
//!
//! Everything here is sized for the desk-scale problems of this crate
//! (a few hundred columns at most), so a one-sided Jacobi SVD is used as the
//! single rank-revealing primitive.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<T>]) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Option<Self> {
        (data.len() == rows * cols).then_some(Self { rows, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data
            .chunks(self.cols.max(1))
            .map(<[T]>::to_vec)
            .take(self.rows)
            .collect()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ · y`.
    pub fn tr_matvec(&self, y: &[T]) -> Vec<T> {
        assert_eq!(self.rows, y.len(), "tr_matvec dimension mismatch");
        let mut out = vec![T::zero(); self.cols];
        for (i, &yi) in y.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a * yi;
            }
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn sum_abs(&self) -> T {
        self.data.iter().map(|v| v.abs()).sum()
    }

    pub fn frobenius(&self) -> T {
        norm2(&self.data)
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)] == T::zero()))
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn svd(&self) -> Svd<T> {
        Svd::new(self)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> T {
        self.svd().max_singular()
    }

    pub fn trace_norm(&self) -> T {
        self.svd().singular.iter().copied().sum()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    // scaled to avoid overflow on large entries
    let m = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if m == T::zero() || !m.is_finite() {
        return m;
    }
    m * a.iter().map(|&v| (v / m) * (v / m)).sum::<T>().sqrt()
}

pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * xi;
    }
}

/// Thin singular value decomposition `A = U·diag(σ)·Vᵀ` from one-sided Jacobi
/// rotations. `v` is always a full `cols × cols` orthogonal matrix, so the
/// trailing columns paired with zero singular values span the null space.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    /// Columns of `A·V` normalized; zero columns where σ vanishes.
    pub u: Matrix<T>,
    pub singular: Vec<T>,
    pub v: Matrix<T>,
}

impl<T: Scalar> Svd<T> {
    pub fn new(a: &Matrix<T>) -> Self {
        if a.rows() > a.cols() + a.cols() / 2 {
            return Self::tall(a);
        }
        Self::jacobi(a)
    }

    /// Householder-reduce a tall matrix to its `n × n` triangular factor first,
    /// so the Jacobi sweeps run on a square problem.
    fn tall(a: &Matrix<T>) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let mut w = a.clone();
        let mut reflectors: Vec<Vec<T>> = Vec::with_capacity(n);
        for k in 0..n {
            let mut v: Vec<T> = (k..m).map(|i| w[(i, k)]).collect();
            let alpha = norm2(&v);
            if alpha == T::zero() {
                reflectors.push(Vec::new());
                continue;
            }
            let sign = if v[0] >= T::zero() {
                T::one()
            } else {
                -T::one()
            };
            v[0] = v[0] + sign * alpha;
            let nv = norm2(&v);
            v.iter_mut().for_each(|x| *x = *x / nv);
            reflect(&mut w, k, &v);
            reflectors.push(v);
        }
        let mut r = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                r[(i, j)] = w[(i, j)];
            }
        }
        let inner = Self::jacobi(&r);
        let mut u = Matrix::zeros(m, n);
        for i in 0..n {
            for j in 0..n {
                u[(i, j)] = inner.u[(i, j)];
            }
        }
        for (k, v) in reflectors.iter().enumerate().rev() {
            if !v.is_empty() {
                reflect(&mut u, k, v);
            }
        }
        Self {
            u,
            singular: inner.singular,
            v: inner.v,
        }
    }

    fn jacobi(a: &Matrix<T>) -> Self {
        let (m, n) = (a.rows(), a.cols());
        // column-major working copies
        let mut cols: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
        let mut v: Vec<Vec<T>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| if i == j { T::one() } else { T::zero() })
                    .collect()
            })
            .collect();
        let eps = T::epsilon() * T::lit(4.0);
        for _sweep in 0..80 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let alpha = dot(&cols[p], &cols[p]);
                    let beta = dot(&cols[q], &cols[q]);
                    let gamma = dot(&cols[p], &cols[q]);
                    if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    rotate(&mut cols, p, q, c, s);
                    rotate(&mut v, p, q, c, s);
                }
            }
            if !rotated {
                break;
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        let norms: Vec<T> = cols.iter().map(|c| norm2(c)).collect();
        order.sort_by(|&i, &j| {
            norms[j]
                .partial_cmp(&norms[i])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut u = Matrix::zeros(m, n);
        let mut vm = Matrix::zeros(n, n);
        let mut singular = Vec::with_capacity(n);
        for (new_j, &old_j) in order.iter().enumerate() {
            let s = norms[old_j];
            singular.push(s);
            if s > T::zero() {
                for i in 0..m {
                    u[(i, new_j)] = cols[old_j][i] / s;
                }
            }
            for i in 0..n {
                vm[(i, new_j)] = v[old_j][i];
            }
        }
        Self { u, singular, v: vm }
    }

    pub fn max_singular(&self) -> T {
        self.singular.first().copied().unwrap_or(T::zero())
    }

    /// Number of singular values above `rel_tol · σ_max`.
    pub fn rank(&self, rel_tol: T) -> usize {
        let cutoff = self.max_singular() * rel_tol;
        if self.max_singular() == T::zero() {
            return 0;
        }
        self.singular.iter().filter(|&&s| s > cutoff).count()
    }

    /// Orthonormal basis of the null space (columns of `V` past the rank).
    pub fn null_space(&self, rel_tol: T) -> Vec<Vec<T>> {
        let r = self.rank(rel_tol);
        (r..self.v.cols()).map(|j| self.v.column(j)).collect()
    }

    /// Orthonormal basis of the column space.
    pub fn range(&self, rel_tol: T) -> Vec<Vec<T>> {
        (0..self.rank(rel_tol)).map(|j| self.u.column(j)).collect()
    }

    /// Minimum-norm least-squares solution of `A x = b`.
    pub fn solve(&self, b: &[T], rel_tol: T) -> Vec<T> {
        let r = self.rank(rel_tol);
        let n = self.v.rows();
        let mut x = vec![T::zero(); n];
        for j in 0..r {
            let coef = self.u.tr_matvec_col(j, b) / self.singular[j];
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = *xi + coef * self.v[(i, j)];
            }
        }
        x
    }

    /// Smallest singular value above the rank cutoff.
    pub fn min_nonzero_singular(&self, rel_tol: T) -> Option<T> {
        let r = self.rank(rel_tol);
        (r > 0).then(|| self.singular[r - 1])
    }
}

impl<T: Scalar> Matrix<T> {
    fn tr_matvec_col(&self, j: usize, b: &[T]) -> T {
        (0..self.rows).map(|i| self[(i, j)] * b[i]).sum()
    }
}

/// Apply `I − 2vvᵀ` to rows `k..` of `w`.
fn reflect<T: Scalar>(w: &mut Matrix<T>, k: usize, v: &[T]) {
    let two = T::lit(2.0);
    for j in 0..w.cols() {
        let proj: T = v
            .iter()
            .enumerate()
            .map(|(r, &vr)| vr * w[(k + r, j)])
            .sum();
        if proj != T::zero() {
            for (r, &vr) in v.iter().enumerate() {
                w[(k + r, j)] = w[(k + r, j)] - two * proj * vr;
            }
        }
    }
}

fn rotate<T: Scalar>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Rank of the matrix whose columns are `vectors`.
pub fn rank_of_columns<T: Scalar>(dim: usize, vectors: &[Vec<T>], rel_tol: T) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_columns(dim, vectors).svd().rank(rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(svd: &Svd<f64>) -> Matrix<f64> {
        let n = svd.singular.len();
        let mut us = svd.u.clone();
        for j in 0..n {
            for i in 0..us.rows() {
                us[(i, j)] *= svd.singular[j];
            }
        }
        us.matmul(&svd.v.transpose())
    }

    #[test]
    fn svd_reconstructs_rectangular() {
        let a = Matrix::from_rows(&[
            vec![1.0, 2.0, 0.5],
            vec![-3.0, 0.0, 1.0],
            vec![0.0, 4.0, 2.0],
            vec![1.0, 1.0, 1.0],
        ])
        .unwrap();
        let svd = a.svd();
        assert!(reconstruct(&svd).sub(&a).max_abs() < 1e-12);
        assert!(svd.singular.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn tall_path_matches_definition() {
        // 9 x 3 with column 2 = column 0 - column 1, so rank 2
        let rows: Vec<Vec<f64>> = (0..9)
            .map(|i| {
                let (a, b) = ((i as f64).sin(), (i as f64 * 0.7).cos());
                vec![a, b, a - b]
            })
            .collect();
        let a = Matrix::from_rows(&rows).unwrap();
        let svd = a.svd();
        assert!(reconstruct(&svd).sub(&a).max_abs() < 1e-12);
        assert_eq!(svd.rank(1e-10), 2);
        let ns = svd.null_space(1e-10);
        assert!(norm2(&a.matvec(&ns[0])) < 1e-12);
        let x = svd.solve(&a.matvec(&[1.0, 2.0, 0.0]), 1e-10);
        assert!(
            norm2(
                &a.matvec(&x)
                    .iter()
                    .zip(a.matvec(&[1.0, 2.0, 0.0]))
                    .map(|(p, q)| p - q)
                    .collect::<Vec<_>>()
            ) < 1e-12
        );
    }

    #[test]
    fn null_space_of_rank_deficient() {
        // third column = first + second
        let a = Matrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap();
        let svd = a.svd();
        assert_eq!(svd.rank(1e-10), 2);
        let ns = svd.null_space(1e-10);
        assert_eq!(ns.len(), 1);
        assert!(norm2(&a.matvec(&ns[0])) < 1e-12);
    }

    #[test]
    fn spectral_norm_of_known_matrix() {
        // singular values of [[3,0],[4,5]] are sqrt(45) and sqrt(5)
        let a = Matrix::from_rows(&[vec![3.0, 0.0], vec![4.0, 5.0]]).unwrap();
        assert!((a.spectral_norm() - 45f64.sqrt()).abs() < 1e-12);
        assert!((a.trace_norm() - (45f64.sqrt() + 5f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn least_squares_solve() {
        let a =
            Matrix::<f64>::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let x = a.svd().solve(&[4.0, 3.0, 7.0], 1e-12);
        assert!((x[0] - 2.0).abs() < 1e-14 && (x[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn wide_matrix_null_space() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0, 1.0]]).unwrap();
        let svd = a.svd();
        assert_eq!(svd.rank(1e-10), 1);
        assert_eq!(svd.null_space(1e-10).len(), 2);
    }
}
