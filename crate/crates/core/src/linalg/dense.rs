//! Dense column-major matrices and the cyclic Jacobi eigensolver.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense real matrix, column-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from whole columns; all must share the same length.
    pub fn from_columns(rows: usize, columns: &[Vec<S>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            m.col_mut(j).copy_from_slice(c);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: S) {
        self.data[j * self.rows + i] += v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[S] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [S] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// C = self * other.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut c = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let bcol = other.col(j);
            let ccol = c.col_mut(j);
            for (k, &bkj) in bcol.iter().enumerate() {
                if bkj == S::zero() {
                    continue;
                }
                let acol = self.col(k);
                for i in 0..acol.len() {
                    ccol[i] += acol[i] * bkj;
                }
            }
        }
        c
    }

    /// C = selfᵀ * other.
    pub fn transpose_matmul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "transpose_matmul shape");
        let mut c = Self::zeros(self.cols, other.cols);
        for j in 0..other.cols {
            let bcol = other.col(j);
            for i in 0..self.cols {
                c.set(i, j, dot(self.col(i), bcol));
            }
        }
        c
    }

    /// y = self * x.
    pub fn matvec(&self, x: &[S], y: &mut [S]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        y.fill(S::zero());
        for (k, &xk) in x.iter().enumerate() {
            if xk == S::zero() {
                continue;
            }
            let acol = self.col(k);
            for i in 0..self.rows {
                y[i] += acol[i] * xk;
            }
        }
    }

    pub fn scale(&mut self, s: S) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn frobenius_norm(&self) -> S {
        self.data.iter().map(|&v| v * v).sum::<S>().sqrt()
    }

    pub fn max_abs(&self) -> S {
        self.data
            .iter()
            .fold(S::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> S {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(S::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    /// Replaces the matrix with (M + Mᵀ)/2. Square matrices only.
    pub fn symmetrize(&mut self) {
        assert_eq!(self.rows, self.cols);
        let half = S::of(0.5);
        for j in 0..self.cols {
            for i in 0..j {
                let v = (self.get(i, j) + self.get(j, i)) * half;
                self.set(i, j, v);
                self.set(j, i, v);
            }
        }
    }

    pub fn max_asymmetry(&self) -> S {
        assert_eq!(self.rows, self.cols);
        let mut worst = S::zero();
        for j in 0..self.cols {
            for i in 0..j {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn assert_finite(&self) -> Result<()> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Numerical("non-finite matrix entry".into()))
        }
    }
}

#[inline]
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = S::zero();
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

#[inline]
pub fn norm2<S: Scalar>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

#[inline]
pub fn axpy<S: Scalar>(alpha: S, x: &[S], y: &mut [S]) {
    debug_assert_eq!(x.len(), y.len());
    for i in 0..x.len() {
        y[i] += alpha * x[i];
    }
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns (eigenvalues, eigenvectors) with eigenvalues in ascending order
/// and eigenvectors as the corresponding columns. Robust up to a few hundred
/// rows; larger problems go through the Lanczos path.
pub fn jacobi_eigh<S: Scalar>(a: &DenseMatrix<S>) -> Result<(Vec<S>, DenseMatrix<S>)> {
    assert_eq!(a.rows(), a.cols(), "jacobi_eigh needs a square matrix");
    let n = a.rows();
    if n == 0 {
        return Ok((Vec::new(), DenseMatrix::zeros(0, 0)));
    }
    let mut m = a.clone();
    m.symmetrize();
    let mut v = DenseMatrix::identity(n);

    let norm = m.frobenius_norm();
    if norm == S::zero() {
        return Ok((vec![S::zero(); n], v));
    }
    let stop = norm * S::epsilon() * S::of(n as f64);
    let max_sweeps = 64;

    for _sweep in 0..max_sweeps {
        let mut off = S::zero();
        for j in 0..n {
            for i in 0..j {
                let x = m.get(i, j);
                off += x * x;
            }
        }
        if (off + off).sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() <= stop * S::of(1e-3) {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (S::of(2.0) * apq);
                // stable tangent of the rotation angle
                let t = {
                    let s = if theta >= S::zero() {
                        S::one()
                    } else {
                        -S::one()
                    };
                    s / (theta.abs() + (theta * theta + S::one()).sqrt())
                };
                let c = (t * t + S::one()).sqrt().recip();
                let s = t * c;
                // rotate rows/cols p and q of m
                for k in 0..n {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<S> = (0..n).map(|i| m.get(i, i)).collect();
    order.sort_by(|&a, &b| diag[a].partial_cmp(&diag[b]).expect("finite eigenvalue"));
    let vals: Vec<S> = order.iter().map(|&i| diag[i]).collect();
    let vecs = DenseMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok((vals, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_identity() {
        let a = DenseMatrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64);
        let i3 = DenseMatrix::identity(3);
        assert_eq!(a.matmul(&i3), a);
    }

    #[test]
    fn jacobi_diagonal() {
        let a = DenseMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                [5.0, -4.0, 1.0][i]
            } else {
                0.0
            }
        });
        let (vals, _) = jacobi_eigh(&a).unwrap();
        assert_eq!(vals, vec![-4.0, 1.0, 5.0]);
    }

    #[test]
    fn jacobi_two_by_two() {
        // [[0,1],[1,0]] has eigenvalues ±1
        let a = DenseMatrix::from_fn(2, 2, |i, j| if i != j { 1.0 } else { 0.0 });
        let (vals, vecs) = jacobi_eigh(&a).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        // residual check A v = λ v
        for k in 0..2 {
            let v = vecs.col(k);
            let av = [v[1], v[0]];
            for i in 0..2 {
                assert!((av[i] - vals[k] * v[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_zero_matrix() {
        let a = DenseMatrix::<f64>::zeros(4, 4);
        let (vals, vecs) = jacobi_eigh(&a).unwrap();
        assert!(vals.iter().all(|&v| v == 0.0));
        assert_eq!(vecs, DenseMatrix::identity(4));
    }
}
