//! Dense and matrix-free symmetric numerical kernels: orthonormalization,
//! top-r symmetric eigendecomposition and principal angles.

mod dense;
mod lanczos;

pub use dense::{axpy, dot, jacobi_eigh, norm2, DenseMatrix};
pub use lanczos::symmetric_eig_top_r;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A symmetric linear operator exposed only through its matvec.
pub trait SymOp<S: Scalar>: Sync {
    fn dim(&self) -> usize;
    /// y = A x. Callers guarantee x.len() == y.len() == dim().
    fn apply(&self, x: &[S], y: &mut [S]);
}

impl<S: Scalar> SymOp<S> for DenseMatrix<S> {
    fn dim(&self) -> usize {
        debug_assert_eq!(self.rows(), self.cols());
        self.rows()
    }

    fn apply(&self, x: &[S], y: &mut [S]) {
        self.matvec(x, y);
    }
}

/// Matrix with orthonormal columns, together with the worst deviation of
/// its gram matrix from the identity observed at construction time.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis<S> {
    mat: DenseMatrix<S>,
    max_dev: S,
}

impl<S: Scalar> OrthonormalBasis<S> {
    /// Validates ‖UᵀU − I‖_max and wraps the matrix.
    pub fn new(mat: DenseMatrix<S>) -> Result<Self> {
        let max_dev = gram_deviation(&mat);
        if max_dev > S::ORTH_TOL {
            return Err(Error::Numerical(format!(
                "columns not orthonormal: deviation {:e} exceeds {:e}",
                max_dev.to_f64_lossy(),
                S::ORTH_TOL.to_f64_lossy()
            )));
        }
        Ok(Self { mat, max_dev })
    }

    pub fn empty(rows: usize) -> Self {
        Self {
            mat: DenseMatrix::zeros(rows, 0),
            max_dev: S::zero(),
        }
    }

    pub fn rows(&self) -> usize {
        self.mat.rows()
    }

    pub fn cols(&self) -> usize {
        self.mat.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.mat.cols() == 0
    }

    pub fn matrix(&self) -> &DenseMatrix<S> {
        &self.mat
    }

    pub fn into_matrix(self) -> DenseMatrix<S> {
        self.mat
    }

    /// Worst |(UᵀU − I)_{ ij }| measured when the basis was built.
    pub fn tolerance(&self) -> S {
        self.max_dev
    }
}

fn gram_deviation<S: Scalar>(m: &DenseMatrix<S>) -> S {
    let k = m.cols();
    let mut worst = S::zero();
    for j in 0..k {
        for i in 0..=j {
            let g = dot(m.col(i), m.col(j));
            let target = if i == j { S::one() } else { S::zero() };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

/// Orthonormal basis for the range of `y` by modified Gram-Schmidt with a
/// second reorthogonalization pass. Columns that become numerically zero
/// (rank deficiency) are dropped, so the result may have fewer columns than
/// the input; an all-zero input yields an empty basis.
pub fn orthonormalize<S: Scalar>(y: &DenseMatrix<S>) -> Result<OrthonormalBasis<S>> {
    let rows = y.rows();
    let mut kept: Vec<Vec<S>> = Vec::with_capacity(y.cols());
    let drop_tol = S::epsilon() * S::of(1e3);
    for j in 0..y.cols() {
        let mut v = y.col(j).to_vec();
        let orig = norm2(&v);
        if !orig.is_finite() {
            return Err(Error::Numerical("non-finite column".into()));
        }
        if orig == S::zero() {
            continue;
        }
        for _ in 0..2 {
            for q in &kept {
                let d = dot(q, &v);
                axpy(-d, q, &mut v);
            }
        }
        let nrm = norm2(&v);
        if nrm <= drop_tol * orig {
            continue;
        }
        let inv = nrm.recip();
        for x in &mut v {
            *x *= inv;
        }
        kept.push(v);
    }
    OrthonormalBasis::new(DenseMatrix::from_columns(rows, &kept))
}

/// Cosines of the principal angles between the two column spaces: the
/// singular values of U₁ᵀU₂, clamped to [0, 1] and sorted descending.
pub fn principal_angle_cosines<S: Scalar>(
    u1: &OrthonormalBasis<S>,
    u2: &OrthonormalBasis<S>,
) -> Result<Vec<S>> {
    if u1.rows() != u2.rows() {
        return Err(Error::Dimension {
            expected: u1.rows(),
            got: u2.rows(),
        });
    }
    if u1.is_empty() || u2.is_empty() {
        return Ok(Vec::new());
    }
    // Singular values of M via the eigenvalues of the smaller gram matrix.
    let m = u1.matrix().transpose_matmul(u2.matrix());
    let g = if m.rows() <= m.cols() {
        let mt = m.transpose();
        m.matmul(&mt)
    } else {
        m.transpose_matmul(&m)
    };
    let (vals, _) = jacobi_eigh(&g)?;
    let mut cos: Vec<S> = vals
        .into_iter()
        .map(|v| v.max(S::zero()).sqrt().min(S::one()))
        .collect();
    cos.sort_by(|a, b| b.partial_cmp(a).expect("finite cosine"));
    Ok(cos)
}

/// Orders eigenpair indices by descending magnitude; exact-magnitude ties
/// prefer the positive eigenvalue, then the lower index.
pub(crate) fn magnitude_order<S: Scalar>(vals: &[S]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| {
        vals[b]
            .abs()
            .partial_cmp(&vals[a].abs())
            .expect("finite eigenvalue")
            .then_with(|| {
                // positive first on |λ| ties
                let sa = vals[a] >= S::zero();
                let sb = vals[b] >= S::zero();
                sb.cmp(&sa).then(a.cmp(&b))
            })
    });
    idx
}

/// Flips each column so its largest-magnitude entry is positive; the first
/// occurrence wins on exact ties. Keeps serialized models reproducible.
pub(crate) fn fix_column_signs<S: Scalar>(m: &mut DenseMatrix<S>) {
    for j in 0..m.cols() {
        let col = m.col_mut(j);
        let mut best = 0usize;
        let mut best_abs = S::zero();
        for (i, &v) in col.iter().enumerate() {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best = i;
            }
        }
        if col[best] < S::zero() {
            for v in col.iter_mut() {
                *v = -*v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormalize_identity_passthrough() {
        let q = orthonormalize(&DenseMatrix::<f64>::identity(3)).unwrap();
        assert_eq!(q.cols(), 3);
        assert!(q.matrix().max_abs_diff(&DenseMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn orthonormalize_drops_dependent_column() {
        // [e1, 2 e1] has rank 1
        let mut y = DenseMatrix::<f64>::zeros(3, 2);
        y.set(0, 0, 1.0);
        y.set(0, 1, 2.0);
        let q = orthonormalize(&y).unwrap();
        assert_eq!(q.cols(), 1);
        assert!((q.matrix().get(0, 0).abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthonormalize_zero_input_is_empty() {
        let q = orthonormalize(&DenseMatrix::<f64>::zeros(4, 3)).unwrap();
        assert!(q.is_empty());
        assert_eq!(q.rows(), 4);
    }

    #[test]
    fn principal_angles_identical_and_orthogonal() {
        let e1 = {
            let mut m = DenseMatrix::<f64>::zeros(3, 1);
            m.set(0, 0, 1.0);
            OrthonormalBasis::new(m).unwrap()
        };
        let e2 = {
            let mut m = DenseMatrix::<f64>::zeros(3, 1);
            m.set(1, 0, 1.0);
            OrthonormalBasis::new(m).unwrap()
        };
        let same = principal_angle_cosines(&e1, &e1).unwrap();
        assert!((same[0] - 1.0).abs() < 1e-12);
        let orth = principal_angle_cosines(&e1, &e2).unwrap();
        assert!(orth[0].abs() < 1e-12);
    }

    #[test]
    fn principal_angle_forty_five_degrees() {
        let e1 = {
            let mut m = DenseMatrix::<f64>::zeros(2, 1);
            m.set(0, 0, 1.0);
            OrthonormalBasis::new(m).unwrap()
        };
        let diag = {
            let mut m = DenseMatrix::<f64>::zeros(2, 1);
            let v = 0.5f64.sqrt();
            m.set(0, 0, v);
            m.set(1, 0, v);
            OrthonormalBasis::new(m).unwrap()
        };
        let cos = principal_angle_cosines(&e1, &diag).unwrap();
        assert!((cos[0] - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn principal_angle_dimension_mismatch() {
        let a = OrthonormalBasis::<f64>::empty(3);
        let b = OrthonormalBasis::<f64>::empty(4);
        assert!(principal_angle_cosines(&a, &b).is_err());
    }
}
