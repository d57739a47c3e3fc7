//! Top-r symmetric eigenpairs, largest in magnitude.
//!
//! Small operators (dim ≤ 512) are materialized and handed to the dense
//! Jacobi solver. Larger ones go through Lanczos with full
//! reorthogonalization and thick restarts: the projected matrix is
//! rebuilt from the actual orthogonalization coefficients every step, so
//! the Rayleigh-Ritz extraction stays honest even after restarts, and
//! every returned pair is verified against an explicit residual
//! ‖A v − λ v‖ ≤ tol · max(1, |λ|).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{axpy, dot, jacobi_eigh, norm2, DenseMatrix};
use super::{fix_column_signs, magnitude_order, OrthonormalBasis, SymOp};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const DENSE_LIMIT: usize = 512;
const SEED: u64 = 0x6d73_6c70; // fixed seed keeps results reproducible

/// Computes the r eigenpairs of largest magnitude of a symmetric operator.
///
/// Eigenvalues come back sorted by descending |λ|, positive first on exact
/// ties; eigenvector signs are fixed so the largest-magnitude component is
/// positive.
pub fn symmetric_eig_top_r<S: Scalar>(
    op: &dyn SymOp<S>,
    r: usize,
) -> Result<(OrthonormalBasis<S>, Vec<S>)> {
    let m = op.dim();
    if r == 0 || r > m {
        return Err(Error::Config(format!(
            "rank {r} out of range for operator of size {m}"
        )));
    }
    if m <= DENSE_LIMIT {
        dense_top_r(op, r)
    } else {
        lanczos_top_r(op, r)
    }
}

fn dense_top_r<S: Scalar>(op: &dyn SymOp<S>, r: usize) -> Result<(OrthonormalBasis<S>, Vec<S>)> {
    let m = op.dim();
    let mut a = DenseMatrix::zeros(m, m);
    let mut e = vec![S::zero(); m];
    for j in 0..m {
        e[j] = S::one();
        let (head, col) = split_col(&mut a, j);
        let _ = head;
        op.apply(&e, col);
        e[j] = S::zero();
    }
    a.symmetrize();
    let (vals, vecs) = jacobi_eigh(&a)?;
    let order = magnitude_order(&vals);
    let top: Vec<usize> = order.into_iter().take(r).collect();
    let lambda: Vec<S> = top.iter().map(|&i| vals[i]).collect();
    let mut u = DenseMatrix::from_fn(m, r, |i, j| vecs.get(i, top[j]));
    fix_column_signs(&mut u);
    verify_residuals(op, &u, &lambda)?;
    Ok((OrthonormalBasis::new(u)?, lambda))
}

fn split_col<'a, S: Scalar>(a: &'a mut DenseMatrix<S>, j: usize) -> ((), &'a mut [S]) {
    ((), a.col_mut(j))
}

struct LanczosState<S> {
    /// Orthonormal basis vectors built so far.
    q: Vec<Vec<S>>,
    /// Projected operator QᵀAQ over the current basis, kmax+1 square.
    h: DenseMatrix<S>,
}

fn lanczos_top_r<S: Scalar>(op: &dyn SymOp<S>, r: usize) -> Result<(OrthonormalBasis<S>, Vec<S>)> {
    let m = op.dim();
    let kmax = m.min((4 * r).max(r + 20));
    let budget = 50 * r;
    let mut matvecs = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let mut st = LanczosState {
        q: Vec::with_capacity(kmax + 1),
        h: DenseMatrix::zeros(kmax + 1, kmax + 1),
    };
    st.q.push(random_unit(m, &mut rng));
    let mut worst_residual = S::infinity();

    loop {
        // Extend the basis one Lanczos step at a time.
        while st.q.len() <= kmax && matvecs < budget {
            let j = st.q.len() - 1;
            let mut w = vec![S::zero(); m];
            op.apply(&st.q[j], &mut w);
            matvecs += 1;
            let scale = norm2(&w);
            // First orthogonalization pass supplies the projection
            // coefficients; the second pass only polishes.
            for i in 0..=j {
                let c = dot(&st.q[i], &w);
                axpy(-c, &st.q[i], &mut w);
                st.h.set(i, j, c);
                st.h.set(j, i, c);
            }
            for i in 0..=j {
                let c = dot(&st.q[i], &w);
                axpy(-c, &st.q[i], &mut w);
            }
            let beta = norm2(&w);
            if beta <= S::epsilon() * S::of(100.0) * scale.max(S::one()) {
                // Invariant subspace. Either extract now or inject a fresh
                // random direction to keep growing toward r vectors.
                if st.q.len() >= r {
                    break;
                }
                match fresh_direction(m, &st.q, &mut rng) {
                    Some(v) => {
                        st.h.set(st.q.len(), j, S::zero());
                        st.h.set(j, st.q.len(), S::zero());
                        st.q.push(v);
                        continue;
                    }
                    None => break, // basis spans the whole space
                }
            }
            let inv = beta.recip();
            let next: Vec<S> = w.iter().map(|&x| x * inv).collect();
            st.h.set(st.q.len(), j, beta);
            st.h.set(j, st.q.len(), beta);
            st.q.push(next);
        }

        // Rayleigh-Ritz over the filled part of the basis (excluding the
        // trailing unprocessed vector when the basis is full).
        let k = if st.q.len() > kmax { kmax } else { st.q.len() };
        let hk = DenseMatrix::from_fn(k, k, |i, j| st.h.get(i, j));
        let (vals, y) = jacobi_eigh(&hk)?;
        let order = magnitude_order(&vals);
        let rr = r.min(k);
        let top: Vec<usize> = order.iter().copied().take(rr).collect();

        let beta_last = if st.q.len() > k {
            st.h.get(k, k - 1)
        } else {
            S::zero()
        };
        let estimates_ok = top.iter().all(|&i| {
            let est = (beta_last * y.get(k - 1, i)).abs();
            est <= S::EIG_TOL * vals[i].abs().max(S::one())
        });

        if estimates_ok || matvecs >= budget {
            let lambda: Vec<S> = top.iter().map(|&i| vals[i]).collect();
            let mut u = DenseMatrix::zeros(m, rr);
            for (c, &i) in top.iter().enumerate() {
                let col = u.col_mut(c);
                for (qi, q) in st.q.iter().take(k).enumerate() {
                    axpy(y.get(qi, i), q, col);
                }
            }
            matvecs += rr;
            match verify_residuals(op, &u, &lambda) {
                Ok(worst) => {
                    if rr < r && st.q.len() < m {
                        // breakdown left us short of r vectors; should not
                        // happen because fresh directions are injected, but
                        // guard anyway
                        return Err(Error::EigNonConvergence {
                            iterations: matvecs,
                            residual: worst.to_f64_lossy(),
                            cluster: None,
                        });
                    }
                    fix_column_signs(&mut u);
                    return Ok((OrthonormalBasis::new(u)?, lambda));
                }
                Err(worst) => {
                    worst_residual = worst;
                    if matvecs >= budget {
                        return Err(Error::EigNonConvergence {
                            iterations: matvecs,
                            residual: worst_residual.to_f64_lossy(),
                            cluster: None,
                        });
                    }
                }
            }
        }

        if matvecs >= budget {
            return Err(Error::EigNonConvergence {
                iterations: matvecs,
                residual: worst_residual.to_f64_lossy(),
                cluster: None,
            });
        }

        // Thick restart: carry the best Ritz vectors plus the dangling
        // Lanczos vector; the next step's orthogonalization coefficients
        // rebuild the couplings in H.
        let keep = (rr + rr.min(20)).min(k.saturating_sub(1)).max(1);
        let kept: Vec<usize> = order.iter().copied().take(keep).collect();
        let mut new_q: Vec<Vec<S>> = Vec::with_capacity(kmax + 1);
        for &i in &kept {
            let mut v = vec![S::zero(); m];
            for (qi, q) in st.q.iter().take(k).enumerate() {
                axpy(y.get(qi, i), q, &mut v);
            }
            let nrm = norm2(&v);
            let inv = nrm.recip();
            for x in &mut v {
                *x *= inv;
            }
            new_q.push(v);
        }
        let dangling = if st.q.len() > k {
            st.q.pop().expect("dangling vector")
        } else {
            match fresh_direction(m, &new_q, &mut rng) {
                Some(v) => v,
                None => {
                    return Err(Error::EigNonConvergence {
                        iterations: matvecs,
                        residual: worst_residual.to_f64_lossy(),
                        cluster: None,
                    })
                }
            }
        };
        let mut h = DenseMatrix::zeros(kmax + 1, kmax + 1);
        for (c, &i) in kept.iter().enumerate() {
            h.set(c, c, vals[i]);
            let s = beta_last * y.get(k - 1, i);
            h.set(c, keep, s);
            h.set(keep, c, s);
        }
        new_q.push(dangling);
        st = LanczosState { q: new_q, h };
    }
}

/// Checks every pair explicitly; returns the worst residual either way.
fn verify_residuals<S: Scalar>(
    op: &dyn SymOp<S>,
    u: &DenseMatrix<S>,
    lambda: &[S],
) -> std::result::Result<S, S> {
    let m = u.rows();
    let mut w = vec![S::zero(); m];
    let mut worst = S::zero();
    for (j, &l) in lambda.iter().enumerate() {
        op.apply(u.col(j), &mut w);
        axpy(-l, u.col(j), &mut w);
        worst = worst.max(norm2(&w));
    }
    let bound = lambda
        .iter()
        .fold(S::one(), |acc, &l| acc.max(l.abs()))
        * S::EIG_TOL;
    if worst <= bound {
        Ok(worst)
    } else {
        Err(worst)
    }
}

fn random_unit<S: Scalar>(m: usize, rng: &mut ChaCha8Rng) -> Vec<S> {
    let mut v: Vec<S> = (0..m).map(|_| S::of(rng.gen::<f64>() - 0.5)).collect();
    let inv = norm2(&v).recip();
    for x in &mut v {
        *x *= inv;
    }
    v
}

/// Random direction orthogonal to the given set, or None if the set
/// already spans the space.
fn fresh_direction<S: Scalar>(
    m: usize,
    basis: &[Vec<S>],
    rng: &mut ChaCha8Rng,
) -> Option<Vec<S>> {
    if basis.len() >= m {
        return None;
    }
    for _ in 0..8 {
        let mut v = random_unit(m, rng);
        for _ in 0..2 {
            for q in basis {
                let c = dot(q, &v);
                axpy(-c, q, &mut v);
            }
        }
        let nrm = norm2(&v);
        if nrm > S::of(1e-6) {
            let inv = nrm.recip();
            for x in &mut v {
                *x *= inv;
            }
            return Some(v);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_op(d: &[f64]) -> DenseMatrix<f64> {
        DenseMatrix::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    #[test]
    fn k2_prefers_positive_on_tie() {
        // path of one edge: eigenvalues ±1, tie broken toward +1
        let a = DenseMatrix::from_fn(2, 2, |i, j| if i != j { 1.0 } else { 0.0 });
        let (v, l) = symmetric_eig_top_r(&a, 1).unwrap();
        assert!((l[0] - 1.0).abs() < 1e-10);
        let c = v.matrix().col(0);
        let e = 0.5f64.sqrt();
        assert!((c[0] - e).abs() < 1e-10 && (c[1] - e).abs() < 1e-10);
    }

    #[test]
    fn k3_top_eigenpair() {
        let a = DenseMatrix::from_fn(3, 3, |i, j| if i != j { 1.0 } else { 0.0 });
        let (v, l) = symmetric_eig_top_r(&a, 1).unwrap();
        assert!((l[0] - 2.0).abs() < 1e-10);
        let c = v.matrix().col(0);
        let e = (1.0f64 / 3.0).sqrt();
        for i in 0..3 {
            assert!((c[i] - e).abs() < 1e-9);
        }
    }

    #[test]
    fn magnitude_ordering_on_diagonal() {
        let a = diag_op(&[5.0, -4.0, 1.0]);
        let (_, l) = symmetric_eig_top_r(&a, 2).unwrap();
        assert_eq!(l, vec![5.0, -4.0]);
    }

    #[test]
    fn rejects_bad_rank() {
        let a = diag_op(&[1.0, 2.0]);
        assert!(symmetric_eig_top_r(&a, 0).is_err());
        assert!(symmetric_eig_top_r(&a, 3).is_err());
    }

    #[test]
    fn zero_operator_yields_zero_eigenvalues() {
        let a = DenseMatrix::<f64>::zeros(5, 5);
        let (v, l) = symmetric_eig_top_r(&a, 2).unwrap();
        assert_eq!(l, vec![0.0, 0.0]);
        assert_eq!(v.cols(), 2);
    }

    /// Matrix-free operator larger than the dense cutoff: a fixed diagonal.
    struct BigDiag;
    impl SymOp<f64> for BigDiag {
        fn dim(&self) -> usize {
            600
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..600 {
                // spread of eigenvalues with an isolated top pair
                let d = match i {
                    0 => 100.0,
                    1 => -80.0,
                    _ => (i as f64) * 0.1,
                };
                y[i] = d * x[i];
            }
        }
    }

    #[test]
    fn lanczos_path_matches_known_spectrum() {
        let (v, l) = symmetric_eig_top_r(&BigDiag, 3).unwrap();
        assert!((l[0] - 100.0).abs() < 1e-6);
        assert!((l[1] + 80.0).abs() < 1e-6);
        assert!((l[2] - 59.9).abs() < 1e-6);
        assert_eq!(v.cols(), 3);
        assert!(v.tolerance() <= f64::ORTH_TOL);
    }
}
