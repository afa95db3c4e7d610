//! Preconditioned conjugate gradients for symmetric positive (semi)definite
//! systems given as a black-box `y = A x` callback.

use super::{axpy, dot, norm2};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct CgResult<T> {
    pub iterations: usize,
    /// `||b - A x|| / ||b||` at exit (recurrence residual).
    pub rel_residual: T,
    pub converged: bool,
}

/// Solves `A x = b` starting from the provided `x`. Convergence is declared
/// when the residual drops below `tol * ||b||`. `precond_diag`, when given,
/// enables Jacobi preconditioning with those diagonal entries.
pub fn conjugate_gradient<T: Real>(
    mut apply: impl FnMut(&[T], &mut [T]),
    b: &[T],
    x: &mut [T],
    precond_diag: Option<&[T]>,
    tol: T,
    max_iter: usize,
) -> CgResult<T> {
    let n = b.len();
    assert_eq!(x.len(), n);
    let b_norm = norm2(b);
    if b_norm == T::zero() {
        x.fill(T::zero());
        return CgResult {
            iterations: 0,
            rel_residual: T::zero(),
            converged: true,
        };
    }
    let threshold = tol * b_norm;

    let mut r = vec![T::zero(); n];
    let mut q = vec![T::zero(); n];
    apply(x, &mut q);
    for i in 0..n {
        r[i] = b[i] - q[i];
    }
    let apply_precond = |r: &[T], z: &mut [T]| match precond_diag {
        Some(d) => {
            for i in 0..r.len() {
                z[i] = r[i] / d[i];
            }
        }
        None => z.copy_from_slice(r),
    };
    let mut z = vec![T::zero(); n];
    apply_precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut res = norm2(&r);

    let mut iterations = 0;
    while res > threshold && iterations < max_iter {
        apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > T::zero()) {
            // loss of positive definiteness (or exact convergence in p)
            break;
        }
        let alpha = rz / pq;
        axpy(alpha, &p, x);
        axpy(-alpha, &q, &mut r);
        res = norm2(&r);
        iterations += 1;
        if res <= threshold {
            break;
        }
        apply_precond(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }

    CgResult {
        iterations,
        rel_residual: res / b_norm,
        converged: res <= threshold,
    }
}
