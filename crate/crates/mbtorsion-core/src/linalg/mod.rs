//! Small dense/sparse linear-algebra kernels used by the solvers: vector
//! primitives, conjugate gradients, a symmetric tridiagonal factorization,
//! a dense symmetric eigendecomposition and least-squares line fits.

pub mod cg;
pub mod dense_evd;
pub mod fit;
pub mod tridiag;

use crate::scalar::Real;

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}

pub fn scale<T: Real>(alpha: T, x: &mut [T]) {
    for xi in x {
        *xi *= alpha;
    }
}

/// Scales `x` to unit Euclidean norm; returns the previous norm (zero vectors
/// are left untouched).
pub fn normalize<T: Real>(x: &mut [T]) -> T {
    let n = norm2(x);
    if n > T::zero() {
        scale(T::one() / n, x);
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_primitives() {
        let a = [3.0_f64, 4.0];
        assert_eq!(norm2(&a), 5.0);
        let mut y = [1.0, 1.0];
        axpy(2.0, &a, &mut y);
        assert_eq!(y, [7.0, 9.0]);
        let mut v = [0.0, 3.0];
        let old = normalize(&mut v);
        assert_eq!(old, 3.0);
        assert_eq!(v, [0.0, 1.0]);
    }
}
