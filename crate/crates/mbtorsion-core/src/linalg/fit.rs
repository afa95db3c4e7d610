//! Ordinary least-squares line fit `y ~ intercept + slope * x`, the
//! workhorse behind every rate/constant extraction in the experiment layer
//! (decay exponents, kernel equilibration constants, scaling-limit fits).

use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Largest absolute residual `|y_i - fit(x_i)|` over the data.
    pub max_abs_residual: T,
}

/// Fits a line through `(xs, ys)` by least squares. Requires at least two
/// points with distinct abscissae.
pub fn fit_line<T: Real>(xs: &[T], ys: &[T]) -> LineFit<T> {
    let n = xs.len();
    assert_eq!(n, ys.len());
    assert!(n >= 2, "a line fit needs at least two points");
    let nf = T::of_usize(n);
    let mean_x = xs.iter().copied().sum::<T>() / nf;
    let mean_y = ys.iter().copied().sum::<T>() / nf;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for i in 0..n {
        let dx = xs[i] - mean_x;
        sxx += dx * dx;
        sxy += dx * (ys[i] - mean_y);
    }
    assert!(sxx > T::zero(), "abscissae must not be all identical");
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut max_abs_residual = T::zero();
    for i in 0..n {
        let r = (ys[i] - (intercept + slope * xs[i])).abs();
        max_abs_residual = max_abs_residual.max(r);
    }
    LineFit {
        slope,
        intercept,
        max_abs_residual,
    }
}
