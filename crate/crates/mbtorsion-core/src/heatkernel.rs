//! Spectral heat kernels on the active cells and their diagnostics.
//!
//! Given a complete eigendecomposition, the kernel is the finite sum
//!
//! `pi(x, y; t) = sum_k exp(-lambda_k t) psi_k(x) psi_k(y)`
//!
//! with discrete-`L^2`-normalized modes, so all continuum kernel identities
//! hold verbatim in the discrete inner product: mass conservation for the
//! reflecting kernel, Cauchy-Schwarz, spectral decay for the absorbing
//! kernel, and the long-time equilibration
//!
//! `sup_{x,y} |pi(x, y; t) - 1/|D|| <= c1 exp(-c2 t)`
//!
//! whose constants this module extracts from exact kernel evaluations. The
//! equilibrium level is `1 / (discrete measure)` — the reciprocal of
//! `n h^m`, not of the analytic domain measure — because the kernel
//! equilibrates to the constant mode of the *grid*, and on curved domains
//! these measures differ at order `h`. Using the analytic measure would put
//! a spurious floor under the deficit and wreck every decay fit.
//!
//! Modes with `lambda_k t` beyond the underflow threshold contribute exact
//! zeros to every sum, so truncating them changes nothing; this keeps the
//! all-pairs deficit scan affordable at long times, where only a handful of
//! modes survive.

use crate::error::{Error, Result};
use crate::linalg::fit::fit_line;
use crate::scalar::Real;
use crate::solvers::EigenDecomposition;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Equilibration constants of a reflecting kernel: the deficit is bounded by
/// `c1 exp(-c2 t)` for `t >= t1`.
#[derive(Clone, Copy, Debug)]
pub struct PhpConstants<T> {
    /// Onset time: smallest fitted grid time with residual under 5%.
    pub t1: T,
    pub c1: T,
    pub c2: T,
    /// Number of grid points retained by the fit.
    pub points_used: usize,
}

/// A heat kernel backed by a complete eigendecomposition.
#[derive(Clone, Debug)]
pub struct HeatKernel<T> {
    pub decomp: EigenDecomposition<T>,
}

impl<T: Real> HeatKernel<T> {
    /// Wraps a decomposition; it must be complete (every mode present),
    /// otherwise kernel sums would silently violate the exact identities
    /// (mass conservation, completeness at `t = 0`) they are tested against.
    pub fn new(decomp: EigenDecomposition<T>) -> Result<Self> {
        if !decomp.complete {
            return Err(Error::InvalidParameter(
                "heat kernels need the complete mode basis, not a truncation".into(),
            ));
        }
        Ok(Self { decomp })
    }

    pub fn n(&self) -> usize {
        self.decomp.n
    }

    pub fn has_dirichlet(&self) -> bool {
        self.decomp.has_dirichlet
    }

    /// The constant the reflecting kernel equilibrates to: one over the
    /// discrete measure of the active set.
    pub fn equilibrium_level(&self) -> T {
        T::one() / self.decomp.active_measure()
    }

    /// Number of leading modes indistinguishable from zero at the spectral
    /// scale; equals the number of connected components for a reflecting
    /// operator.
    pub fn zero_modes(&self) -> usize {
        let scale_top = self
            .decomp
            .eigenvalues
            .last()
            .map(|l| l.abs())
            .unwrap_or(T::one());
        let floor = scale_top * T::of(1e-9);
        self.decomp
            .eigenvalues
            .iter()
            .take_while(|l| l.abs() <= floor)
            .count()
    }

    /// The decay rate that controls long-time behavior: the first nonzero
    /// eigenvalue for a reflecting kernel, the lowest eigenvalue for an
    /// absorbing one.
    pub fn spectral_gap(&self) -> T {
        if self.decomp.has_dirichlet {
            self.decomp.eigenvalues[0]
        } else {
            let z = self.zero_modes().max(1);
            self.decomp.eigenvalues[z.min(self.decomp.eigenvalues.len() - 1)]
        }
    }

    /// Per-mode weights `exp(-lambda_k t)`, with exact-zero truncation.
    fn mode_weights(&self, t: T) -> Vec<T> {
        self.decomp
            .eigenvalues
            .iter()
            .map(|l| (-*l * t).exp())
            .collect()
    }

    /// Kernel value between active cells `i` and `j` at time `t >= 0`.
    pub fn kernel(&self, i: usize, j: usize, t: T) -> T {
        let n = self.n();
        let mut acc = T::zero();
        for (k, w) in self.mode_weights(t).into_iter().enumerate() {
            if w == T::zero() {
                continue;
            }
            acc += w * self.decomp.vectors[k * n + i] * self.decomp.vectors[k * n + j];
        }
        acc
    }

    /// `sum_k exp(-lambda_k t)` — the discrete partition function.
    pub fn trace(&self, t: T) -> T {
        self.decomp
            .eigenvalues
            .iter()
            .map(|l| (-*l * t).exp())
            .sum()
    }

    /// Integrated kernel mass from cell `i`: `h^m sum_j pi(i, j; t)`.
    /// Exactly 1 for a reflecting kernel, at most 1 for an absorbing one.
    pub fn row_mass(&self, i: usize, t: T) -> T {
        let n = self.n();
        let w = self.decomp.cell_weight;
        let mut acc = T::zero();
        for (k, wk) in self.mode_weights(t).into_iter().enumerate() {
            if wk == T::zero() {
                continue;
            }
            let mode = &self.decomp.vectors[k * n..(k + 1) * n];
            let s: T = mode.iter().copied().sum::<T>() * w;
            acc += wk * mode[i] * s;
        }
        acc
    }

    /// Largest deviation of the integrated mass from 1 over all cells.
    /// Reflecting kernels only — absorbing kernels lose mass by design.
    pub fn mass_deviation_max(&self, t: T) -> Result<T> {
        if self.decomp.has_dirichlet {
            return Err(Error::NeumannKernelRequired(
                "mass conservation (the absorbing kernel is substochastic)",
            ));
        }
        Ok(self.row_mass_extremes(t).1)
    }

    /// Largest integrated mass over all cells; for an absorbing kernel this
    /// checks substochasticity (must not exceed 1 beyond roundoff).
    pub fn integrated_mass_max(&self, t: T) -> T {
        self.row_mass_extremes(t).0
    }

    fn row_mass_extremes(&self, t: T) -> (T, T) {
        let n = self.n();
        let w = self.decomp.cell_weight;
        // masses for all rows at once: sum_k wk s_k psi_k(i)
        let mut mass = vec![T::zero(); n];
        for (k, wk) in self.mode_weights(t).into_iter().enumerate() {
            if wk == T::zero() {
                continue;
            }
            let mode = &self.decomp.vectors[k * n..(k + 1) * n];
            let s: T = mode.iter().copied().sum::<T>() * w;
            let c = wk * s;
            if c != T::zero() {
                for i in 0..n {
                    mass[i] += c * mode[i];
                }
            }
        }
        let mut max_mass = T::neg_infinity();
        let mut max_dev = T::zero();
        for m in &mass {
            max_mass = max_mass.max(*m);
            max_dev = max_dev.max((*m - T::one()).abs());
        }
        (max_mass, max_dev)
    }

    /// Equilibration deficit `sup_{x,y} |pi(x, y; t) - 1/|D||` over every
    /// cell pair. Reflecting kernels only.
    pub fn php_deficit(&self, t: T) -> Result<T> {
        if self.decomp.has_dirichlet {
            return Err(Error::NeumannKernelRequired(
                "equilibration deficit (the absorbing kernel tends to zero, not to 1/|D|)",
            ));
        }
        let n = self.n();
        let level = self.equilibrium_level();
        // retained modes, scaled by sqrt of the time weight so the kernel is
        // a plain Gram product of the rows below
        let mut scaled: Vec<T> = Vec::new();
        let mut retained = 0usize;
        for (k, w) in self.mode_weights(t).into_iter().enumerate() {
            if w == T::zero() {
                continue;
            }
            let sw = w.sqrt();
            let mode = &self.decomp.vectors[k * n..(k + 1) * n];
            scaled.extend(mode.iter().map(|v| *v * sw));
            retained += 1;
        }
        let mut sup = T::zero();
        let mut row = vec![T::zero(); n];
        for i in 0..n {
            for v in row[i..].iter_mut() {
                *v = T::zero();
            }
            for k in 0..retained {
                let a = scaled[k * n + i];
                if a != T::zero() {
                    let mode_tail = &scaled[k * n + i..(k + 1) * n];
                    for (v, m) in row[i..].iter_mut().zip(mode_tail) {
                        *v += a * *m;
                    }
                }
            }
            for v in &row[i..] {
                sup = sup.max((*v - level).abs());
            }
        }
        Ok(sup)
    }

    /// Fits `deficit(t) ~ c1 exp(-c2 t)` over an ascending time grid that
    /// must span `[1/mu, 10/mu]` (`mu` = spectral gap). Leading grid points
    /// are dropped one at a time until every retained point sits within 5%
    /// of the fitted exponential; `t1` is the first retained time. Errors on
    /// absorbing kernels and on disconnected domains (their deficit never
    /// decays — it stalls at the component-imbalance level).
    pub fn fit_php_constants(&self, ts: &[T]) -> Result<PhpConstants<T>> {
        if self.decomp.has_dirichlet {
            return Err(Error::NeumannKernelRequired("equilibration fit"));
        }
        let zeros = self.zero_modes();
        if zeros >= 2 {
            return Err(Error::DisconnectedDomain {
                zero_cluster: zeros,
            });
        }
        if ts.len() < 4 || ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "need an ascending time grid with at least 4 points".into(),
            ));
        }
        let mu = self.spectral_gap();
        let lo = ts[0] * mu;
        let hi = ts[ts.len() - 1] * mu;
        if lo > T::of(1.0 + 1e-6) || hi < T::of(10.0 - 1e-6) {
            return Err(Error::InvalidParameter(format!(
                "time grid must span [1/mu, 10/mu]; got [{:.3e}, {:.3e}] in gap units",
                lo.to_f64(),
                hi.to_f64()
            )));
        }
        let mut xs: Vec<T> = ts.to_vec();
        let mut ys: Vec<T> = Vec::with_capacity(ts.len());
        for t in ts {
            ys.push(self.php_deficit(*t)?.ln());
        }
        // 5% pointwise tolerance in deficit space = ln(1.05) in log space
        let log_tol = T::of(1.05).ln();
        let mut points_used;
        loop {
            points_used = xs.len();
            if points_used < 3 {
                return Err(Error::TooFewRows {
                    needed: 3,
                    got: points_used,
                });
            }
            let fit = fit_line(&xs, &ys);
            if fit.max_abs_residual <= log_tol {
                return Ok(PhpConstants {
                    t1: xs[0],
                    c1: fit.intercept.exp(),
                    c2: -fit.slope,
                    points_used,
                });
            }
            // early times feel the higher modes; drop the leading point
            xs.remove(0);
            ys.remove(0);
        }
    }

    /// Two-sided trace bracket for a reflecting kernel at a time past the
    /// equilibration onset:
    /// `1 + exp(-mu t) <= trace(t) <= 1 + c1 |D| exp(-c2 t)`.
    /// Returns `(lower, trace, upper)`.
    pub fn trace_bracket(&self, php: &PhpConstants<T>, t: T) -> Result<(T, T, T)> {
        if self.decomp.has_dirichlet {
            return Err(Error::NeumannKernelRequired("trace bracket"));
        }
        if t < php.t1 {
            return Err(Error::TimeBelowOnset {
                t: t.to_f64(),
                t1: php.t1.to_f64(),
            });
        }
        let mu = self.spectral_gap();
        let lower = T::one() + (-mu * t).exp();
        let upper = T::one() + php.c1 * self.decomp.active_measure() * (-php.c2 * t).exp();
        Ok((lower, self.trace(t), upper))
    }

    /// Worst normalized Cauchy-Schwarz slack
    /// `(pi(x,y)^2 - pi(x,x) pi(y,y)) / max(1, pi(x,x) pi(y,y))` over
    /// `pairs` deterministically sampled cell pairs. Nonpositive up to
    /// roundoff for any kernel.
    pub fn cauchy_schwarz_slack(&self, pairs: usize, t: T, seed: u64) -> T {
        let n = self.n();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = T::neg_infinity();
        for _ in 0..pairs {
            let i = (rng.next_u64() % n as u64) as usize;
            let j = (rng.next_u64() % n as u64) as usize;
            let pij = self.kernel(i, j, t);
            let pii = self.kernel(i, i, t);
            let pjj = self.kernel(j, j, t);
            let prod = pii * pjj;
            let slack = (pij * pij - prod) / T::one().max(prod.abs());
            worst = worst.max(slack);
        }
        worst
    }

    /// Absorbing-kernel decay comparison at a diagonal point: returns
    /// `(pi(i,i; t+delta), exp(-lambda_0 delta) * pi(i,i; t))`; the first
    /// never exceeds the second (every mode decays at least at the ground
    /// rate). Errors on reflecting kernels, whose ground rate is zero and
    /// the comparison says nothing.
    pub fn decay_comparison(&self, i: usize, t: T, delta: T) -> Result<(T, T)> {
        if !self.decomp.has_dirichlet {
            return Err(Error::MixedKernelRequired("spectral decay comparison"));
        }
        if !(delta > T::zero()) {
            return Err(Error::InvalidParameter("need delta > 0".into()));
        }
        let lhs = self.kernel(i, i, t + delta);
        let rhs = (-self.decomp.eigenvalues[0] * delta).exp() * self.kernel(i, i, t);
        Ok((lhs, rhs))
    }
}

/// Uniformly spaced time grid over `[lo, hi]` with `n >= 2` points.
pub fn time_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    assert!(n >= 2 && hi > lo);
    let step = (hi - lo) / T::of_usize(n - 1);
    (0..n).map(|i| lo + T::of_usize(i) * step).collect()
}
