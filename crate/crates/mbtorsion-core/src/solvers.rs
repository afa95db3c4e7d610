//! Solvers for the torsion equation and the low end of the spectrum.
//!
//! Three compute paths, chosen by problem size and boundary type:
//!
//! - [`solve_torsion`]: conjugate gradients on `A u = 1` (mixed operator
//!   only; the pure reflecting operator annihilates constants, so the
//!   equation has no solution there).
//! - [`smallest_eigenpair`]: inverse power iteration for the lowest mode of
//!   the mixed operator, with warm starts and a Rayleigh-quotient final
//!   estimate. Scales to millions of cells.
//! - [`lowest_eigenpairs`] / [`neumann_spectrum`]: shifted block inverse
//!   iteration with Rayleigh-Ritz extraction for the `k` lowest modes,
//!   degenerate pairs included; works with or without an obstacle.
//! - [`full_spectrum`]: dense eigendecomposition of every mode, gated at
//!   4000 cells; this is what the heat-kernel diagnostics consume, because
//!   kernel identities (mass conservation, trace brackets) need the complete
//!   basis, not a truncation.
//!
//! Eigenvectors are normalized in the discrete `L^2` inner product
//! `<f, g> = h^m sum f_i g_i`, so kernel formulas read like their continuum
//! counterparts; signs are fixed so the vector sums positive whenever the
//! sum is meaningful (ground modes).

use crate::error::{Error, Result};
use crate::linalg::cg::conjugate_gradient;
use crate::linalg::dense_evd::symmetric_eigen;
use crate::linalg::{axpy, dot, norm2, normalize, scale};
use crate::mesh::Mesh;
use crate::operators::SymmetricOperator;
use crate::scalar::Real;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Default relative tolerance on eigenvalue convergence.
pub fn default_eig_tol<T: Real>() -> T {
    T::of(1e-8)
}

/// Default relative tolerance for inner linear solves.
pub fn default_cg_tol<T: Real>() -> T {
    T::of(1e-10)
}

/// Torsion solution on the active cells.
#[derive(Clone, Debug)]
pub struct TorsionSolution<T> {
    pub values: Vec<T>,
    pub sup: T,
    pub min: T,
    pub cg_iterations: usize,
    /// Iteration budget that was in force, `50 * sqrt(condition estimate)`.
    pub iteration_cap: usize,
    pub rel_residual: T,
}

/// One eigenpair of the mixed operator.
#[derive(Clone, Debug)]
pub struct EigenPair<T> {
    pub lambda: T,
    /// Discrete-`L^2`-normalized eigenvector, positive-sum sign.
    pub vector: Vec<T>,
    /// `||A v - lambda v||` on the Euclidean-normalized vector.
    pub residual: T,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
}

/// A set of eigenpairs (all of them for the dense path, the lowest `k` for
/// the iterative path). Mode `k` occupies `vectors[k*n .. (k+1)*n]`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub vectors: Vec<T>,
    pub n: usize,
    /// Cell measure `h^m`; `n * cell_weight` is the discrete domain measure.
    pub cell_weight: T,
    pub has_dirichlet: bool,
    /// `||A v - lambda v||` per mode, on Euclidean-normalized vectors.
    pub residuals: Vec<T>,
    /// Whether every mode of the operator is present.
    pub complete: bool,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn mode(&self, k: usize) -> &[T] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }

    /// Discrete measure of the active region.
    pub fn active_measure(&self) -> T {
        T::of_usize(self.n) * self.cell_weight
    }
}

/// Conservative spectral condition estimate: Gershgorin upper bound over a
/// crude domain-size lower bound for the smallest eigenvalue. Deliberately
/// pessimistic (the true smallest mixed eigenvalue can undercut the naive
/// `(pi / 2 diam)^2` box bound when the obstacle is tiny, so that bound is
/// slacked by 100).
fn condition_estimate<T: Real>(a: &SymmetricOperator<T>, mesh: &Mesh<T>) -> T {
    let (lo, hi) = mesh.domain.bounding_box();
    let mut diag2 = T::zero();
    for axis in 0..mesh.m {
        let d = hi[axis] - lo[axis];
        diag2 += d * d;
    }
    let diam = diag2.sqrt();
    let half_pi_over = T::PI() / (T::of(2.0) * diam);
    let lower = half_pi_over * half_pi_over / T::of(100.0);
    a.gershgorin_max() / lower
}

fn iteration_cap<T: Real>(cond_est: T) -> usize {
    (T::of(50.0) * cond_est.sqrt()).to_f64().ceil() as usize
}

/// Solves `A u = 1` on the mixed operator. `seed`, when given, warm-starts
/// the conjugate-gradient iteration (length must match). The iteration
/// budget is `50 * sqrt(condition estimate)` and is reported in the result.
pub fn solve_torsion<T: Real>(
    a: &SymmetricOperator<T>,
    mesh: &Mesh<T>,
    tol: T,
    seed: Option<&[T]>,
) -> Result<TorsionSolution<T>> {
    if !a.has_dirichlet {
        return Err(Error::MixedKernelRequired(
            "torsion equation (the reflecting operator annihilates constants)",
        ));
    }
    assert_eq!(a.n(), mesh.n_active(), "operator and mesh must correspond");
    let n = a.n();
    let b = vec![T::one(); n];
    let mut u = match seed {
        Some(s) => {
            assert_eq!(s.len(), n, "seed length must match the active set");
            s.to_vec()
        }
        None => vec![T::zero(); n],
    };
    let cap = iteration_cap(condition_estimate(a, mesh));
    let diag = a.diagonal();
    let out = conjugate_gradient(
        |x: &[T], y: &mut [T]| a.apply(x, y),
        &b,
        &mut u,
        Some(&diag),
        tol,
        cap,
    );
    if !out.converged {
        return Err(Error::ConvergenceFailure {
            what: "torsion conjugate gradients",
            iterations: out.iterations,
            cap,
            residual: out.rel_residual.to_f64(),
        });
    }
    let sup = u.iter().fold(T::neg_infinity(), |m, v| m.max(*v));
    let min = u.iter().fold(T::infinity(), |m, v| m.min(*v));
    Ok(TorsionSolution {
        values: u,
        sup,
        min,
        cg_iterations: out.iterations,
        iteration_cap: cap,
        rel_residual: out.rel_residual,
    })
}

fn fix_sign<T: Real>(v: &mut [T]) {
    let s: T = v.iter().copied().sum();
    if s < T::zero() {
        scale(-T::one(), v);
    }
}

fn discrete_normalize<T: Real>(v: &mut [T], cell_weight: T) {
    // Euclidean-normalized -> discrete-L2-normalized
    let inv = T::one() / cell_weight.sqrt();
    scale(inv, v);
}

/// Lowest eigenpair of the mixed operator by inverse power iteration.
/// Convergence is declared when the Rayleigh quotient moves by less than
/// `tol` relatively; `cg_tol` controls the inner solves. `seed` warm-starts
/// with an approximate mode shape (any scale).
pub fn smallest_eigenpair<T: Real>(
    a: &SymmetricOperator<T>,
    mesh: &Mesh<T>,
    tol: T,
    cg_tol: T,
    seed: Option<&[T]>,
) -> Result<EigenPair<T>> {
    if !a.has_dirichlet {
        return Err(Error::MixedKernelRequired(
            "smallest eigenvalue (the reflecting operator's lowest mode is the zero constant)",
        ));
    }
    let n = a.n();
    let mut x = match seed {
        Some(s) => {
            assert_eq!(s.len(), n, "seed length must match the active set");
            s.to_vec()
        }
        None => vec![T::one(); n],
    };
    normalize(&mut x);
    let cap = iteration_cap(condition_estimate(a, mesh));
    let diag = a.diagonal();
    let mut lambda = a.quadratic_form(&x);
    let mut y = vec![T::zero(); n];
    let mut outer_iterations = 0usize;
    let mut inner_iterations = 0usize;
    let mut converged = false;
    for _ in 0..200 {
        outer_iterations += 1;
        // warm start: for x close to the mode, y ~ x / lambda
        for i in 0..n {
            y[i] = x[i] / lambda;
        }
        let out = conjugate_gradient(
            |p: &[T], q: &mut [T]| a.apply(p, q),
            &x,
            &mut y,
            Some(&diag),
            cg_tol,
            cap,
        );
        inner_iterations += out.iterations;
        if !out.converged {
            return Err(Error::ConvergenceFailure {
                what: "inverse-iteration linear solve",
                iterations: out.iterations,
                cap,
                residual: out.rel_residual.to_f64(),
            });
        }
        // with A y = x, the Rayleigh quotient of y is y^T x / ||y||^2
        let ynorm2 = dot(&y, &y);
        let next = dot(&y, &x) / ynorm2;
        let ynorm = ynorm2.sqrt();
        for i in 0..n {
            x[i] = y[i] / ynorm;
        }
        let change = (next - lambda).abs();
        lambda = next;
        if change <= tol * lambda.abs() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure {
            what: "inverse power iteration",
            iterations: outer_iterations,
            cap: 200,
            residual: lambda.to_f64(),
        });
    }
    // final estimate: exact Rayleigh quotient of the returned vector, so the
    // reported eigenvalue and the vector are consistent to roundoff
    fix_sign(&mut x);
    lambda = a.quadratic_form(&x) / dot(&x, &x);
    a.apply(&x, &mut y);
    axpy(-lambda, &x, &mut y);
    let residual = norm2(&y);
    let mut vector = x;
    discrete_normalize(&mut vector, a.cell_weight());
    Ok(EigenPair {
        lambda,
        vector,
        residual,
        outer_iterations,
        inner_iterations,
    })
}

fn orthonormalize<T: Real>(block: &mut [Vec<T>]) {
    for _ in 0..2 {
        for i in 0..block.len() {
            let (head, tail) = block.split_at_mut(i);
            let v = &mut tail[0];
            for u in head.iter() {
                let d = dot(u, v);
                axpy(-d, u, v);
            }
            normalize(v);
        }
    }
}

/// The `k` lowest eigenpairs by shifted block inverse iteration with
/// Rayleigh-Ritz extraction. Handles the zero mode of reflecting operators
/// (the block is seeded with the constant vector) and degenerate pairs (the
/// Ritz rotation decouples them).
pub fn lowest_eigenpairs<T: Real>(
    a: &SymmetricOperator<T>,
    k: usize,
    tol: T,
    cg_tol: T,
) -> Result<EigenDecomposition<T>> {
    let n = a.n();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= {n}, got {k}"
        )));
    }
    let gersh = a.gershgorin_max();
    // the shift regularizes the (possibly singular) operator; 1e-4 of the
    // spectral radius keeps the inner solves well conditioned while leaving
    // strong contrast between the retained and discarded ends
    let sigma = gersh * T::of(1e-4);
    let diag = a.diagonal();
    let shifted_diag: Vec<T> = diag.iter().map(|d| *d + sigma).collect();
    let inner_cap = iteration_cap((gersh + sigma) / sigma);
    let floor = gersh * T::of(1e-10);

    let mut rng = ChaCha8Rng::seed_from_u64(0x00c0ffee);
    let mut block: Vec<Vec<T>> = (0..k)
        .map(|j| {
            if j == 0 {
                vec![T::one(); n]
            } else {
                (0..n)
                    .map(|_| T::of(rng.next_u64() as f64 / u64::MAX as f64 - 0.5))
                    .collect()
            }
        })
        .collect();
    orthonormalize(&mut block);

    let mut ritz_prev = vec![T::infinity(); k];
    let mut work = vec![T::zero(); n];
    for _outer in 0..500 {
        // advance: X <- (A + sigma I)^{-1} X
        for x in block.iter_mut() {
            let b = x.clone();
            let out = conjugate_gradient(
                |p: &[T], q: &mut [T]| {
                    a.apply(p, q);
                    axpy(sigma, p, q);
                },
                &b,
                x,
                Some(&shifted_diag),
                cg_tol,
                inner_cap,
            );
            if !out.converged {
                return Err(Error::ConvergenceFailure {
                    what: "block-iteration linear solve",
                    iterations: out.iterations,
                    cap: inner_cap,
                    residual: out.rel_residual.to_f64(),
                });
            }
        }
        orthonormalize(&mut block);

        // Rayleigh-Ritz on the block
        let mut ax: Vec<Vec<T>> = Vec::with_capacity(k);
        for x in &block {
            a.apply(x, &mut work);
            ax.push(work.clone());
        }
        let mut h = vec![T::zero(); k * k];
        for i in 0..k {
            for j in 0..=i {
                let v = (dot(&block[i], &ax[j]) + dot(&block[j], &ax[i])) / T::of(2.0);
                h[i * k + j] = v;
                h[j * k + i] = v;
            }
        }
        let (theta, q) = symmetric_eigen(&h, k)?;
        let mut rotated: Vec<Vec<T>> = Vec::with_capacity(k);
        for i in 0..k {
            let mut v = vec![T::zero(); n];
            for j in 0..k {
                axpy(q[i * k + j], &block[j], &mut v);
            }
            rotated.push(v);
        }
        block = rotated;

        let done = (0..k).all(|i| {
            let scale_i = theta[i].abs().max(floor);
            (theta[i] - ritz_prev[i]).abs() <= tol * scale_i
        });
        ritz_prev = theta;
        if done {
            // residuals and packaging
            let mut eigenvalues = ritz_prev.clone();
            let mut residuals = vec![T::zero(); k];
            let mut vectors = vec![T::zero(); k * n];
            for i in 0..k {
                fix_sign(&mut block[i]);
                a.apply(&block[i], &mut work);
                axpy(-eigenvalues[i], &block[i], &mut work);
                residuals[i] = norm2(&work);
                // snap tiny spurious negatives of the (theoretical) zero mode
                if eigenvalues[i] < T::zero() && eigenvalues[i].abs() <= floor {
                    eigenvalues[i] = eigenvalues[i].max(-floor);
                }
                let inv = T::one() / a.cell_weight().sqrt();
                for p in 0..n {
                    vectors[i * n + p] = block[i][p] * inv;
                }
            }
            return Ok(EigenDecomposition {
                eigenvalues,
                vectors,
                n,
                cell_weight: a.cell_weight(),
                has_dirichlet: a.has_dirichlet,
                residuals,
                complete: k == n,
            });
        }
    }
    Err(Error::ConvergenceFailure {
        what: "block inverse iteration",
        iterations: 500,
        cap: 500,
        residual: ritz_prev[0].to_f64(),
    })
}

/// The `k >= 2` lowest modes of a reflecting (no obstacle) operator.
pub fn neumann_spectrum<T: Real>(
    a: &SymmetricOperator<T>,
    k: usize,
    tol: T,
    cg_tol: T,
) -> Result<EigenDecomposition<T>> {
    if a.has_dirichlet {
        return Err(Error::NeumannKernelRequired(
            "reflecting spectrum (the operator carries absorbing faces)",
        ));
    }
    if k < 2 {
        return Err(Error::InvalidParameter(
            "a reflecting spectrum needs k >= 2: the first mode is the known constant".into(),
        ));
    }
    lowest_eigenpairs(a, k, tol, cg_tol)
}

/// Complete eigendecomposition through the dense path; refuses operators
/// beyond 4000 cells (the dense work grows like the cube of the size).
pub fn full_spectrum<T: Real>(a: &SymmetricOperator<T>) -> Result<EigenDecomposition<T>> {
    const LIMIT: usize = 4000;
    let n = a.n();
    if n > LIMIT {
        return Err(Error::SizeLimitExceeded { n, limit: LIMIT });
    }
    let dense = a.to_dense();
    let (eigenvalues, mut vectors) = symmetric_eigen(&dense, n)?;
    let gersh = a.gershgorin_max();
    if let Some(&first) = eigenvalues.first() {
        // roundoff leaves the bottom of a semidefinite spectrum slightly
        // negative; the tolerance scales with the working precision
        // (sqrt(eps) of the spectral radius: ~1e-8 in f64, ~3e-4 in f32)
        if first < -T::epsilon().sqrt() * gersh {
            return Err(Error::NegativeEigenvalue(first.to_f64()));
        }
    }
    let mut residuals = vec![T::zero(); n];
    let mut work = vec![T::zero(); n];
    for kk in 0..n {
        {
            let v = &mut vectors[kk * n..(kk + 1) * n];
            fix_sign(v);
        }
        let v = &vectors[kk * n..(kk + 1) * n];
        a.apply(v, &mut work);
        axpy(-eigenvalues[kk], v, &mut work);
        residuals[kk] = norm2(&work);
    }
    let inv = T::one() / a.cell_weight().sqrt();
    for v in vectors.iter_mut() {
        *v *= inv;
    }
    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
        n,
        cell_weight: a.cell_weight(),
        has_dirichlet: a.has_dirichlet,
        residuals,
        complete: true,
    })
}

/// Groups sorted eigenvalues into clusters: consecutive values belong to the
/// same cluster when their gap is at most `1e-6` of the larger one (with an
/// absolute floor of `1e-9` of the spectral radius, so near-zero values
/// cluster sensibly). Returns cluster sizes in spectral order.
pub fn cluster_eigenvalues<T: Real>(eigs: &[T], gershgorin: T) -> Vec<usize> {
    if eigs.is_empty() {
        return Vec::new();
    }
    let floor = gershgorin * T::of(1e-9);
    let mut sizes = Vec::new();
    let mut current = 1usize;
    for i in 1..eigs.len() {
        let gap = eigs[i] - eigs[i - 1];
        let scale_i = eigs[i].abs().max(floor);
        if gap <= scale_i * T::of(1e-6) {
            current += 1;
        } else {
            sizes.push(current);
            current = 1;
        }
    }
    sizes.push(current);
    sizes
}

/// Number of leading eigenvalues indistinguishable from zero at the
/// operator's scale (`|lambda| <= 1e-9 * gershgorin`). One for a connected
/// reflecting domain; the count equals the number of connected components.
pub fn zero_cluster_size<T: Real>(eigs: &[T], gershgorin: T) -> usize {
    let floor = gershgorin * T::of(1e-9);
    eigs.iter().take_while(|l| l.abs() <= floor).count()
}

impl<T: Real> SymmetricOperator<T> {
    /// Cell measure `h^m` of the originating mesh.
    pub fn cell_weight(&self) -> T {
        let mut w = T::one();
        for _ in 0..self.m {
            w *= self.h;
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainSpec, ObstacleSpec};
    use crate::mesh::build_mesh;
    use crate::operators::assemble_operator;
    use crate::radial_oracle::radial_eigenvalue;
    use crate::test_fixtures::{ANNULUS, MIXED, MIXED_SPECTRUM, SQUARE, SQUARE_SPECTRUM, TWOSQUARES_SPECTRUM};
    use approx::assert_relative_eq;

    /// Discrete reflecting-square eigenvalue: `4 N^2 sin^2(k pi / 2N)`.
    fn square_mode(n_cells: usize, k: usize) -> f64 {
        let n = n_cells as f64;
        4.0 * n * n * ((k as f64) * std::f64::consts::PI / (2.0 * n)).sin().powi(2)
    }

    // --- torsion ---------------------------------------------------------

    #[test]
    fn torsion_on_concentric_fixture_matches_frozen_reference() {
        let (mesh, a) = &*ANNULUS;
        assert_eq!(mesh.n_active(), 1212);
        let sol = solve_torsion(a, mesh, 1e-12, None).unwrap();
        // frozen from an independent implementation of the same scheme
        assert_relative_eq!(sol.sup, 0.572013199865, max_relative = 1e-9);
        assert!(sol.min > 0.0, "torsion function must be positive");
        assert!(sol.cg_iterations < sol.iteration_cap);
        assert!(sol.rel_residual <= 1e-12);
        // closed-form continuum supremum is 0.5647...; the coarse-grid value
        // sits within the expected O(h) band of it
        let continuum = 0.564718956217;
        assert!((sol.sup - continuum).abs() / continuum < 0.02);
    }

    #[test]
    fn torsion_warm_start_cuts_iterations() {
        let (mesh, a) = &*ANNULUS;
        let cold = solve_torsion(a, mesh, 1e-10, None).unwrap();
        let warm = solve_torsion(a, mesh, 1e-10, Some(&cold.values)).unwrap();
        assert_eq!(warm.cg_iterations, 0);
        assert_relative_eq!(warm.sup, cold.sup, max_relative = 1e-12);
    }

    #[test]
    fn torsion_requires_an_absorbing_boundary() {
        let (mesh, a) = &*SQUARE;
        assert!(matches!(
            solve_torsion(a, mesh, 1e-10, None),
            Err(Error::MixedKernelRequired(_))
        ));
    }

    // --- smallest eigenpair ----------------------------------------------

    #[test]
    fn smallest_mode_of_the_annulus_matches_frozen_reference() {
        let (mesh, a) = &*ANNULUS;
        let pair = smallest_eigenpair(a, mesh, 1e-10, 1e-12, None).unwrap();
        assert_relative_eq!(pair.lambda, 1.970488992778, max_relative = 1e-8);
        // sign convention: the ground mode sums positive
        let s: f64 = pair.vector.iter().sum();
        assert!(s > 0.0);
        // Rayleigh-quotient consistency of the reported pair
        let rq = a.quadratic_form(&pair.vector) / dot(&pair.vector, &pair.vector);
        assert_relative_eq!(rq, pair.lambda, max_relative = 1e-12);
        // discrete normalization
        let nrm: f64 = pair.vector.iter().map(|v| v * v).sum::<f64>() * a.cell_weight();
        assert_relative_eq!(nrm, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn smallest_mode_of_the_mixed_square_matches_dense_path() {
        let (mesh, a) = &*MIXED;
        let pair = smallest_eigenpair(a, mesh, 1e-9, 1e-11, None).unwrap();
        assert_relative_eq!(pair.lambda, 16.437961095049, max_relative = 1e-7);
        assert_relative_eq!(
            pair.lambda,
            MIXED_SPECTRUM.eigenvalues[0],
            max_relative = 1e-8
        );
    }

    #[test]
    fn smallest_mode_rejects_reflecting_operators() {
        let (mesh, a) = &*SQUARE;
        assert!(matches!(
            smallest_eigenpair(a, mesh, 1e-8, 1e-10, None),
            Err(Error::MixedKernelRequired(_))
        ));
    }

    #[test]
    fn eigen_warm_start_speeds_convergence() {
        let (mesh, a) = &*ANNULUS;
        let cold = smallest_eigenpair(a, mesh, 1e-10, 1e-12, None).unwrap();
        let warm = smallest_eigenpair(a, mesh, 1e-10, 1e-12, Some(&cold.vector)).unwrap();
        assert!(warm.outer_iterations <= cold.outer_iterations);
        assert!(warm.inner_iterations < cold.inner_iterations);
        assert_relative_eq!(warm.lambda, cold.lambda, max_relative = 1e-10);
    }

    // --- dense path ------------------------------------------------------

    #[test]
    fn dense_mixed_spectrum_matches_frozen_values_and_clusters() {
        let dec = &*MIXED_SPECTRUM;
        assert!(dec.complete && dec.has_dirichlet);
        assert_relative_eq!(dec.eigenvalues[0], 16.437961095049, max_relative = 1e-9);
        // fourfold symmetry makes the next two modes an exact pair
        assert_relative_eq!(dec.eigenvalues[1], 19.434852590880, max_relative = 1e-9);
        assert_relative_eq!(dec.eigenvalues[2], 19.434852590880, max_relative = 1e-9);
        let gersh = MIXED.1.gershgorin_max();
        let clusters = cluster_eigenvalues(&dec.eigenvalues, gersh);
        assert_eq!(clusters[0], 1);
        assert_eq!(clusters[1], 2);
        assert_eq!(zero_cluster_size(&dec.eigenvalues, gersh), 0);
        // discrete normalization and residual certificates
        for k in 0..5 {
            let nrm: f64 =
                dec.mode(k).iter().map(|v| v * v).sum::<f64>() * dec.cell_weight;
            assert_relative_eq!(nrm, 1.0, max_relative = 1e-10);
            assert!(dec.residuals[k] <= 1e-7 * gersh);
        }
    }

    #[test]
    fn dense_reflecting_spectrum_matches_closed_forms() {
        let dec = &*SQUARE_SPECTRUM;
        let gersh = SQUARE.1.gershgorin_max();
        // zero mode, then the exact discrete values of the 32-cell square
        assert!(dec.eigenvalues[0].abs() <= 1e-10 * gersh);
        assert_relative_eq!(dec.eigenvalues[1], square_mode(32, 1), max_relative = 1e-10);
        assert_relative_eq!(dec.eigenvalues[2], square_mode(32, 1), max_relative = 1e-10);
        assert_relative_eq!(
            dec.eigenvalues[3],
            2.0 * square_mode(32, 1),
            max_relative = 1e-10
        );
        assert_eq!(zero_cluster_size(&dec.eigenvalues, gersh), 1);
        let clusters = cluster_eigenvalues(&dec.eigenvalues, gersh);
        assert_eq!(&clusters[..2], &[1, 2]);
        // zero mode is the constant
        let c = dec.mode(0)[0];
        assert!(dec.mode(0).iter().all(|v| (*v - c).abs() <= 1e-8 * c.abs()));
    }

    #[test]
    fn disconnected_domain_doubles_the_zero_cluster() {
        let (gersh, dec) = &*TWOSQUARES_SPECTRUM;
        assert_eq!(dec.n, 512);
        assert_eq!(zero_cluster_size(&dec.eigenvalues, *gersh), 2);
        // first oscillatory mode equals the 16-cell unit square's
        assert_relative_eq!(dec.eigenvalues[2], square_mode(16, 1), max_relative = 1e-8);
    }

    #[test]
    fn dense_path_is_size_gated() {
        let d = DomainSpec::parse("disk:r=1").unwrap();
        let mesh = build_mesh(&d, None, 0.025).unwrap();
        let a = assemble_operator(&mesh);
        assert!(a.n() > 4000);
        assert!(matches!(
            full_spectrum(&a),
            Err(Error::SizeLimitExceeded { limit: 4000, .. })
        ));
    }

    // --- iterative block path --------------------------------------------

    #[test]
    fn block_iteration_matches_the_dense_path_on_mixed_operators() {
        let (_, a) = &*MIXED;
        let dec = lowest_eigenpairs(a, 3, 1e-9, 1e-11).unwrap();
        for k in 0..3 {
            assert_relative_eq!(
                dec.eigenvalues[k],
                MIXED_SPECTRUM.eigenvalues[k],
                max_relative = 1e-7
            );
        }
        assert!(!dec.complete);
    }

    #[test]
    fn block_iteration_resolves_the_reflecting_square() {
        let (_, a) = &*SQUARE;
        let dec = neumann_spectrum(a, 4, 1e-9, 1e-11).unwrap();
        let gersh = a.gershgorin_max();
        assert!(dec.eigenvalues[0].abs() <= 1e-8 * gersh);
        assert_relative_eq!(dec.eigenvalues[1], square_mode(32, 1), max_relative = 1e-7);
        assert_relative_eq!(dec.eigenvalues[2], square_mode(32, 1), max_relative = 1e-7);
        assert_relative_eq!(
            dec.eigenvalues[3],
            2.0 * square_mode(32, 1),
            max_relative = 1e-7
        );
        // residual certificates at the coarse scale
        for k in 0..4 {
            assert!(dec.residuals[k] <= 1e-6 * gersh, "mode {k}: {}", dec.residuals[k]);
        }
    }

    #[test]
    fn reflecting_spectrum_preconditions() {
        let (_, a) = &*MIXED;
        assert!(matches!(
            neumann_spectrum(a, 4, 1e-8, 1e-10),
            Err(Error::NeumannKernelRequired(_))
        ));
        let (_, a) = &*SQUARE;
        assert!(neumann_spectrum(a, 1, 1e-8, 1e-10).is_err());
    }

    // --- cross-validation against the radial reference -------------------

    #[test]
    fn grid_eigenvalue_tracks_the_radial_reference() {
        // concentric configuration, eight cells across the obstacle radius
        let d = DomainSpec::parse("disk:r=1").unwrap();
        let k = ObstacleSpec::parse("disk:r=0.2").unwrap();
        let mesh = build_mesh(&d, Some(&k), 0.025).unwrap();
        let a = assemble_operator(&mesh);
        let pair = smallest_eigenpair(&a, &mesh, 1e-9, 1e-11, None).unwrap();
        let reference = radial_eigenvalue(2, 0.2_f64, 1.0, 2000).unwrap();
        let rel = (pair.lambda - reference).abs() / reference;
        assert!(rel <= 1e-3, "grid {} vs radial {reference}: rel {rel}", pair.lambda);
    }

    #[test]
    fn product_lower_bound_at_coarse_resolution() {
        // lambda * sup u >= 1 - 5 (h / obstacle circumradius)^2 on the grid
        for h in [0.05_f64, 0.025] {
            let d = DomainSpec::parse("disk:r=1").unwrap();
            let k = ObstacleSpec::parse("disk:r=0.2").unwrap();
            let mesh = build_mesh(&d, Some(&k), h).unwrap();
            let a = assemble_operator(&mesh);
            let tor = solve_torsion(&a, &mesh, 1e-11, None).unwrap();
            let pair = smallest_eigenpair(&a, &mesh, 1e-9, 1e-11, None).unwrap();
            let product = pair.lambda * tor.sup;
            let ratio = h / 0.2;
            let bound = 1.0 - 5.0 * ratio * ratio;
            assert!(
                product >= bound,
                "h={h}: product {product} below bound {bound}"
            );
        }
    }

    // --- misc ------------------------------------------------------------

    #[test]
    fn cluster_rule_on_synthetic_spectra() {
        let gersh = 1e6;
        // separated values
        assert_eq!(cluster_eigenvalues(&[0.0, 1.0, 2.0], gersh), vec![1, 1, 1]);
        // tight pair within 1e-6 relative
        let eigs = [0.0, 5.0, 5.0 + 4e-6, 9.0];
        assert_eq!(cluster_eigenvalues(&eigs, gersh), vec![1, 2, 1]);
        // near-zero pair clusters through the absolute floor
        let eigs = [-8e-14, 2.6e-13, 9.83, 9.84];
        assert_eq!(cluster_eigenvalues(&eigs, 2048.0), vec![2, 1, 1]);
        assert_eq!(zero_cluster_size(&eigs, 2048.0), 2);
        assert_eq!(zero_cluster_size(&[3.0, 4.0], 2048.0), 0);
    }

    #[test]
    fn single_precision_smoke() {
        let d = DomainSpec::<f32>::parse("square:side=1,cx=0.5,cy=0.5").unwrap();
        let mesh = build_mesh(&d, None, 0.125_f32).unwrap();
        let a = assemble_operator(&mesh);
        let dec = full_spectrum(&a).unwrap();
        let exact = square_mode(8, 1) as f32;
        assert_relative_eq!(dec.eigenvalues[1], exact, max_relative = 1e-4);
    }
}
