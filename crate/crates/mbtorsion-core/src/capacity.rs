//! Newtonian capacity: analytic formulas, a variational solver on a
//! truncated exterior, the eigenvalue trial bound built from the ball
//! potential, and the cylinder descent identity that stands in for planar
//! capacity.
//!
//! Normalization: `cap(K)` is the Dirichlet energy of the equilibrium
//! potential, so a ball of radius `R` in `m >= 3` dimensions has
//! `cap = (m-2) s_m R^{m-2}` with `s_m` the unit-sphere area — `4 pi R`
//! in three dimensions. No capacity is computed in the plane: the
//! logarithmic normalization is a different theory, and the planar results
//! are reached through the three-dimensional cylinder instead
//! (`descent_check`).
//!
//! The variational solver truncates the exterior at a box of side
//! `box_radius`, imposes `phi = 1` on obstacle cells and `phi = 0` on the
//! box faces, and returns the discrete energy of the harmonic fill-in. The
//! truncation error is `O(1/box_radius)` with a sign (the truncated value
//! overestimates), and `1/cap` is linear in `1/box_radius` to high
//! accuracy, so a reciprocal fit over two box sizes removes the truncation
//! error almost entirely.

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, ObstacleSpec, Shape};
use crate::linalg::cg::conjugate_gradient;
use crate::linalg::{dot, normalize};
use crate::mesh::build_mesh;
use crate::operators::assemble_operator;
use crate::radial_oracle::unit_ball_measure;
use crate::scalar::Real;
use crate::solvers::smallest_eigenpair;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// How a capacity value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapacityMethod {
    AnalyticBall,
    EllipsoidAsymptotic,
    Variational,
}

impl std::fmt::Display for CapacityMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CapacityMethod::AnalyticBall => "analytic-ball",
            CapacityMethod::EllipsoidAsymptotic => "ellipsoid-asymptotic",
            CapacityMethod::Variational => "variational",
        })
    }
}

/// A capacity value with its provenance.
#[derive(Clone, Copy, Debug)]
pub struct CapacityResult<T> {
    pub value: T,
    pub method: CapacityMethod,
    /// Truncation box side (variational only).
    pub box_radius: Option<T>,
    /// Grid spacing (variational only).
    pub h: Option<T>,
    /// Truncation-free estimate from the reciprocal fit over two boxes.
    pub extrapolated: Option<T>,
}

impl<T: Real> CapacityResult<T> {
    /// The extrapolated estimate when present, the raw value otherwise.
    pub fn best(&self) -> T {
        self.extrapolated.unwrap_or(self.value)
    }
}

/// Surface area of the unit sphere in `m` dimensions: `2 pi^{m/2} / Gamma(m/2)`.
pub fn sphere_area<T: Real>(m: usize) -> T {
    assert!(m >= 2, "sphere area needs m >= 2");
    // Gamma(m/2) by upward recursion from Gamma(1) = 1 or Gamma(1/2) = sqrt(pi)
    let mut gamma = if m % 2 == 0 { T::one() } else { T::PI().sqrt() };
    let mut k = if m % 2 == 0 { 2 } else { 1 };
    while k + 2 <= m {
        gamma *= T::of_usize(k) / T::of(2.0);
        k += 2;
    }
    let two = T::of(2.0);
    two * T::PI().powf(T::of_usize(m) / two) / gamma
}

/// Capacity of a ball of radius `r`: `(m-2) s_m r^{m-2}`, `m >= 3`.
pub fn capacity_ball<T: Real>(r: T, m: usize) -> Result<CapacityResult<T>> {
    if m < 3 {
        return Err(Error::InvalidParameter(
            "Newtonian capacity needs m >= 3; planar statements go through the cylinder descent"
                .into(),
        ));
    }
    if !(r > T::zero()) {
        return Err(Error::InvalidParameter("ball radius must be positive".into()));
    }
    let value = T::of_usize(m - 2) * sphere_area::<T>(m) * r.powi(m as i32 - 2);
    Ok(CapacityResult {
        value,
        method: CapacityMethod::AnalyticBall,
        box_radius: None,
        h: None,
        extrapolated: None,
    })
}

/// Equilibrium potential of the ball of radius `r` at distance `dist` from
/// its center: `min(1, (r/dist)^{m-2})`. This dominates the potential of any
/// set contained in the ball.
pub fn equilibrium_potential_ball<T: Real>(dist: T, r: T, m: usize) -> T {
    assert!(m >= 3, "the Newtonian potential needs m >= 3");
    if dist <= r {
        T::one()
    } else {
        (r / dist).powi(m as i32 - 2)
    }
}

/// Capacity of a slender prolate spheroid with polar half-height `hp` and
/// equatorial radius `rp`: the asymptotic `2 pi hp / ln(hp / rp)`, valid
/// (and only offered) for `hp/rp >= 10`. No error bar is claimed.
pub fn capacity_ellipsoid_asymptotic<T: Real>(rp: T, hp: T) -> Result<CapacityResult<T>> {
    if !(rp > T::zero() && hp > T::zero()) {
        return Err(Error::InvalidParameter(
            "spheroid half-axes must be positive".into(),
        ));
    }
    let ratio = hp / rp;
    if !(ratio >= T::of(10.0)) {
        return Err(Error::NotSlender {
            ratio: ratio.to_f64(),
        });
    }
    Ok(CapacityResult {
        value: T::of(2.0) * T::PI() * hp / ratio.ln(),
        method: CapacityMethod::EllipsoidAsymptotic,
        box_radius: None,
        h: None,
        extrapolated: None,
    })
}

/// Spheroid `(R', h')` enclosing the cylinder of radius `eps * r` and
/// half-height `half_height`, built with the interpolation exponent
/// `alpha` in `(0, 1)`:
///
/// `R' = eps^{1-alpha} r`, `h' = half_height / sqrt(1 - eps^{2 alpha})`.
///
/// With these choices the cylinder's top rim lies exactly on the spheroid:
/// `(half_height / h')^2 + (eps r / R')^2 = 1` identically in all
/// parameters.
pub fn enclosing_spheroid<T: Real>(eps: T, alpha: T, r: T, half_height: T) -> Result<(T, T)> {
    if !(eps > T::zero() && eps < T::one()) {
        return Err(Error::InvalidParameter("need 0 < eps < 1".into()));
    }
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::InvalidParameter("need 0 < alpha < 1".into()));
    }
    if !(r > T::zero() && half_height > T::zero()) {
        return Err(Error::InvalidParameter(
            "cylinder dimensions must be positive".into(),
        ));
    }
    let r_prime = eps.powf(T::one() - alpha) * r;
    let h_prime = half_height / (T::one() - eps.powf(T::of(2.0) * alpha)).sqrt();
    Ok((r_prime, h_prime))
}

/// Explicit upper bound for the lowest mixed eigenvalue with obstacle
/// `eps * K`, from the trial function `1 - phi_B` built on the enclosing
/// ball `B(0; R)` of the unscaled obstacle:
///
/// `cap(eps K) / |D| * (1 - (|B(0;R)|/|D|)^{(m-2)/(2(m-1))})^{-3}`.
///
/// `K` must be a ball (so its potential, hence capacity, is analytic) and
/// `B(0; R)` must fit inside `D` with `|B| < |D|`, otherwise the bound is
/// vacuous.
pub fn rayleigh_trial_bound<T: Real>(
    k: &ObstacleSpec<T>,
    d: &DomainSpec<T>,
    eps: T,
) -> Result<T> {
    let m = d.dimension();
    if k.dimension() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: k.dimension(),
        });
    }
    if m < 3 {
        return Err(Error::InvalidParameter(
            "the trial bound uses the Newtonian normalization (m >= 3)".into(),
        ));
    }
    let r_ball = match k.shape {
        Shape::Ball { r } => r,
        _ => {
            return Err(Error::UnsupportedShape(
                "the trial bound needs a ball obstacle (analytic potential)".into(),
            ))
        }
    };
    if !(eps > T::zero()) {
        return Err(Error::InvalidParameter("need eps > 0".into()));
    }
    let big_r = k.circumradius_origin();
    if big_r > d.inradius_origin()? {
        return Err(Error::ObstacleNotContained);
    }
    let vol_d = d.measure();
    let ball_vol = unit_ball_measure::<T>(m) * big_r.powi(m as i32);
    if ball_vol >= vol_d {
        return Err(Error::VacuousBound {
            ball: ball_vol.to_f64(),
            domain: vol_d.to_f64(),
        });
    }
    let cap_eps = capacity_ball(eps * r_ball, m)?.value;
    let expo = T::of_usize(m - 2) / T::of(2.0 * (m as f64 - 1.0));
    let alpha = (ball_vol / vol_d).powf(expo);
    Ok(cap_eps / vol_d * (T::one() - alpha).powi(-3))
}

// ---------------------------------------------------------------------------
// variational capacity on a truncated exterior
// ---------------------------------------------------------------------------

/// Relative residual target for the potential solve.
pub fn capacity_cg_tol<T: Real>() -> T {
    T::of(1e-7)
}

/// Laplacian on the box `[-B/2, B/2]^3` with the obstacle cells held at 1
/// and zero on the box faces. Obstacle rows are identity rows and every
/// vector passed through `apply` keeps exact zeros there, so the reduced
/// system never mixes with the frozen cells.
struct BoxConductance<T> {
    n: usize,
    h: T,
    diag: Vec<T>,
    obstacle: Vec<u32>,
}

impl<T: Real> BoxConductance<T> {
    fn apply(&self, x: &[T], y: &mut [T]) {
        let n = self.n;
        let n2 = n * n;
        let h = self.h;
        for i in 0..x.len() {
            y[i] = self.diag[i] * x[i];
        }
        for ix in 0..n {
            for iy in 0..n {
                let base = (ix * n + iy) * n;
                for k in 1..n {
                    y[base + k] -= h * x[base + k - 1];
                }
                for k in 0..n - 1 {
                    y[base + k] -= h * x[base + k + 1];
                }
                if iy > 0 {
                    let nb = base - n;
                    for k in 0..n {
                        y[base + k] -= h * x[nb + k];
                    }
                }
                if iy + 1 < n {
                    let nb = base + n;
                    for k in 0..n {
                        y[base + k] -= h * x[nb + k];
                    }
                }
                if ix > 0 {
                    let nb = base - n2;
                    for k in 0..n {
                        y[base + k] -= h * x[nb + k];
                    }
                }
                if ix + 1 < n {
                    let nb = base + n2;
                    for k in 0..n {
                        y[base + k] -= h * x[nb + k];
                    }
                }
            }
        }
        // frozen cells: identity rows (x is zero there throughout the solve)
        for &i in &self.obstacle {
            let i = i as usize;
            y[i] = x[i];
        }
    }
}

/// Capacity of `K` by minimizing the Dirichlet energy on the truncated
/// exterior: box of side `box_radius` centered at the origin, spacing `h`.
/// The returned value overestimates `cap(K)` by `O(1/box_radius)`.
pub fn capacity_variational<T: Real>(
    k: &ObstacleSpec<T>,
    box_radius: T,
    h: T,
) -> Result<CapacityResult<T>> {
    if k.dimension() != 3 {
        return Err(Error::UnsupportedShape(
            "the variational solver works on three-dimensional obstacles".into(),
        ));
    }
    if !(h > T::zero() && box_radius > T::zero()) {
        return Err(Error::InvalidParameter(
            "box side and spacing must be positive".into(),
        ));
    }
    let circum = k.circumradius_origin();
    let limit = circum / T::of(4.0);
    if h > limit {
        return Err(Error::ObstacleUnderResolved {
            h: h.to_f64(),
            limit: limit.to_f64(),
        });
    }
    let half = box_radius / T::of(2.0);
    if circum > half {
        return Err(Error::ObstacleNotContained);
    }
    let nf = (box_radius / h).round();
    let n = nf.to_f64() as usize;
    if (nf * h - box_radius).abs() > T::of(1e-9) * box_radius || n == 0 {
        return Err(Error::InvalidParameter(
            "box side must be an integer multiple of the spacing".into(),
        ));
    }
    let total = n * n * n;
    const CELL_LIMIT: usize = 260 * 260 * 260;
    if total > CELL_LIMIT {
        return Err(Error::SizeLimitExceeded {
            n: total,
            limit: CELL_LIMIT,
        });
    }

    // classify cells and assemble diagonal, right-hand side and the constant
    // sum of cut conductances
    let centers: Vec<T> = (0..n)
        .map(|j| (T::of_usize(j) + T::of(0.5)) * h - half)
        .collect();
    let mut obstacle_mask = vec![false; total];
    let mut obstacle = Vec::new();
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..n {
                let i = (ix * n + iy) * n + iz;
                if k.contains(&[centers[ix], centers[iy], centers[iz]]) {
                    obstacle_mask[i] = true;
                    obstacle.push(i as u32);
                }
            }
        }
    }
    if obstacle.is_empty() {
        return Err(Error::EmptyActiveSet);
    }
    let d_lo = h / T::of(10.0);
    let two_h = T::of(2.0) * h;
    let mut diag = vec![T::zero(); total];
    let mut b = vec![T::zero(); total];
    let mut cut_total = T::zero();
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..n {
                let i = (ix * n + iy) * n + iz;
                if obstacle_mask[i] {
                    diag[i] = T::one();
                    continue;
                }
                let idx = [ix, iy, iz];
                let center = [centers[ix], centers[iy], centers[iz]];
                let mut acc = T::zero();
                for axis in 0..3 {
                    for dir in [-1i32, 1] {
                        let j = idx[axis] as i64 + dir as i64;
                        if j < 0 || j >= n as i64 {
                            acc += two_h;
                            continue;
                        }
                        let mut nb = idx;
                        nb[axis] = j as usize;
                        let ni = (nb[0] * n + nb[1]) * n + nb[2];
                        if obstacle_mask[ni] {
                            let d = k
                                .axis_entry_distance(&center, axis, dir)
                                .unwrap_or(h)
                                .max(d_lo)
                                .min(h);
                            let g = h * h / d;
                            acc += g;
                            b[i] += g;
                            cut_total += g;
                        } else {
                            acc += h;
                        }
                    }
                }
                diag[i] = acc;
            }
        }
    }

    let op = BoxConductance {
        n,
        h,
        diag,
        obstacle,
    };
    // seed with the analytic ball potential at the circumradius scale
    let mut x = vec![T::zero(); total];
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..n {
                let i = (ix * n + iy) * n + iz;
                if obstacle_mask[i] {
                    continue;
                }
                let (cx, cy, cz) = (centers[ix], centers[iy], centers[iz]);
                let dist = (cx * cx + cy * cy + cz * cz).sqrt();
                x[i] = equilibrium_potential_ball(dist, circum, 3);
            }
        }
    }
    let max_iter = 20_000;
    let cg = conjugate_gradient(
        |p, q| op.apply(p, q),
        &b,
        &mut x,
        Some(&op.diag),
        capacity_cg_tol::<T>(),
        max_iter,
    );
    if !cg.converged {
        return Err(Error::ConvergenceFailure {
            what: "capacity potential solve",
            iterations: cg.iterations,
            cap: max_iter,
            residual: cg.rel_residual.to_f64(),
        });
    }
    // energy of the fill-in: phi^T A phi - 2 b^T phi + sum of cut conductances
    let mut ax = vec![T::zero(); total];
    op.apply(&x, &mut ax);
    let value = dot(&x, &ax) - T::of(2.0) * dot(&b, &x) + cut_total;
    Ok(CapacityResult {
        value,
        method: CapacityMethod::Variational,
        box_radius: Some(box_radius),
        h: Some(h),
        extrapolated: None,
    })
}

/// Runs the variational solver on two box sizes and removes the truncation
/// error through the reciprocal fit `1/cap(B) = a + k/B`; the reported
/// `value` is the larger box's raw energy and `extrapolated` is `1/a`.
pub fn capacity_extrapolated<T: Real>(
    k: &ObstacleSpec<T>,
    box_small: T,
    box_large: T,
    h: T,
) -> Result<CapacityResult<T>> {
    if !(box_small < box_large) {
        return Err(Error::InvalidParameter(
            "box sizes must be given in increasing order".into(),
        ));
    }
    let small = capacity_variational(k, box_small, h)?;
    let large = capacity_variational(k, box_large, h)?;
    let y1 = T::one() / small.value;
    let y2 = T::one() / large.value;
    let slope = (y1 - y2) / (T::one() / box_small - T::one() / box_large);
    let a = y2 - slope / box_large;
    Ok(CapacityResult {
        value: large.value,
        method: CapacityMethod::Variational,
        box_radius: Some(box_large),
        h: Some(h),
        extrapolated: Some(T::one() / a),
    })
}

// ---------------------------------------------------------------------------
// cylinder descent
// ---------------------------------------------------------------------------

/// Outcome of the planar-vs-cylinder eigenvalue comparison.
#[derive(Clone, Copy, Debug)]
pub struct DescentReport<T> {
    pub lambda_2d: T,
    pub lambda_3d: T,
    /// `|lambda_2d - lambda_3d|`.
    pub gap: T,
    pub height: T,
    /// Number of cell layers along the cylinder axis.
    pub layers: usize,
    /// Active cells of the planar cross-section.
    pub n_2d: usize,
}

/// Compares the lowest planar mixed eigenvalue with the lowest eigenvalue
/// of the cylinder `D2 x (0, h_cyl)` carrying the same planar conditions,
/// reflecting top and bottom. The cylinder spectrum is the sum-set of the
/// planar spectrum and the reflecting chain spectrum, whose bottom is zero,
/// so the two lowest eigenvalues agree exactly; this is verified with
/// independently seeded solvers rather than assumed.
pub fn descent_check<T: Real>(
    d2: &DomainSpec<T>,
    k2: Option<&ObstacleSpec<T>>,
    h_cyl: T,
    mesh_h: T,
) -> Result<DescentReport<T>> {
    if d2.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: d2.dimension(),
        });
    }
    let k2 = k2.ok_or(Error::MixedKernelRequired(
        "descent comparison (without an obstacle both lowest eigenvalues are the trivial zero)",
    ))?;
    if k2.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: k2.dimension(),
        });
    }
    let layers_f = (h_cyl / mesh_h).round();
    let layers = layers_f.to_f64() as usize;
    if layers == 0 || (layers_f * mesh_h - h_cyl).abs() > T::of(1e-9) * h_cyl {
        return Err(Error::ResolutionMismatch {
            height: h_cyl.to_f64(),
            h: mesh_h.to_f64(),
        });
    }

    let mesh = build_mesh(d2, Some(k2), mesh_h)?;
    let a2 = assemble_operator(&mesh);
    let planar = smallest_eigenpair(&a2, &mesh, T::of(1e-12), T::of(1e-13), None)?;

    let n2 = mesh.n_active();
    let n3 = n2 * layers;
    let inv_h2 = T::one() / (mesh_h * mesh_h);
    // reflecting chain along the axis: 1 or 2 neighbors contribute
    let chain_diag: Vec<T> = (0..layers)
        .map(|iz| {
            let neighbors = usize::from(iz > 0) + usize::from(iz + 1 < layers);
            T::of_usize(neighbors) * inv_h2
        })
        .collect();
    let diag2 = a2.diagonal();
    let mut diag3 = vec![T::zero(); n3];
    for i2 in 0..n2 {
        for iz in 0..layers {
            diag3[i2 * layers + iz] = diag2[i2] + chain_diag[iz];
        }
    }
    let mut plane_in = vec![T::zero(); n2];
    let mut plane_out = vec![T::zero(); n2];
    let mut apply3 = |x: &[T], y: &mut [T]| {
        // chain part, strip by strip
        for i2 in 0..n2 {
            let base = i2 * layers;
            for iz in 0..layers {
                let mut acc = chain_diag[iz] * x[base + iz];
                if iz > 0 {
                    acc -= inv_h2 * x[base + iz - 1];
                }
                if iz + 1 < layers {
                    acc -= inv_h2 * x[base + iz + 1];
                }
                y[base + iz] = acc;
            }
        }
        // planar part, layer by layer
        for iz in 0..layers {
            for i2 in 0..n2 {
                plane_in[i2] = x[i2 * layers + iz];
            }
            a2.apply(&plane_in, &mut plane_out);
            for i2 in 0..n2 {
                y[i2 * layers + iz] += plane_out[i2];
            }
        }
    };

    // inverse iteration from a random seed, independent of the planar solve
    let mut rng = ChaCha8Rng::seed_from_u64(0x0de5ce);
    let mut x: Vec<T> = (0..n3).map(|_| T::of(rng.random::<f64>() - 0.5)).collect();
    normalize(&mut x);
    let mut y = vec![T::zero(); n3];
    let tol = T::of(1e-13);
    let max_cg = 20_000;
    let mut lambda = T::zero();
    for iter in 0..200 {
        y.copy_from_slice(&x);
        let cg = conjugate_gradient(
            |p, q| apply3(p, q),
            &x,
            &mut y,
            Some(&diag3),
            tol,
            max_cg,
        );
        if !cg.converged {
            return Err(Error::ConvergenceFailure {
                what: "descent inverse iteration solve",
                iterations: cg.iterations,
                cap: max_cg,
                residual: cg.rel_residual.to_f64(),
            });
        }
        let new_lambda = dot(&y, &x) / dot(&y, &y);
        let settled = iter > 0 && (new_lambda - lambda).abs() <= tol * new_lambda;
        lambda = new_lambda;
        x.copy_from_slice(&y);
        normalize(&mut x);
        if settled {
            break;
        }
    }
    // exact Rayleigh quotient of the converged vector
    apply3(&x, &mut y);
    let lambda_3d = dot(&x, &y) / dot(&x, &x);
    Ok(DescentReport {
        lambda_2d: planar.lambda,
        lambda_3d,
        gap: (lambda_3d - planar.lambda).abs(),
        height: h_cyl,
        layers,
        n_2d: n2,
    })
}
