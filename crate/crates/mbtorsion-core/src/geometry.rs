//! Parametric shapes for the outer domain and the obstacle.
//!
//! Supported shapes are axis-aligned: disks, squares and rectangles in the
//! plane; balls and boxes in space; plus a two-component union of squares
//! that exists solely as the disconnected negative control for the
//! equilibration diagnostics. Every shape has an analytic Lebesgue measure
//! and an exact containment test, which is what lets the experiment layer
//! compare computed eigenvalues against closed-form targets without any mesh
//! generation risk.
//!
//! Conventions:
//! - Boundary points count as inside (closed sets), so a grid cell whose
//!   center lies exactly on the obstacle surface is a Dirichlet cell.
//! - Obstacles are centered at the origin by default because the shrinking
//!   family `eps * K` is defined by scaling about the origin; scaling
//!   multiplies the center offset as well as all linear parameters.
//!
//! The text grammar used by the CLI and config files:
//! `disk:r=1.0`, `square:side=2.0`, `rect:lx=4.0,ly=2.0`, `ball:r=1.0`,
//! `box:lx=1.0,ly=1.0,lz=1.0`, `twosquares:side=1.0,gap=0.5`, each optionally
//! followed by `cx=`, `cy=`, `cz=` center offsets.

use crate::error::{Error, Result};
use crate::scalar::Real;
use std::fmt;

/// A point; the third coordinate is ignored by planar shapes.
pub type Point3<T> = [T; 3];

/// Shape tag plus dimensionless-length parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape<T> {
    /// Planar disk of radius `r`.
    Disk { r: T },
    /// Planar axis-aligned square with side length `side`.
    Square { side: T },
    /// Planar axis-aligned rectangle with side lengths `lx`, `ly`.
    Rect { lx: T, ly: T },
    /// Ball of radius `r` in three dimensions.
    Ball { r: T },
    /// Axis-aligned box with side lengths `lx`, `ly`, `lz`.
    Box3 { lx: T, ly: T, lz: T },
    /// Two disjoint squares of side `side`, separated by a gap of width
    /// `gap` along the x-axis and symmetric about the y-axis. The origin
    /// lies in the gap, not in the set. Domain-only; used as the
    /// disconnected control.
    TwoSquares { side: T, gap: T },
}

impl<T: Real> Shape<T> {
    fn dimension(&self) -> usize {
        match self {
            Shape::Disk { .. } | Shape::Square { .. } | Shape::Rect { .. } | Shape::TwoSquares { .. } => 2,
            Shape::Ball { .. } | Shape::Box3 { .. } => 3,
        }
    }

    fn check_positive(&self) -> Result<()> {
        let ok = match *self {
            Shape::Disk { r } | Shape::Ball { r } => r > T::zero(),
            Shape::Square { side } => side > T::zero(),
            Shape::Rect { lx, ly } => lx > T::zero() && ly > T::zero(),
            Shape::Box3 { lx, ly, lz } => lx > T::zero() && ly > T::zero() && lz > T::zero(),
            Shape::TwoSquares { side, gap } => side > T::zero() && gap > T::zero(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "shape lengths must be strictly positive".into(),
            ))
        }
    }
}

/// The outer domain `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec<T> {
    pub shape: Shape<T>,
    pub center: Point3<T>,
}

/// The obstacle `K` (compact, with nonempty interior).
#[derive(Clone, Debug, PartialEq)]
pub struct ObstacleSpec<T> {
    pub shape: Shape<T>,
    pub center: Point3<T>,
}

/// Scaling constants of a domain/obstacle pair: `r` is the distance from the
/// origin to the domain boundary, `r_k` the obstacle circumradius about the
/// origin, and `eps1 = min(1, r / r_k)` the largest admissible scale, so that
/// `eps * K` stays inside the origin-centered ball of radius `r` (and hence
/// inside the domain) for every `eps <= eps1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometryConstants<T> {
    pub r: T,
    pub r_k: T,
    pub eps1: T,
}

// ---------------------------------------------------------------------------
// shared shape machinery
// ---------------------------------------------------------------------------

fn half_extents<T: Real>(shape: &Shape<T>) -> Option<[T; 3]> {
    let two = T::of(2.0);
    match *shape {
        Shape::Square { side } => Some([side / two, side / two, T::zero()]),
        Shape::Rect { lx, ly } => Some([lx / two, ly / two, T::zero()]),
        Shape::Box3 { lx, ly, lz } => Some([lx / two, ly / two, lz / two]),
        _ => None,
    }
}

fn contains_impl<T: Real>(shape: &Shape<T>, center: &Point3<T>, x: &[T]) -> bool {
    let m = shape.dimension();
    assert_eq!(x.len(), m, "point dimension must match the shape dimension");
    let dx = x[0] - center[0];
    let dy = x[1] - center[1];
    match *shape {
        Shape::Disk { r } => dx * dx + dy * dy <= r * r,
        Shape::Ball { r } => {
            let dz = x[2] - center[2];
            dx * dx + dy * dy + dz * dz <= r * r
        }
        Shape::Square { .. } | Shape::Rect { .. } | Shape::Box3 { .. } => {
            let he = half_extents(shape).unwrap();
            let mut inside = dx.abs() <= he[0] && dy.abs() <= he[1];
            if m == 3 {
                inside = inside && (x[2] - center[2]).abs() <= he[2];
            }
            inside
        }
        Shape::TwoSquares { side, gap } => {
            let half = side / T::of(2.0);
            let off = (gap + side) / T::of(2.0);
            let in_square = |cx: T| (dx - cx).abs() <= half && dy.abs() <= half;
            in_square(off) || in_square(-off)
        }
    }
}

fn measure_impl<T: Real>(shape: &Shape<T>) -> T {
    match *shape {
        Shape::Disk { r } => T::PI() * r * r,
        Shape::Square { side } => side * side,
        Shape::Rect { lx, ly } => lx * ly,
        Shape::Ball { r } => T::of(4.0 / 3.0) * T::PI() * r * r * r,
        Shape::Box3 { lx, ly, lz } => lx * ly * lz,
        Shape::TwoSquares { side, .. } => T::of(2.0) * side * side,
    }
}

fn bounding_box_impl<T: Real>(shape: &Shape<T>, center: &Point3<T>) -> (Point3<T>, Point3<T>) {
    let ext = match *shape {
        Shape::Disk { r } => [r, r, T::zero()],
        Shape::Ball { r } => [r, r, r],
        Shape::TwoSquares { side, gap } => [gap / T::of(2.0) + side, side / T::of(2.0), T::zero()],
        _ => half_extents(shape).unwrap(),
    };
    let mut lo = [T::zero(); 3];
    let mut hi = [T::zero(); 3];
    for a in 0..3 {
        lo[a] = center[a] - ext[a];
        hi[a] = center[a] + ext[a];
    }
    (lo, hi)
}

/// Distance from `x` (assumed inside) to the boundary; negative when outside.
/// Exact for disks, balls and boxes; for the two-square union it is the max
/// over the components.
fn interior_distance_impl<T: Real>(shape: &Shape<T>, center: &Point3<T>, x: &Point3<T>) -> T {
    let dx = x[0] - center[0];
    let dy = x[1] - center[1];
    match *shape {
        Shape::Disk { r } => r - (dx * dx + dy * dy).sqrt(),
        Shape::Ball { r } => {
            let dz = x[2] - center[2];
            r - (dx * dx + dy * dy + dz * dz).sqrt()
        }
        Shape::Square { .. } | Shape::Rect { .. } | Shape::Box3 { .. } => {
            let he = half_extents(shape).unwrap();
            let mut d = (he[0] - dx.abs()).min(he[1] - dy.abs());
            if shape.dimension() == 3 {
                d = d.min(he[2] - (x[2] - center[2]).abs());
            }
            d
        }
        Shape::TwoSquares { side, gap } => {
            let half = side / T::of(2.0);
            let off = (gap + side) / T::of(2.0);
            let d1 = (half - (dx - off).abs()).min(half - dy.abs());
            let d2 = (half - (dx + off).abs()).min(half - dy.abs());
            d1.max(d2)
        }
    }
}

// ---------------------------------------------------------------------------
// grammar
// ---------------------------------------------------------------------------

fn parse_params(body: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for part in body.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::UnsupportedShape(format!("expected key=value, got `{part}`")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::UnsupportedShape(format!("bad number `{value}`")))?;
        out.push((key.trim().to_string(), v));
    }
    Ok(out)
}

fn parse_shape<T: Real>(s: &str) -> Result<(Shape<T>, Point3<T>)> {
    let (tag, body) = s.split_once(':').unwrap_or((s, ""));
    let params = parse_params(body)?;
    let mut center = [T::zero(); 3];
    let get = |want: &[&str]| -> Result<Vec<T>> {
        let mut vals = Vec::new();
        for key in want {
            let found = params
                .iter()
                .find(|(k, _)| k == key)
                .ok_or_else(|| Error::UnsupportedShape(format!("`{tag}` needs `{key}=`")))?;
            vals.push(T::of(found.1));
        }
        Ok(vals)
    };
    let shape = match tag.trim() {
        "disk" => Shape::Disk { r: get(&["r"])?[0] },
        "square" => Shape::Square { side: get(&["side"])?[0] },
        "rect" => {
            let v = get(&["lx", "ly"])?;
            Shape::Rect { lx: v[0], ly: v[1] }
        }
        "ball" => Shape::Ball { r: get(&["r"])?[0] },
        "box" => {
            let v = get(&["lx", "ly", "lz"])?;
            Shape::Box3 { lx: v[0], ly: v[1], lz: v[2] }
        }
        "twosquares" => {
            let v = get(&["side", "gap"])?;
            Shape::TwoSquares { side: v[0], gap: v[1] }
        }
        other => return Err(Error::UnsupportedShape(other.to_string())),
    };
    let known: &[&str] = match shape {
        Shape::Disk { .. } | Shape::Ball { .. } => &["r"],
        Shape::Square { .. } => &["side"],
        Shape::Rect { .. } => &["lx", "ly"],
        Shape::Box3 { .. } => &["lx", "ly", "lz"],
        Shape::TwoSquares { .. } => &["side", "gap"],
    };
    for (key, value) in &params {
        match key.as_str() {
            "cx" => center[0] = T::of(*value),
            "cy" => center[1] = T::of(*value),
            "cz" => center[2] = T::of(*value),
            k if known.contains(&k) => {}
            other => {
                return Err(Error::UnsupportedShape(format!(
                    "unknown parameter `{other}` for `{tag}`"
                )))
            }
        }
    }
    shape.check_positive()?;
    Ok((shape, center))
}

fn write_shape<T: Real>(f: &mut fmt::Formatter<'_>, shape: &Shape<T>, center: &Point3<T>) -> fmt::Result {
    match *shape {
        Shape::Disk { r } => write!(f, "disk:r={}", r)?,
        Shape::Square { side } => write!(f, "square:side={}", side)?,
        Shape::Rect { lx, ly } => write!(f, "rect:lx={},ly={}", lx, ly)?,
        Shape::Ball { r } => write!(f, "ball:r={}", r)?,
        Shape::Box3 { lx, ly, lz } => write!(f, "box:lx={},ly={},lz={}", lx, ly, lz)?,
        Shape::TwoSquares { side, gap } => write!(f, "twosquares:side={},gap={}", side, gap)?,
    }
    let keys = ["cx", "cy", "cz"];
    for a in 0..shape.dimension() {
        if center[a] != T::zero() {
            write!(f, ",{}={}", keys[a], center[a])?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// DomainSpec
// ---------------------------------------------------------------------------

impl<T: Real> DomainSpec<T> {
    pub fn new(shape: Shape<T>, center: Point3<T>) -> Result<Self> {
        shape.check_positive()?;
        Ok(Self { shape, center })
    }

    /// Parses the shape grammar, e.g. `disk:r=1.0` or `square:side=1,cx=0.5,cy=0.5`.
    pub fn parse(s: &str) -> Result<Self> {
        let (shape, center) = parse_shape(s)?;
        Ok(Self { shape, center })
    }

    pub fn dimension(&self) -> usize {
        self.shape.dimension()
    }

    /// Analytic Lebesgue measure.
    pub fn measure(&self) -> T {
        measure_impl(&self.shape)
    }

    /// Closed-set containment; `x.len()` must equal the dimension.
    pub fn contains(&self, x: &[T]) -> bool {
        contains_impl(&self.shape, &self.center, x)
    }

    /// Axis-aligned bounding box (low corner, high corner).
    pub fn bounding_box(&self) -> (Point3<T>, Point3<T>) {
        bounding_box_impl(&self.shape, &self.center)
    }

    /// Distance from an interior point to the boundary (negative outside).
    pub fn interior_distance(&self, x: &Point3<T>) -> T {
        interior_distance_impl(&self.shape, &self.center, x)
    }

    /// Distance from the origin to the domain boundary; errors unless the
    /// origin is strictly interior. For the two-square union the origin sits
    /// in the gap, so this always errors there.
    pub fn inradius_origin(&self) -> Result<T> {
        let d = self.interior_distance(&[T::zero(); 3]);
        if d > T::zero() {
            Ok(d)
        } else {
            Err(Error::OriginNotInterior)
        }
    }

    /// Connected components as separate specs (one for all single-component
    /// shapes, two squares for the union).
    pub fn components(&self) -> Vec<DomainSpec<T>> {
        match self.shape {
            Shape::TwoSquares { side, gap } => {
                let off = (gap + side) / T::of(2.0);
                [-off, off]
                    .into_iter()
                    .map(|cx| DomainSpec {
                        shape: Shape::Square { side },
                        center: [self.center[0] + cx, self.center[1], T::zero()],
                    })
                    .collect()
            }
            _ => vec![self.clone()],
        }
    }
}

impl<T: Real> fmt::Display for DomainSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_shape(f, &self.shape, &self.center)
    }
}

// ---------------------------------------------------------------------------
// ObstacleSpec
// ---------------------------------------------------------------------------

impl<T: Real> ObstacleSpec<T> {
    pub fn new(shape: Shape<T>, center: Point3<T>) -> Result<Self> {
        match shape {
            Shape::Disk { .. } | Shape::Ball { .. } | Shape::Square { .. } | Shape::Box3 { .. } => {}
            _ => {
                return Err(Error::UnsupportedShape(
                    "obstacles must be disks, balls, squares or boxes".into(),
                ))
            }
        }
        shape.check_positive()?;
        Ok(Self { shape, center })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let (shape, center) = parse_shape(s)?;
        Self::new(shape, center)
    }

    pub fn dimension(&self) -> usize {
        self.shape.dimension()
    }

    pub fn measure(&self) -> T {
        measure_impl(&self.shape)
    }

    pub fn contains(&self, x: &[T]) -> bool {
        contains_impl(&self.shape, &self.center, x)
    }

    pub fn bounding_box(&self) -> (Point3<T>, Point3<T>) {
        bounding_box_impl(&self.shape, &self.center)
    }

    /// The scaled obstacle `eps * K = { y : y/eps in K }`: every linear
    /// parameter and the center offset are multiplied by `eps`.
    pub fn scaled(&self, eps: T) -> Result<Self> {
        if eps <= T::zero() {
            return Err(Error::InvalidParameter("scale must be positive".into()));
        }
        let shape = match self.shape {
            Shape::Disk { r } => Shape::Disk { r: r * eps },
            Shape::Ball { r } => Shape::Ball { r: r * eps },
            Shape::Square { side } => Shape::Square { side: side * eps },
            Shape::Box3 { lx, ly, lz } => Shape::Box3 {
                lx: lx * eps,
                ly: ly * eps,
                lz: lz * eps,
            },
            _ => unreachable!("constructor restricts obstacle shapes"),
        };
        let mut center = self.center;
        for c in &mut center {
            *c = *c * eps;
        }
        Ok(Self { shape, center })
    }

    /// Circumradius about the origin: `max |x|` over the obstacle. This is
    /// the radius of the smallest origin-centered enclosing ball.
    pub fn circumradius_origin(&self) -> T {
        let c = self.center;
        match self.shape {
            Shape::Disk { r } | Shape::Ball { r } => {
                (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt() + r
            }
            Shape::Square { .. } | Shape::Box3 { .. } => {
                let he = half_extents(&self.shape).unwrap();
                let mut worst = T::zero();
                // the farthest corner maximizes each |coordinate| independently
                let mut s = T::zero();
                for a in 0..3 {
                    let far = c[a].abs() + he[a];
                    s = s + far * far;
                }
                worst = worst.max(s.sqrt());
                worst
            }
            _ => unreachable!(),
        }
    }

    /// Smallest half-extent of the obstacle about its own center; the mesh
    /// resolution rule requires at least eight cells across twice this.
    pub fn min_half_extent(&self) -> T {
        match self.shape {
            Shape::Disk { r } | Shape::Ball { r } => r,
            Shape::Square { side } => side / T::of(2.0),
            Shape::Box3 { lx, ly, lz } => lx.min(ly).min(lz) / T::of(2.0),
            _ => unreachable!(),
        }
    }

    /// Exact containment of the obstacle in a convex domain: corner test for
    /// box-like obstacles, center-distance test for round ones. For the
    /// two-square union domain this is always false (obstacles are not
    /// supported there).
    pub fn contained_in(&self, d: &DomainSpec<T>) -> bool {
        if matches!(d.shape, Shape::TwoSquares { .. }) {
            return false;
        }
        match self.shape {
            Shape::Disk { r } | Shape::Ball { r } => d.interior_distance(&self.center) >= r,
            Shape::Square { .. } | Shape::Box3 { .. } => {
                let he = half_extents(&self.shape).unwrap();
                let m = self.dimension();
                let corners = if m == 2 { 4 } else { 8 };
                (0..corners).all(|mask: usize| {
                    let mut p = self.center;
                    for a in 0..m {
                        let sgn = if mask >> a & 1 == 1 { T::one() } else { -T::one() };
                        p[a] = p[a] + sgn * he[a];
                    }
                    contains_impl(&d.shape, &d.center, &p[..m])
                })
            }
            _ => unreachable!(),
        }
    }

    /// Distance along grid axis `axis` in direction `dir` (`+1`/`-1`) from a
    /// point just outside the obstacle to the obstacle surface, given that
    /// the neighboring point one step away lies inside. Exact for all
    /// supported obstacle shapes; `None` if the ray does not hit the surface
    /// (possible only through roundoff at tangency).
    pub fn axis_entry_distance(&self, from: &Point3<T>, axis: usize, dir: i32) -> Option<T> {
        let sgn = if dir > 0 { T::one() } else { -T::one() };
        match self.shape {
            Shape::Disk { r } | Shape::Ball { r } => {
                let m = self.dimension();
                let mut rho2 = T::zero();
                for a in 0..m {
                    let d = from[a] - self.center[a];
                    rho2 = rho2 + d * d;
                }
                let a_proj = (from[axis] - self.center[axis]) * sgn;
                let c0 = rho2 - r * r;
                let disc = a_proj * a_proj - c0;
                if disc < T::zero() {
                    return None;
                }
                let sq = disc.sqrt();
                let t1 = -a_proj - sq;
                let t2 = -a_proj + sq;
                if t1 > T::zero() {
                    Some(t1)
                } else if t2 > T::zero() {
                    Some(t2)
                } else {
                    None
                }
            }
            Shape::Square { .. } | Shape::Box3 { .. } => {
                let he = half_extents(&self.shape).unwrap();
                let face = if dir > 0 {
                    self.center[axis] - he[axis]
                } else {
                    self.center[axis] + he[axis]
                };
                let t = (face - from[axis]) * sgn;
                if t > T::zero() {
                    Some(t)
                } else {
                    None
                }
            }
            _ => unreachable!(),
        }
    }
}

impl<T: Real> fmt::Display for ObstacleSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_shape(f, &self.shape, &self.center)
    }
}

// ---------------------------------------------------------------------------
// constants
// ---------------------------------------------------------------------------

/// Computes the scaling constants for a domain/obstacle pair. Requires the
/// origin strictly inside the domain; dimensions must match.
pub fn geometry_constants<T: Real>(
    d: &DomainSpec<T>,
    k: &ObstacleSpec<T>,
) -> Result<GeometryConstants<T>> {
    if d.dimension() != k.dimension() {
        return Err(Error::DimensionMismatch {
            expected: d.dimension(),
            got: k.dimension(),
        });
    }
    let r = d.inradius_origin()?;
    let r_k = k.circumradius_origin();
    let eps1 = T::one().min(r / r_k);
    Ok(GeometryConstants { r, r_k, eps1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn disk(r: f64) -> DomainSpec<f64> {
        DomainSpec::parse(&format!("disk:r={r}")).unwrap()
    }

    #[test]
    fn analytic_measures() {
        assert_relative_eq!(disk(1.0).measure(), std::f64::consts::PI);
        assert_relative_eq!(DomainSpec::<f64>::parse("square:side=2").unwrap().measure(), 4.0);
        assert_relative_eq!(
            DomainSpec::<f64>::parse("ball:r=1").unwrap().measure(),
            4.0 / 3.0 * std::f64::consts::PI
        );
        assert_relative_eq!(
            DomainSpec::<f64>::parse("twosquares:side=1,gap=0.5").unwrap().measure(),
            2.0
        );
    }

    #[test]
    fn scaling_is_linear_in_parameters_and_center() {
        let k = ObstacleSpec::<f64>::parse("disk:r=0.5").unwrap();
        let s = k.scaled(0.1).unwrap();
        assert_eq!(s.shape, Shape::Disk { r: 0.05 });

        let k = ObstacleSpec::<f64>::parse("disk:r=0.25,cx=0.5,cy=0.5").unwrap();
        let s = k.scaled(1.0).unwrap();
        assert_eq!(s, k);

        let k = ObstacleSpec::<f64>::parse("box:lx=2,ly=4,lz=6").unwrap();
        let s = k.scaled(0.5).unwrap();
        assert_eq!(s.shape, Shape::Box3 { lx: 1.0, ly: 2.0, lz: 3.0 });

        assert!(k.scaled(0.0).is_err());
        assert!(k.scaled(-1.0).is_err());
    }

    #[test]
    fn constants_for_reference_configurations() {
        let gc = geometry_constants(
            &disk(1.0),
            &ObstacleSpec::<f64>::parse("disk:r=1").unwrap(),
        )
        .unwrap();
        assert_eq!((gc.r, gc.r_k, gc.eps1), (1.0, 1.0, 1.0));

        // square [-1,1]^2 with an oversized disk obstacle
        let gc = geometry_constants(
            &DomainSpec::<f64>::parse("square:side=2").unwrap(),
            &ObstacleSpec::<f64>::parse("disk:r=2").unwrap(),
        )
        .unwrap();
        assert_eq!((gc.r, gc.r_k, gc.eps1), (1.0, 2.0, 0.5));

        // rectangle [-2,2]x[-1,1] with a square obstacle of half-width 1:
        // corners at distance sqrt(2)
        let gc = geometry_constants(
            &DomainSpec::<f64>::parse("rect:lx=4,ly=2").unwrap(),
            &ObstacleSpec::<f64>::parse("square:side=2").unwrap(),
        )
        .unwrap();
        assert_relative_eq!(gc.r, 1.0);
        assert_relative_eq!(gc.r_k, 2.0_f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(gc.eps1, 1.0 / 2.0_f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn origin_must_be_interior_for_constants() {
        // origin sits in the gap of the two-square union
        let d = DomainSpec::<f64>::parse("twosquares:side=1,gap=0.5").unwrap();
        let k = ObstacleSpec::<f64>::parse("disk:r=0.1").unwrap();
        assert!(matches!(
            geometry_constants(&d, &k),
            Err(Error::OriginNotInterior)
        ));
        // ... and for a shifted square that misses the origin
        let d = DomainSpec::<f64>::parse("square:side=1,cx=5,cy=5").unwrap();
        assert!(geometry_constants(&d, &k).is_err());
    }

    #[test]
    fn closed_set_containment() {
        let d = disk(1.0);
        assert!(d.contains(&[0.0, 0.0]));
        assert!(!d.contains(&[2.0, 0.0]));
        assert!(d.contains(&[1.0, 0.0])); // boundary counts as inside
        let sq = DomainSpec::<f64>::parse("square:side=2").unwrap();
        assert!(sq.contains(&[1.0, 1.0])); // corner counts as inside
        let ts = DomainSpec::<f64>::parse("twosquares:side=1,gap=0.5").unwrap();
        assert!(!ts.contains(&[0.0, 0.0])); // gap point
        assert!(ts.contains(&[0.75, 0.0])); // right-component center
        assert!(ts.contains(&[-0.75, 0.0]));
    }

    #[test]
    fn two_square_components() {
        let ts = DomainSpec::<f64>::parse("twosquares:side=1,gap=0.5").unwrap();
        let comps = ts.components();
        assert_eq!(comps.len(), 2);
        assert_relative_eq!(comps[0].center[0], -0.75);
        assert_relative_eq!(comps[1].center[0], 0.75);
        assert_relative_eq!(comps[0].measure() + comps[1].measure(), ts.measure());
        assert_eq!(disk(1.0).components().len(), 1);
    }

    #[test]
    fn grammar_round_trip() {
        for s in [
            "disk:r=1",
            "square:side=2",
            "rect:lx=4,ly=2",
            "twosquares:side=1,gap=0.5",
            "disk:r=0.25,cx=0.5,cy=0.5",
        ] {
            let d = DomainSpec::<f64>::parse(s).unwrap();
            let rt = DomainSpec::<f64>::parse(&d.to_string()).unwrap();
            assert_eq!(d, rt, "{s}");
        }
        for s in ["ball:r=1", "box:lx=8,ly=8,lz=8"] {
            let d = DomainSpec::<f64>::parse(s).unwrap();
            assert_eq!(d, DomainSpec::<f64>::parse(&d.to_string()).unwrap());
        }
        assert!(DomainSpec::<f64>::parse("pentagon:r=1").is_err());
        assert!(DomainSpec::<f64>::parse("disk:r=0").is_err());
        assert!(DomainSpec::<f64>::parse("disk:radius=1").is_err());
        assert!(ObstacleSpec::<f64>::parse("twosquares:side=1,gap=0.5").is_err());
    }

    #[test]
    fn axis_entry_distance_matches_geometry() {
        // disk of radius 0.5: approach along +x from (-0.7, 0.3)
        let k = ObstacleSpec::<f64>::parse("disk:r=0.5").unwrap();
        let d = k.axis_entry_distance(&[-0.7, 0.3, 0.0], 0, 1).unwrap();
        let expect = 0.7 - (0.25_f64 - 0.09).sqrt();
        assert_relative_eq!(d, expect, max_relative = 1e-14);

        // square of side 1: face plane at x = -0.5
        let k = ObstacleSpec::<f64>::parse("square:side=1").unwrap();
        let d = k.axis_entry_distance(&[-0.8, 0.1, 0.0], 0, 1).unwrap();
        assert_relative_eq!(d, 0.3, max_relative = 1e-14);

        // from the other side, moving in -x
        let d = k.axis_entry_distance(&[0.9, 0.1, 0.0], 0, -1).unwrap();
        assert_relative_eq!(d, 0.4, max_relative = 1e-14);
    }

    #[test]
    fn containment_uses_exact_tests() {
        let d = disk(1.0);
        let inscribed = ObstacleSpec::<f64>::parse(&format!(
            "square:side={}",
            2.0 / 2.0_f64.sqrt() - 1e-12
        ))
        .unwrap();
        assert!(inscribed.contained_in(&d));
        let too_big = ObstacleSpec::<f64>::parse(&format!(
            "square:side={}",
            2.0 / 2.0_f64.sqrt() + 1e-9
        ))
        .unwrap();
        assert!(!too_big.contained_in(&d));
    }

    #[test]
    fn containment_soundness_under_admissible_scaling() {
        // sampled points of eps*K lie in the origin-centered ball of radius r
        use rand::RngCore;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        use rand::SeedableRng;
        let d = DomainSpec::<f64>::parse("rect:lx=4,ly=2").unwrap();
        let k = ObstacleSpec::<f64>::parse("square:side=2,cx=0.2,cy=-0.1").unwrap();
        let gc = geometry_constants(&d, &k).unwrap();
        let eps = 0.9 * gc.eps1;
        let ek = k.scaled(eps).unwrap();
        let (lo, hi) = ek.bounding_box();
        let mut checked = 0;
        for _ in 0..10_000 {
            let u = rng.next_u64() as f64 / u64::MAX as f64;
            let v = rng.next_u64() as f64 / u64::MAX as f64;
            let p = [lo[0] + u * (hi[0] - lo[0]), lo[1] + v * (hi[1] - lo[1])];
            if ek.contains(&p) {
                checked += 1;
                assert!(p[0] * p[0] + p[1] * p[1] <= gc.r * gc.r * (1.0 + 1e-12));
            }
        }
        assert!(checked > 1000, "sampling must actually hit the obstacle");
    }

    proptest! {
        #[test]
        fn measure_scales_like_eps_to_the_dimension(
            r in 0.1_f64..10.0,
            eps in 0.01_f64..1.0,
            which in 0_u8..3,
        ) {
            let k: ObstacleSpec<f64> = match which {
                0 => ObstacleSpec::parse(&format!("disk:r={r}")).unwrap(),
                1 => ObstacleSpec::parse(&format!("ball:r={r}")).unwrap(),
                _ => ObstacleSpec::parse(&format!("box:lx={r},ly={:.6},lz={:.6}", r * 2.0, r * 0.5)).unwrap(),
            };
            let m = k.dimension() as i32;
            let scaled = k.scaled(eps).unwrap();
            let expect = eps.powi(m) * k.measure();
            prop_assert!((scaled.measure() - expect).abs() <= 1e-12 * expect);
        }

        #[test]
        fn circumradius_scales_linearly(
            r in 0.1_f64..5.0,
            cx in -2.0_f64..2.0,
            eps in 0.01_f64..1.0,
        ) {
            let k = ObstacleSpec::<f64>::parse(&format!("disk:r={r},cx={cx}")).unwrap();
            let scaled = k.scaled(eps).unwrap();
            let expect = eps * k.circumradius_origin();
            prop_assert!((scaled.circumradius_origin() - expect).abs() <= 1e-12 * expect);
        }
    }
}
