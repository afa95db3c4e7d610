//! Expensive fixtures shared across the unit-test suite.
//!
//! Dense spectra of the reference meshes take seconds each; every test
//! module borrows them from here so each is computed at most once per test
//! binary.

use crate::geometry::{DomainSpec, ObstacleSpec};
use crate::mesh::{build_mesh, Mesh};
use crate::operators::{assemble_operator, SymmetricOperator};
use crate::solvers::{full_spectrum, EigenDecomposition};
use std::sync::LazyLock;

/// Unit square with a concentric disk obstacle, 32 cells across:
/// 816 active cells, small enough for the dense path.
pub(crate) static MIXED: LazyLock<(Mesh<f64>, SymmetricOperator<f64>)> = LazyLock::new(|| {
    let d = DomainSpec::parse("square:side=1,cx=0.5,cy=0.5").unwrap();
    let k = ObstacleSpec::parse("disk:r=0.25,cx=0.5,cy=0.5").unwrap();
    let mesh = build_mesh(&d, Some(&k), 1.0 / 32.0).unwrap();
    let a = assemble_operator(&mesh);
    (mesh, a)
});

pub(crate) static MIXED_SPECTRUM: LazyLock<EigenDecomposition<f64>> =
    LazyLock::new(|| full_spectrum(&MIXED.1).unwrap());

/// Reflecting unit square, 32 cells across (1024 cells).
pub(crate) static SQUARE: LazyLock<(Mesh<f64>, SymmetricOperator<f64>)> = LazyLock::new(|| {
    let d = DomainSpec::parse("square:side=1,cx=0.5,cy=0.5").unwrap();
    let mesh = build_mesh(&d, None, 1.0 / 32.0).unwrap();
    let a = assemble_operator(&mesh);
    (mesh, a)
});

pub(crate) static SQUARE_SPECTRUM: LazyLock<EigenDecomposition<f64>> =
    LazyLock::new(|| full_spectrum(&SQUARE.1).unwrap());

/// Concentric annulus (unit disk, obstacle radius 0.2) at the coarsest
/// legal resolution for that obstacle.
pub(crate) static ANNULUS: LazyLock<(Mesh<f64>, SymmetricOperator<f64>)> = LazyLock::new(|| {
    let d = DomainSpec::parse("disk:r=1").unwrap();
    let k = ObstacleSpec::parse("disk:r=0.2").unwrap();
    let mesh = build_mesh(&d, Some(&k), 0.05).unwrap();
    let a = assemble_operator(&mesh);
    (mesh, a)
});

/// Disconnected pair of unit squares with gap 1/2, 16 cells across each
/// square (512 cells): Gershgorin bound plus the full reflecting spectrum.
pub(crate) static TWOSQUARES_SPECTRUM: LazyLock<(f64, EigenDecomposition<f64>)> =
    LazyLock::new(|| {
        let d = DomainSpec::parse("twosquares:side=1,gap=0.5").unwrap();
        let mesh = build_mesh(&d, None, 1.0 / 16.0).unwrap();
        let a = assemble_operator(&mesh);
        (a.gershgorin_max(), full_spectrum(&a).unwrap())
    });
