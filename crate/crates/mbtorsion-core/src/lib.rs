//! A desk-scale numerical laboratory for the torsion function and the first
//! eigenvalue of the Laplacian under mixed boundary conditions: a reflecting
//! (Neumann) outer boundary and an absorbing (Dirichlet) obstacle that
//! shrinks by a scale factor `eps`.
//!
//! The crate answers quantitative questions about that setup on uniform
//! finite-volume grids in the plane and in space, each piece checked against
//! an independent reference:
//!
//! * [`geometry`] / [`mesh`] / [`operators`] - shape specifications, cell
//!   classification, and the symmetric operator of the five/seven-point
//!   scheme with reflecting faces and an absorbing obstacle;
//! * [`solvers`] - conjugate-gradient torsion solves (`A u = 1`), inverse
//!   and block iteration for low eigenpairs, and a dense path for complete
//!   spectra of small problems;
//! * [`radial_oracle`] - closed-form torsion profiles and near-exact 1D
//!   eigenvalues of concentric configurations, the precision yardstick for
//!   everything else;
//! * [`heatkernel`] - spectral heat kernels of reflecting domains, kernel
//!   equilibration (the deviation `sup |pi(x,y,t) - 1/|D||` and its fitted
//!   exponential rate), trace brackets, and decay diagnostics;
//! * [`capacity`] - Newtonian capacity: closed forms for balls, a slender-
//!   body formula, a grid variational solver with box-size extrapolation,
//!   and the planar-to-spatial cylinder descent check;
//! * [`experiments`] - shrinking-obstacle sweeps, rate fits, CSV emission,
//!   and the top-level verifiers tying the above together.
//!
//! All numerical kernels are generic over the scalar type through
//! [`scalar::Real`] (`f64` or `f32`); the crate root exports concrete
//! aliases for the common types. Production runs use `f64` - the acceptance
//! tolerances sit far below single precision - while the `f32`
//! instantiations exist to keep the kernels honestly generic and to allow
//! cheap storage of bulky fields.

pub mod capacity;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod heatkernel;
pub mod linalg;
pub mod mesh;
pub mod operators;
pub mod radial_oracle;
pub mod scalar;
pub mod solvers;

#[cfg(test)]
mod test_fixtures;

pub use error::{Error, Result};
pub use scalar::Real;

// Concrete aliases of the main generic types. Double precision is the
// working choice everywhere; the `32` forms are for storage-bound callers.

pub type DomainSpec64 = geometry::DomainSpec<f64>;
pub type DomainSpec32 = geometry::DomainSpec<f32>;
pub type ObstacleSpec64 = geometry::ObstacleSpec<f64>;
pub type ObstacleSpec32 = geometry::ObstacleSpec<f32>;
pub type Mesh64 = mesh::Mesh<f64>;
pub type Mesh32 = mesh::Mesh<f32>;
pub type SymmetricOperator64 = operators::SymmetricOperator<f64>;
pub type SymmetricOperator32 = operators::SymmetricOperator<f32>;
pub type TorsionSolution64 = solvers::TorsionSolution<f64>;
pub type TorsionSolution32 = solvers::TorsionSolution<f32>;
pub type EigenPair64 = solvers::EigenPair<f64>;
pub type EigenPair32 = solvers::EigenPair<f32>;
pub type EigenDecomposition64 = solvers::EigenDecomposition<f64>;
pub type EigenDecomposition32 = solvers::EigenDecomposition<f32>;
pub type HeatKernel64 = heatkernel::HeatKernel<f64>;
pub type HeatKernel32 = heatkernel::HeatKernel<f32>;
pub type CapacityResult64 = capacity::CapacityResult<f64>;
pub type CapacityResult32 = capacity::CapacityResult<f32>;
pub type DescentReport64 = capacity::DescentReport<f64>;
pub type DescentReport32 = capacity::DescentReport<f32>;

#[cfg(test)]
mod alias_tests {
    use super::*;

    #[test]
    fn both_precisions_instantiate() {
        let d64 = DomainSpec64::parse("disk:r=1").unwrap();
        let d32 = DomainSpec32::parse("disk:r=1").unwrap();
        assert_eq!(d64.dimension(), d32.dimension());
        let m64 = mesh::build_mesh(&d64, None, 0.25f64).unwrap();
        let m32 = mesh::build_mesh(&d32, None, 0.25f32).unwrap();
        assert_eq!(m64.n_active(), m32.n_active());
        let a64: SymmetricOperator64 = operators::assemble_operator(&m64);
        let a32: SymmetricOperator32 = operators::assemble_operator(&m32);
        assert_eq!(a64.n(), a32.n());
    }
}
