//! Numerical core for curvature-type integral equations on round spheres.
//!
//! The crate builds antipodally closed quadrature grids on S^n (n = 1, 2, 3),
//! assembles the dense chordal-distance kernel operators that drive the
//! supercritical (alpha > n) curvature equation, minimizes the associated
//! quotient functional over positive antipodally symmetric functions, and
//! verifies the exact conformal identities (stereographic covariance, Green
//! matrix rescaling, bubble solution on the plane) that the construction
//! rests on.

pub mod error;
pub mod functional;
pub mod grid;
pub mod harmonics;
pub mod kernel;
pub mod manifold;
pub mod solver;
pub mod special;
pub mod stereographic;

pub use error::{Error, Result};
pub use grid::{integrate, is_antipodally_symmetric, sphere_area, symmetrize, GridFunction, SphereGrid};
pub use kernel::{apply_tilde_i, assemble_kernel, chordal_distance, normalization_constant, KernelOperator};
pub use solver::{minimize, Method, SolveReport, SolverConfig};
