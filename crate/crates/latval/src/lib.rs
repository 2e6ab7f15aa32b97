//! Exact-arithmetic valuations of lattice polytopes.
//!
//! The crate computes discrete volumes, solid-angle sums, discrete intrinsic
//! volumes and Grassmann angle valuations of convex lattice polytopes, fits
//! their dilation polynomials exactly or from seeded Monte Carlo estimates,
//! and ships a verification suite for the identities these quantities
//! satisfy (Gauss-Bonnet, Crofton in both forms, Brianchon-Gram and friends).
//!
//! Geometry is exact: hulls, face lattices, lattice point enumeration and
//! metric projections run over arbitrary-precision rationals. Angles are
//! closed-form up to three-dimensional cones and seeded Monte Carlo above.

pub mod error;
pub mod rat;
pub mod linalg;
pub mod simplex;
pub mod cone;
pub mod polytope;
pub mod lattice;
pub mod mc;
pub mod angle;
pub mod valuation;
pub mod ehrhart;
pub mod identities;
pub mod fixtures;
pub mod experiment;

pub use cone::Cone;
pub use error::{FitError, GeomError};
pub use rat::{Int, Rat};
