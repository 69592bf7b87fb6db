//! Numerical verification of isoparametric polynomials on spheres.
//!
//! The crate builds the OT-FKM quartics from symmetric Clifford systems and
//! Cartan's cubics over the four normed division algebras, then checks the
//! identities they satisfy: the Cartan–Münzner equations and their hidden
//! higher-order companions, the principal-curvature structure of level
//! hypersurfaces, S^1-invariant Hopf data (the `alpha` invariant and
//! `Omega_F`), and the Riccati evolution of principal curvatures in
//! curvature-adapted parallel families.

pub mod clifford;
pub mod error;
pub mod hopf;
pub mod polyfam;
pub mod poly;
pub mod report;
pub mod riccati;
pub mod sampling;
pub mod spherelevel;
pub mod suite;
pub mod symmat;

pub use error::{Error, Result};
