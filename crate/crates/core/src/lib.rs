//! Anisotropic p-torsion toolkit for convex planar bodies.
//!
//! The crate computes the p-torsional rigidity, the maximum of the torsion
//! function, and the anisotropic inradius of convex polygons measured in a
//! smooth Minkowski norm, and checks the sharp inequalities relating the
//! three quantities.

pub mod anisotropy;
pub mod convex;
pub mod error;
pub mod estimates;
pub mod experiments;
pub mod geom;
pub mod mesh;
pub mod solver;

pub use error::{Error, Result};
