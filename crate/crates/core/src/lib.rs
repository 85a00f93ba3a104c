//! Finite elements for the heat equation of tangential n-tensor fields
//! (n = 0, 1, 2) on a graph surface with a localized bump.
//!
//! Two discretizations are provided:
//!
//! * [`sfem`]: the embedding surface FEM. Fields are stored with `3^n`
//!   Cartesian components per node, tangentiality is enforced weakly by a
//!   `beta h^-2` penalty on the normal part.
//! * [`isfem`]: the intrinsic surface FEM. Fields are stored with `2^n`
//!   contravariant components in an orthogonalized tangent frame, and the
//!   covariant derivative carries the frame connection explicitly.
//!
//! [`bench`] drives both on the bump benchmark and writes CSV observables.

pub mod bench;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod isfem;
pub mod linalg;
pub mod mesh;
pub mod sfem;
pub mod timestep;
pub mod vtk;

pub use error::{Error, Result};

pub type Vec2 = nalgebra::Vector2<f64>;
pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat2 = nalgebra::Matrix2<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
pub type Mat3x2 = nalgebra::Matrix3x2<f64>;
