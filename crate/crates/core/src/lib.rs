//! Spherical conformal parameterization of genus-zero triangle meshes.
//!
//! The surface is mapped to the unit sphere by minimizing the discrete
//! Dirichlet energy on the extended complex plane. Two solvers are provided:
//! [`dem::run_dem`], which alternates hemisphere Laplace solves with index
//! sets recomputed every sweep, and [`mdem::run_mdem`], which freezes the
//! index sets, iterates on dense boundary-to-boundary operators, and removes
//! their unit eigenvalue by a rank-one deflation. [`diagnostics`] computes
//! the convergence certificate and angle distortion for either result.
//!
//! ```no_run
//! use sphereconf::{mdem, shapes};
//!
//! let mesh = shapes::icosphere(3);
//! let out = mdem::run_mdem(&mesh, &mdem::MdemOptions::default()).unwrap();
//! println!("mean angle distortion {}", out.report.distortion.mean);
//! ```

// `!(x > bound)` is used on purpose so NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dem;
pub mod dense;
pub mod diagnostics;
mod error;
pub mod geometry;
pub mod initial;
pub mod laplacian;
pub mod mdem;
pub mod mesh;
pub mod partition;
pub mod plane;
pub mod shapes;
pub mod sparse;

pub use diagnostics::{Algorithm, Certificate, Parameterization, RunReport};
pub use error::{Error, Result};
pub use geometry::Point3;
pub use laplacian::LaplacianSystem;
pub use mesh::{Mesh, MeshFormat};
pub use partition::IndexPartition;
pub use plane::ComplexVector;
