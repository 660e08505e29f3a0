//! Prescribed mean curvature surfaces in the product spaces `M²(κ) × ℝ`.
//!
//! Rotational H-spheres and H-cylinders, radial and disk H-graphs with
//! residual verification, height probes and confinement quantities.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimates;
pub mod cli;
pub mod graphs;
pub mod io;
pub mod mesh;
pub mod prescribed;
mod rk4;
pub mod rotational;
pub mod spaceform;

pub use error::{Error, ErrorClass, Result};
pub use prescribed::{Descriptor, PrescribedFunction};
pub use spaceform::{AmbientPoint, Chart, Kappa};
