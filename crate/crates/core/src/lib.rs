//! Calibrated multi-view triangulation.
//!
//! The crate provides the closed-form mid-point method and its reweighted
//! variant, two-view L2 and L1 reprojection-optimal triangulation, two-view
//! L1/L2 angular-optimal triangulation and N-view iterative refinements, together
//! with the pieces needed to benchmark them inside a calibrated
//! structure-from-motion pipeline: essential-matrix relative pose, viewing
//! graph solving, similarity alignment, seeded synthetic scenes and the
//! experiment runners that write CSV trial records.

pub mod alignment;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod relpose;
pub mod synth;
pub mod triangulation;
pub mod viewgraph;

pub use error::{Error, Result};
pub use geometry::{Calibration, Camera, Pixel, Point3, Pose, Ray, Rotation, Vec3};
