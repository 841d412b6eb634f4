//! Triangulation methods.
//!
//! | method | views | cost |
//! |---|---|---|
//! | [`midpoint`] | N | squared 3D distance to the lines of sight |
//! | [`midpoint_irls`] | N | the above, reweighted by inverse squared depth |
//! | [`l2_twoview`] | 2 | squared reprojection error, global optimum |
//! | [`l1_twoview`] | 2 | reprojection distance, global optimum |
//! | [`l2_multiview_refine`] | N | squared reprojection error, local (damped Gauss-Newton) |
//! | [`l1_multiview_irls`] | N | reprojection distance, local (IRLS) |
//! | [`angular_l1_twoview`] | 2 | sum of angular errors, global optimum |
//! | [`angular_l2_twoview`] | 2 | sum of squared angular errors, global optimum |

mod angular;
mod midpoint;
mod poly;
mod refine;
mod twoview;

pub use angular::{
    angular_cost, angular_l1_twoview, angular_l2_twoview, angular_residuals, correct_rays,
    AngularCorrection, AngularNorm,
};
pub use midpoint::{
    depth_weights, midpoint, midpoint_cost, midpoint_irls, weighted_midpoint_cost, DEPTH_FLOOR,
    MAX_CONDITION,
};
pub use poly::{real_roots, Polynomial};
pub use refine::{
    l1_multiview_irls, l1_multiview_irls_traced, l2_multiview_refine, l2_multiview_refine_traced,
    RESIDUAL_FLOOR,
};
pub use twoview::{
    fundamental_from_cameras, l1_correct, l1_twoview, l2_correct, l2_twoview, EpipolarPencil,
    EPIPOLE_TOL,
};

use crate::geometry::{Camera, Pixel, Point3};

/// Default step tolerance of the iterative methods, in scene units.
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangulationResult {
    pub point: Point3,
    /// Zero for closed-form methods.
    pub iterations: usize,
    pub converged: bool,
}

impl TriangulationResult {
    pub(crate) fn closed_form(point: Point3) -> Self {
        Self {
            point,
            iterations: 0,
            converged: true,
        }
    }
}

/// Reprojection distance of `p` in every view, in pixels.
pub fn reprojection_errors(cameras: &[Camera], pixels: &[Pixel], p: &Point3) -> Vec<f64> {
    refine::residual_norms(cameras, pixels, p)
}
