//! Two-view triangulation optimal in angular error.
//!
//! A corrected ray pair must lie in a plane through the baseline, so the
//! problem reduces to choosing that plane's unit normal `n ⟂ b`. The angular
//! error of ray `i` against its projection onto the plane is `|fᵢ·n|` (the sine
//! of the angle). With `aᵢ` the components of `fᵢ` in a basis of `b⊥`:
//!
//! * L2: `min (a₁·n)² + (a₂·n)²` is the smallest eigenvector of `Σ aᵢaᵢᵀ`.
//! * L1: `|a₁·n| + |a₂·n|` is concave on each arc between its zeros, so the
//!   minimum sits where the plane contains one ray exactly; keeping the ray
//!   with the larger `‖aᵢ‖` is optimal.

use nalgebra::{Matrix2, Vector2};

use super::midpoint::midpoint;
use super::TriangulationResult;
use crate::error::{Error, Result};
use crate::geometry::{Ray, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularNorm {
    L1,
    L2,
}

/// Corrected ray pair and the normal of the plane containing it and the
/// baseline.
#[derive(Debug, Clone, Copy)]
pub struct AngularCorrection {
    pub rays: [Ray; 2],
    pub normal: Vec3,
}

/// Sines of the angles between each ray and the plane with normal `n`.
pub fn angular_residuals(ray1: &Ray, ray2: &Ray, normal: &Vec3) -> [f64; 2] {
    [ray1.direction.dot(normal).abs(), ray2.direction.dot(normal).abs()]
}

pub fn angular_cost(norm: AngularNorm, residuals: [f64; 2]) -> f64 {
    match norm {
        AngularNorm::L1 => residuals[0] + residuals[1],
        AngularNorm::L2 => residuals[0].powi(2) + residuals[1].powi(2),
    }
}

/// Orthonormal pair spanning the plane orthogonal to `b` (unit).
pub fn orthogonal_basis(b: &Vec3) -> (Vec3, Vec3) {
    let helper = if b.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = b.cross(&helper).normalize();
    let e2 = b.cross(&e1);
    (e1, e2)
}

pub fn correct_rays(ray1: &Ray, ray2: &Ray, norm: AngularNorm) -> Result<AngularCorrection> {
    let base = ray2.origin - ray1.origin;
    let len = base.norm();
    if !(len > 1e-12) {
        return Err(Error::DegenerateGeometry("ray origins coincide".into()));
    }
    let b = base / len;
    for r in [ray1, ray2] {
        if r.direction.cross(&b).norm() < 1e-12 {
            return Err(Error::DegenerateGeometry(
                "line of sight parallel to the baseline".into(),
            ));
        }
    }
    let (e1, e2) = orthogonal_basis(&b);
    let a1 = Vector2::new(ray1.direction.dot(&e1), ray1.direction.dot(&e2));
    let a2 = Vector2::new(ray2.direction.dot(&e1), ray2.direction.dot(&e2));

    let n2 = match norm {
        AngularNorm::L2 => {
            let m: Matrix2<f64> = a1 * a1.transpose() + a2 * a2.transpose();
            smallest_eigenvector(&m)
        }
        AngularNorm::L1 => {
            let keep = if a1.norm() >= a2.norm() { a1 } else { a2 };
            Vector2::new(-keep.y, keep.x).normalize()
        }
    };
    let normal = e1 * n2.x + e2 * n2.y;
    let fix = |r: &Ray| -> Result<Ray> {
        let d = r.direction - normal * r.direction.dot(&normal);
        Ray::new(r.origin, d)
    };
    Ok(AngularCorrection {
        rays: [fix(ray1)?, fix(ray2)?],
        normal,
    })
}

/// Unit eigenvector of the smaller eigenvalue of a symmetric 2×2 matrix.
fn smallest_eigenvector(m: &Matrix2<f64>) -> Vector2<f64> {
    let (p, q, r) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    // The major axis is at angle θ with tan 2θ = 2q / (p - r); the minor axis
    // is perpendicular.
    let theta = 0.5 * (2.0 * q).atan2(p - r);
    Vector2::new(-theta.sin(), theta.cos())
}

fn triangulate(ray1: &Ray, ray2: &Ray, norm: AngularNorm) -> Result<TriangulationResult> {
    let corr = correct_rays(ray1, ray2, norm)?;
    midpoint(&corr.rays)
}

/// Two-view triangulation minimizing the sum of angular errors (sines).
pub fn angular_l1_twoview(ray1: &Ray, ray2: &Ray) -> Result<TriangulationResult> {
    triangulate(ray1, ray2, AngularNorm::L1)
}

/// Two-view triangulation minimizing the sum of squared angular errors
/// (squared sines).
pub fn angular_l2_twoview(ray1: &Ray, ray2: &Ray) -> Result<TriangulationResult> {
    triangulate(ray1, ray2, AngularNorm::L2)
}
