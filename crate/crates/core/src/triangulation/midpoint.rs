use nalgebra::Matrix3;

use super::TriangulationResult;
use crate::error::{Error, Result};
use crate::geometry::{Point3, Ray, Vec3};

/// Normal matrices with a larger condition number are treated as parallel
/// rays.
pub const MAX_CONDITION: f64 = 1e12;

/// Floor applied to ray depths before they become weights.
pub const DEPTH_FLOOR: f64 = 1e-6;

/// Sum of squared distances from `p` to every line.
pub fn midpoint_cost(rays: &[Ray], p: &Point3) -> f64 {
    rays.iter().map(|r| r.distance_to(p).powi(2)).sum()
}

/// Minimizes `Σ wᵢ d(p, lᵢ)²` through the 3×3 normal equations
/// `Σ wᵢ (I - dᵢdᵢᵀ) p = Σ wᵢ (I - dᵢdᵢᵀ) oᵢ`.
pub(crate) fn weighted_midpoint(rays: &[Ray], weights: &[f64]) -> Result<Point3> {
    let mut a = Matrix3::zeros();
    let mut b = Vec3::zeros();
    for (ray, &w) in rays.iter().zip(weights) {
        let d = ray.direction;
        let proj = (Matrix3::identity() - d * d.transpose()) * w;
        a += proj;
        b += proj * ray.origin.coords;
    }
    let eig = a.symmetric_eigen();
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if !(min > 0.0) || max / min > MAX_CONDITION {
        return Err(Error::DegenerateGeometry(format!(
            "lines of sight are (nearly) parallel, condition {:e}",
            max / min
        )));
    }
    // A = Q Λ Qᵀ
    let q = eig.eigenvectors;
    let mut y = q.transpose() * b;
    for i in 0..3 {
        y[i] /= eig.eigenvalues[i];
    }
    Ok(Point3::from(q * y))
}

fn check_rays(rays: &[Ray]) -> Result<()> {
    if rays.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "triangulation needs at least two rays, got {}",
            rays.len()
        )));
    }
    Ok(())
}

/// Closed-form point closest to all lines of sight in the least-squares sense.
pub fn midpoint(rays: &[Ray]) -> Result<TriangulationResult> {
    check_rays(rays)?;
    let w = vec![1.0; rays.len()];
    Ok(TriangulationResult::closed_form(weighted_midpoint(rays, &w)?))
}

/// Per-ray weights `1 / max(zᵢ, 1e-6)²`, `zᵢ` the depth of `p` along ray `i`.
pub fn depth_weights(rays: &[Ray], p: &Point3) -> Vec<f64> {
    rays.iter()
        .map(|r| r.depth_of(p).max(DEPTH_FLOOR).powi(-2))
        .collect()
}

/// `Σ wᵢ d(p, lᵢ)²` for given weights.
pub fn weighted_midpoint_cost(rays: &[Ray], weights: &[f64], p: &Point3) -> f64 {
    rays.iter()
        .zip(weights)
        .map(|(r, w)| w * r.distance_to(p).powi(2))
        .sum()
}

/// Iteratively reweighted mid-point.
///
/// Starts at [`midpoint`] and repeatedly re-solves the normal equations with
/// inverse squared depth weights, which turns 3D distances into approximate
/// angular (image-plane) errors. Stops once the estimate moves less than
/// `tol`.
pub fn midpoint_irls(rays: &[Ray], tol: f64, max_iter: usize) -> Result<TriangulationResult> {
    check_rays(rays)?;
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::InvalidInput(
            "midpoint_irls needs tol > 0 and max_iter >= 1".into(),
        ));
    }
    let mut p = midpoint(rays)?.point;
    for it in 1..=max_iter {
        let w = depth_weights(rays, &p);
        let next = weighted_midpoint(rays, &w)?;
        let step = (next - p).norm();
        p = next;
        if step < tol {
            return Ok(TriangulationResult {
                point: p,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(TriangulationResult {
        point: p,
        iterations: max_iter,
        converged: false,
    })
}
