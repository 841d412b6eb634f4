//! N-view reprojection refinement: damped Gauss-Newton for the L2 cost and
//! iteratively reweighted least squares for the L1 cost.

use nalgebra::{Matrix2x3, Matrix3, Vector2};

use super::TriangulationResult;
use crate::error::{Error, Result};
use crate::geometry::{Camera, Pixel, Point3, Vec3};

/// Floor on per-view residuals before they become L1 weights.
pub const RESIDUAL_FLOOR: f64 = 1e-9;

const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_MAX: f64 = 1e12;

fn residual_and_jacobian(cam: &Camera, u: &Pixel, p: &Point3) -> Option<(Vector2<f64>, Matrix2x3<f64>)> {
    let x = cam.pose.to_camera(p);
    if x.z == 0.0 || !x.z.is_finite() {
        return None;
    }
    let k = &cam.calib;
    let (xn, yn) = (x.x / x.z, x.y / x.z);
    let px = k.denormalize(xn, yn);
    let iz = 1.0 / x.z;
    // d(xn, yn) / d(camera point)
    let dn = Matrix2x3::new(iz, 0.0, -xn * iz, 0.0, iz, -yn * iz);
    let dk = nalgebra::Matrix2::new(k.fx, k.skew, 0.0, k.fy);
    let j = dk * dn * cam.pose.rotation.matrix();
    Some((Vector2::new(px.x - u.x, px.y - u.y), j))
}

/// Per-view reprojection distance; infinite when the point lies in a
/// camera's principal plane.
pub(crate) fn residual_norms(cameras: &[Camera], pixels: &[Pixel], p: &Point3) -> Vec<f64> {
    cameras
        .iter()
        .zip(pixels)
        .map(|(c, u)| match c.project_unchecked(p) {
            Some(px) => (px - u).norm(),
            None => f64::INFINITY,
        })
        .collect()
}

fn check_inputs(cameras: &[Camera], pixels: &[Pixel], init: &Point3, tol: f64, max_iter: usize) -> Result<()> {
    if cameras.len() < 2 || cameras.len() != pixels.len() {
        return Err(Error::InvalidInput(format!(
            "need matching camera and pixel lists of length >= 2 (got {} and {})",
            cameras.len(),
            pixels.len()
        )));
    }
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::InvalidInput("need tol > 0 and max_iter >= 1".into()));
    }
    if !cameras.iter().any(|c| c.depth(init) > 0.0) {
        return Err(Error::InvalidInput(
            "initial point is behind every camera".into(),
        ));
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Norm {
    L2,
    L1,
}

impl Norm {
    fn objective(self, residuals: &[f64]) -> f64 {
        match self {
            Norm::L2 => residuals.iter().map(|r| r * r).sum(),
            Norm::L1 => residuals.iter().sum(),
        }
    }
}

/// Levenberg-style damped iteration shared by both norms. For L1 the
/// weighted normal equations use `wᵢ = 1 / max(‖rᵢ‖, 1e-9)` recomputed at
/// every iterate; the weighted gradient equals the L1 gradient, so the damped
/// step is a descent direction. Steps that do not decrease the objective are
/// rejected and the damping raised.
fn damped(
    norm: Norm,
    cameras: &[Camera],
    pixels: &[Pixel],
    init: &Point3,
    tol: f64,
    max_iter: usize,
) -> Result<(TriangulationResult, Vec<f64>)> {
    check_inputs(cameras, pixels, init, tol, max_iter)?;
    let mut p = *init;
    let mut cost = norm.objective(&residual_norms(cameras, pixels, &p));
    let mut trace = vec![cost];
    let mut lambda = LAMBDA_INIT;
    for it in 1..=max_iter {
        let weights: Vec<f64> = match norm {
            Norm::L2 => vec![1.0; cameras.len()],
            Norm::L1 => residual_norms(cameras, pixels, &p)
                .iter()
                .map(|r| 1.0 / r.max(RESIDUAL_FLOOR))
                .collect(),
        };
        let mut h = Matrix3::zeros();
        let mut g = Vec3::zeros();
        for ((cam, u), w) in cameras.iter().zip(pixels).zip(&weights) {
            let Some((r, j)) = residual_and_jacobian(cam, u, &p) else {
                return Err(Error::DegenerateGeometry(
                    "estimate lies in a camera's principal plane".into(),
                ));
            };
            h += j.transpose() * j * *w;
            g += j.transpose() * r * *w;
        }
        let mut damped_h = h;
        for i in 0..3 {
            damped_h[(i, i)] += lambda * h[(i, i)].max(1e-12);
        }
        let Some(step) = damped_h.cholesky().map(|c| -c.solve(&g)) else {
            lambda *= 10.0;
            if lambda > LAMBDA_MAX {
                break;
            }
            continue;
        };
        if step.norm() < tol {
            return Ok((
                TriangulationResult {
                    point: p,
                    iterations: it,
                    converged: true,
                },
                trace,
            ));
        }
        let cand = p + step;
        let cand_cost = norm.objective(&residual_norms(cameras, pixels, &cand));
        if cand_cost <= cost {
            p = cand;
            cost = cand_cost;
            trace.push(cost);
            lambda = (lambda * 0.1).max(1e-12);
        } else {
            lambda *= 10.0;
            if lambda > LAMBDA_MAX {
                break;
            }
        }
    }
    Ok((
        TriangulationResult {
            point: p,
            iterations: max_iter,
            converged: false,
        },
        trace,
    ))
}

/// Damped Gauss-Newton on the sum of squared reprojection errors.
pub fn l2_multiview_refine(
    cameras: &[Camera],
    pixels: &[Pixel],
    init: &Point3,
    tol: f64,
    max_iter: usize,
) -> Result<TriangulationResult> {
    damped(Norm::L2, cameras, pixels, init, tol, max_iter).map(|r| r.0)
}

/// As [`l2_multiview_refine`], also returning the objective after every
/// accepted step (starting with the initial value).
pub fn l2_multiview_refine_traced(
    cameras: &[Camera],
    pixels: &[Pixel],
    init: &Point3,
    tol: f64,
    max_iter: usize,
) -> Result<(TriangulationResult, Vec<f64>)> {
    damped(Norm::L2, cameras, pixels, init, tol, max_iter)
}

/// IRLS on the sum of reprojection distances.
pub fn l1_multiview_irls(
    cameras: &[Camera],
    pixels: &[Pixel],
    init: &Point3,
    tol: f64,
    max_iter: usize,
) -> Result<TriangulationResult> {
    damped(Norm::L1, cameras, pixels, init, tol, max_iter).map(|r| r.0)
}

pub fn l1_multiview_irls_traced(
    cameras: &[Camera],
    pixels: &[Pixel],
    init: &Point3,
    tol: f64,
    max_iter: usize,
) -> Result<(TriangulationResult, Vec<f64>)> {
    damped(Norm::L1, cameras, pixels, init, tol, max_iter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Calibration, Pose};
    use crate::triangulation::{l1_twoview, l2_twoview, midpoint, reprojection_errors, DEFAULT_MAX_ITER, DEFAULT_TOL};
    use rand::{Rng, SeedableRng};

    fn cam(center: [f64; 3]) -> Camera {
        let k = Calibration::new(300.0, 300.0, 320.0, 240.0, 0.0).unwrap();
        Camera::new(k, Pose::look_at(Point3::from(center), Point3::origin()).unwrap(), 640, 480).unwrap()
    }

    fn box_cams() -> Vec<Camera> {
        vec![cam([-7.0, 3.0, 0.0]), cam([-10.0, -3.0, 1.0]), cam([-8.0, 0.0, -2.0])]
    }

    fn rays(cams: &[Camera], px: &[Pixel]) -> Vec<crate::geometry::Ray> {
        cams.iter().zip(px).map(|(c, u)| c.line_of_sight(u)).collect()
    }

    #[test]
    fn noise_free_three_views() {
        let cams = box_cams();
        let p = Point3::new(1.0, -3.0, 2.0);
        let px: Vec<Pixel> = cams.iter().map(|c| c.project(&p).unwrap()).collect();
        let init = midpoint(&rays(&cams, &px)).unwrap().point;
        for res in [
            l2_multiview_refine(&cams, &px, &init, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap(),
            l1_multiview_irls(&cams, &px, &init, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap(),
        ] {
            assert!((res.point - p).norm() < 1e-9);
        }
    }

    #[test]
    fn two_view_agrees_with_closed_form() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let cams = vec![cam([-7.0, 3.0, 0.0]), cam([-10.0, -3.0, 1.0])];
        for _ in 0..100 {
            let p = Point3::new(rng.random_range(-1.5..1.5), rng.random_range(-4.0..4.0), rng.random_range(-3.0..3.0));
            let px: Vec<Pixel> = cams
                .iter()
                .map(|c| {
                    let u = c.project(&p).unwrap();
                    Pixel::new(u.x + rng.random_range(-2.0..2.0), u.y + rng.random_range(-2.0..2.0))
                })
                .collect();
            let init = midpoint(&rays(&cams, &px)).unwrap().point;

            let l2 = l2_multiview_refine(&cams, &px, &init, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            let exact = l2_twoview(&cams[0], &cams[1], &px[0], &px[1]).unwrap();
            let sq = |q: &Point3| -> f64 { reprojection_errors(&cams, &px, q).iter().map(|e| e * e).sum() };
            assert!((sq(&l2.point) - sq(&exact.point)).abs() < 1e-8, "{} vs {}", sq(&l2.point), sq(&exact.point));

            let l1 = l1_multiview_irls(&cams, &px, &init, DEFAULT_TOL, 500).unwrap();
            let exact = l1_twoview(&cams[0], &cams[1], &px[0], &px[1]).unwrap();
            let ab = |q: &Point3| -> f64 { reprojection_errors(&cams, &px, q).iter().sum() };
            assert!((ab(&l1.point) - ab(&exact.point)).abs() < 1e-6, "{} vs {}", ab(&l1.point), ab(&exact.point));
        }
    }

    #[test]
    fn objectives_never_increase() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let cams = box_cams();
        for _ in 0..50 {
            let p = Point3::new(rng.random_range(-1.5..1.5), rng.random_range(-4.0..4.0), rng.random_range(-3.0..3.0));
            let px: Vec<Pixel> = cams
                .iter()
                .map(|c| {
                    let u = c.project(&p).unwrap();
                    Pixel::new(u.x + rng.random_range(-3.0..3.0), u.y + rng.random_range(-3.0..3.0))
                })
                .collect();
            let init = p + Vec3::new(0.3, -0.2, 0.1);
            for (_, trace) in [
                l2_multiview_refine_traced(&cams, &px, &init, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap(),
                l1_multiview_irls_traced(&cams, &px, &init, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap(),
            ] {
                assert!(trace.windows(2).all(|w| w[1] <= w[0]));
            }
        }
    }

    #[test]
    fn reports_non_convergence() {
        let cams = box_cams();
        let p = Point3::new(0.5, 0.5, 0.5);
        let px: Vec<Pixel> = cams.iter().map(|c| c.project(&p).unwrap() + nalgebra::Vector2::new(2.0, -1.0)).collect();
        let res = l2_multiview_refine(&cams, &px, &Point3::new(1.5, 3.0, -2.0), 1e-10, 1).unwrap();
        assert!(!res.converged);
        assert_eq!(res.iterations, 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let cams = box_cams();
        let px = vec![Pixel::new(0.0, 0.0); 3];
        assert!(l2_multiview_refine(&cams[..1], &px[..1], &Point3::origin(), 1e-10, 5).is_err());
        // behind every camera
        assert!(l2_multiview_refine(&cams, &px, &Point3::new(-50.0, 0.0, 0.0), 1e-10, 5).is_err());
    }
}
