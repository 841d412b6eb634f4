//! Two-view reprojection-optimal triangulation.
//!
//! Both solvers work on the pencil of epipolar lines. After moving each
//! measurement to the origin and rotating the epipoles onto the x axis, the
//! epipolar line pair is parametrized by a single scalar `t` and the L2 (sum of
//! squared distances) or L1 (sum of distances) cost becomes a rational function
//! of `t`. Its stationary points are the real roots of a degree-6 (L2) or
//! degree-8 (L1) polynomial; the global minimum is found by evaluating the cost
//! at every candidate, including `t → ∞`. The measurements are then moved to
//! the closest points on the optimal line pair and the corrected lines of
//! sight are intersected.

use nalgebra::{Matrix3, Vector3};

use super::midpoint::midpoint;
use super::poly::Polynomial;
use super::TriangulationResult;
use crate::error::{Error, Result};
use crate::geometry::{skew, Camera, Pixel};

/// A measurement closer than this (in pixels) to its epipole has no defined
/// epipolar line.
pub const EPIPOLE_TOL: f64 = 1e-9;

/// Leading polynomial coefficients below this fraction of the largest one are
/// dropped before root finding.
const LEADING_TRIM: f64 = 1e-13;

/// Fundamental matrix with `u₂ᵀ F u₁ = 0` for the two cameras.
pub fn fundamental_from_cameras(cam1: &Camera, cam2: &Camera) -> Matrix3<f64> {
    let r1 = cam1.pose.rotation.matrix();
    let r2 = cam2.pose.rotation.matrix();
    let r = r2 * r1.transpose();
    let t = r2 * (cam1.center() - cam2.center());
    let e = skew(&t) * r;
    cam2.calib.inverse_matrix().transpose() * e * cam1.calib.inverse_matrix()
}

fn from_h(v: &Vector3<f64>) -> Pixel {
    Pixel::new(v.x / v.z, v.y / v.z)
}

/// Closest point to the origin on the line `(λ, μ, ν)`, homogeneous.
fn foot_from_origin(l: &Vector3<f64>) -> Vector3<f64> {
    Vector3::new(-l.x * l.z, -l.y * l.z, l.x * l.x + l.y * l.y)
}

/// Epipolar pencil of one correspondence in canonical coordinates.
#[derive(Debug, Clone)]
pub struct EpipolarPencil {
    f1: f64,
    f2: f64,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    /// Canonical-to-pixel maps for each image.
    back1: Matrix3<f64>,
    back2: Matrix3<f64>,
    /// Canonical units per pixel.
    scale: f64,
}

impl EpipolarPencil {
    pub fn new(cam1: &Camera, cam2: &Camera, u1: &Pixel, u2: &Pixel) -> Result<Self> {
        if (cam1.center() - cam2.center()).norm() < 1e-12 {
            return Err(Error::DegenerateGeometry(
                "camera centers coincide".into(),
            ));
        }
        let fmat = fundamental_from_cameras(cam1, cam2);
        // Epipoles: each camera center seen by the other camera.
        let e1 = cam1.matrix() * cam2.center().to_homogeneous();
        let e2 = cam2.matrix() * cam1.center().to_homogeneous();

        // A common isotropic scale keeps the minimizer unchanged.
        let scale = 4.0 / (cam1.calib.fx + cam1.calib.fy + cam2.calib.fx + cam2.calib.fy);
        let to_canon = |u: &Pixel| {
            Matrix3::new(
                scale, 0.0, -scale * u.x, //
                0.0, scale, -scale * u.y, //
                0.0, 0.0, 1.0,
            )
        };
        let t1 = to_canon(u1);
        let t2 = to_canon(u2);
        let t1_inv = t1.try_inverse().expect("translation-scale is invertible");
        let t2_inv = t2.try_inverse().expect("translation-scale is invertible");

        let rot = |e: &Vector3<f64>| -> Result<Matrix3<f64>> {
            let n = (e.x * e.x + e.y * e.y).sqrt();
            // Pixel distance between the measurement and the epipole.
            if n <= EPIPOLE_TOL * scale * e.z.abs() {
                return Err(Error::EpipoleAtPoint);
            }
            let (ex, ey) = (e.x / n, e.y / n);
            Ok(Matrix3::new(ex, ey, 0.0, -ey, ex, 0.0, 0.0, 0.0, 1.0))
        };
        let e1c = t1 * e1;
        let e2c = t2 * e2;
        let r1 = rot(&e1c)?;
        let r2 = rot(&e2c)?;
        let e1n = r1 * e1c;
        let e2n = r2 * e2c;

        let f = r2 * t2_inv.transpose() * fmat * t1_inv * r1.transpose();
        Ok(Self {
            f1: e1n.z / e1n.x,
            f2: e2n.z / e2n.x,
            a: f[(1, 1)],
            b: f[(1, 2)],
            c: f[(2, 1)],
            d: f[(2, 2)],
            back1: t1_inv * r1.transpose(),
            back2: t2_inv * r2.transpose(),
            scale,
        })
    }

    /// Squared distances (image 1, image 2) from the measurements to the
    /// epipolar line pair `t`, in pixels². `None` is the `t → ∞` limit.
    fn squared_distances(&self, t: Option<f64>) -> (f64, f64) {
        let Self { f1, f2, a, b, c, d, .. } = *self;
        let s2 = self.scale * self.scale;
        match t {
            Some(t) => {
                let g = c * t + d;
                let h = a * t + b;
                (
                    t * t / (1.0 + f1 * f1 * t * t) / s2,
                    g * g / (h * h + f2 * f2 * g * g) / s2,
                )
            }
            None => (1.0 / (f1 * f1) / s2, c * c / (a * a + f2 * f2 * c * c) / s2),
        }
    }

    pub fn l2_cost(&self, t: Option<f64>) -> f64 {
        let (a, b) = self.squared_distances(t);
        a + b
    }

    pub fn l1_cost(&self, t: Option<f64>) -> f64 {
        let (a, b) = self.squared_distances(t);
        a.sqrt() + b.sqrt()
    }

    /// Stationarity polynomial of the L2 cost (degree 6).
    pub fn l2_polynomial(&self) -> Polynomial {
        let Self { f1, f2, a, b, c, d, .. } = *self;
        let t = Polynomial::linear(0.0, 1.0);
        let h = Polynomial::linear(b, a);
        let g = Polynomial::linear(d, c);
        let q = &(&h * &h) + &(&g * &g).scale(f2 * f2);
        let w = Polynomial::new(vec![1.0, 0.0, f1 * f1]);
        let lhs = &t * &q.pow(2);
        let rhs = (&(&w.pow(2) * &h) * &g).scale(a * d - b * c);
        &lhs - &rhs
    }

    /// Squared stationarity condition of the L1 cost (degree 8).
    pub fn l1_polynomial(&self) -> Polynomial {
        let Self { f1, f2, a, b, c, d, .. } = *self;
        let h = Polynomial::linear(b, a);
        let g = Polynomial::linear(d, c);
        let q = &(&h * &h) + &(&g * &g).scale(f2 * f2);
        let w = Polynomial::new(vec![1.0, 0.0, f1 * f1]);
        let det = a * d - b * c;
        let lhs = (&(&h * &h) * &w.pow(3)).scale(det * det);
        &lhs - &q.pow(3)
    }

    /// Points where one of the L1 terms vanishes (the cost is not smooth there).
    pub fn l1_kinks(&self) -> Vec<f64> {
        let mut k = vec![0.0];
        if self.c != 0.0 {
            k.push(-self.d / self.c);
        }
        k
    }

    /// Measurements moved onto the epipolar line pair `t`.
    pub fn corrected(&self, t: Option<f64>) -> (Pixel, Pixel) {
        let Self { f1, f2, a, b, c, d, .. } = *self;
        let (l1, l2) = match t {
            Some(t) => (
                Vector3::new(t * f1, 1.0, -t),
                Vector3::new(-f2 * (c * t + d), a * t + b, c * t + d),
            ),
            None => (Vector3::new(f1, 0.0, -1.0), Vector3::new(-f2 * c, a, c)),
        };
        (
            from_h(&(self.back1 * foot_from_origin(&l1))),
            from_h(&(self.back2 * foot_from_origin(&l2))),
        )
    }

    fn minimize(&self, cost: impl Fn(Option<f64>) -> f64, candidates: Vec<f64>) -> Option<f64> {
        let mut best = (cost(None), None);
        for t in candidates {
            let c = cost(Some(t));
            if c < best.0 || best.0.is_nan() {
                best = (c, Some(t));
            }
        }
        best.1
    }

    /// Parameter of the L2-optimal epipolar line pair.
    pub fn l2_optimum(&self) -> Option<f64> {
        let roots = self.l2_polynomial().trimmed(LEADING_TRIM).real_roots();
        self.minimize(|t| self.l2_cost(t), roots)
    }

    /// Parameter of the L1-optimal epipolar line pair.
    pub fn l1_optimum(&self) -> Option<f64> {
        let mut cands = self.l1_polynomial().trimmed(LEADING_TRIM).real_roots();
        cands.extend(self.l1_kinks());
        self.minimize(|t| self.l1_cost(t), cands)
    }
}

fn intersect_corrected(cam1: &Camera, cam2: &Camera, c1: &Pixel, c2: &Pixel) -> Result<TriangulationResult> {
    if !(c1.x.is_finite() && c1.y.is_finite() && c2.x.is_finite() && c2.y.is_finite()) {
        return Err(Error::DegenerateGeometry(
            "corrected measurement at infinity".into(),
        ));
    }
    midpoint(&[cam1.line_of_sight(c1), cam2.line_of_sight(c2)])
}

/// Globally optimal two-view triangulation under the sum of squared
/// reprojection errors.
pub fn l2_twoview(cam1: &Camera, cam2: &Camera, u1: &Pixel, u2: &Pixel) -> Result<TriangulationResult> {
    let (c1, c2) = l2_correct(cam1, cam2, u1, u2)?;
    intersect_corrected(cam1, cam2, &c1, &c2)
}

/// L2-optimal corrected correspondence; satisfies the epipolar constraint.
pub fn l2_correct(cam1: &Camera, cam2: &Camera, u1: &Pixel, u2: &Pixel) -> Result<(Pixel, Pixel)> {
    let pencil = EpipolarPencil::new(cam1, cam2, u1, u2)?;
    Ok(pencil.corrected(pencil.l2_optimum()))
}

/// Globally optimal two-view triangulation under the sum of (unsquared)
/// reprojection distances.
pub fn l1_twoview(cam1: &Camera, cam2: &Camera, u1: &Pixel, u2: &Pixel) -> Result<TriangulationResult> {
    let (c1, c2) = l1_correct(cam1, cam2, u1, u2)?;
    intersect_corrected(cam1, cam2, &c1, &c2)
}

/// L1-optimal corrected correspondence.
pub fn l1_correct(cam1: &Camera, cam2: &Camera, u1: &Pixel, u2: &Pixel) -> Result<(Pixel, Pixel)> {
    let pencil = EpipolarPencil::new(cam1, cam2, u1, u2)?;
    Ok(pencil.corrected(pencil.l1_optimum()))
}
