//! Pinhole camera model and the basic value types shared by every solver.
//!
//! Camera frame: z forward, x right, y down. A pose stores the world-to-camera
//! rotation `R` and the camera center `c`, so a world point `p` has camera
//! coordinates `R (p - c)` and the camera matrix is `K [R | -R c]`.

use nalgebra::{Matrix3, Matrix3x4, Point2, Rotation3, Vector3};

use crate::error::{Error, Result};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vec3 = Vector3<f64>;
pub type Pixel = Point2<f64>;
pub type Rotation = Rotation3<f64>;

/// Tolerance on `RᵀR = I` and `det R = 1`.
pub const ROTATION_TOL: f64 = 1e-9;

/// Wraps a 3×3 matrix as a rotation after checking it is proper orthonormal.
pub fn rotation_from_matrix(m: Matrix3<f64>) -> Result<Rotation> {
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput("rotation has non-finite entries".into()));
    }
    let ortho = (m.transpose() * m - Matrix3::identity()).abs().max();
    let det = m.determinant();
    if ortho > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
        return Err(Error::InvalidInput(format!(
            "not a rotation (orthogonality error {ortho:e}, determinant {det})"
        )));
    }
    Ok(Rotation::from_matrix_unchecked(m))
}

/// Nearest proper rotation in Frobenius norm.
pub fn project_to_rotation(m: &Matrix3<f64>) -> Rotation {
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    let mut d = Matrix3::identity();
    if (u * v_t).determinant() < 0.0 {
        // Flip the weakest direction; nalgebra does not sort singular values.
        d[(svd.singular_values.imin(), svd.singular_values.imin())] = -1.0;
    }
    Rotation::from_matrix_unchecked(u * d * v_t)
}

/// Geodesic distance between two rotations, in radians.
pub fn rotation_angle_between(a: &Rotation, b: &Rotation) -> f64 {
    let rel = a.matrix().transpose() * b.matrix();
    let c = (rel.trace() - 1.0) / 2.0;
    let s = Vec3::new(
        rel[(2, 1)] - rel[(1, 2)],
        rel[(0, 2)] - rel[(2, 0)],
        rel[(1, 0)] - rel[(0, 1)],
    )
    .norm()
        / 2.0;
    s.atan2(c)
}

/// Angle between two nonzero vectors, in radians.
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    // atan2 form stays accurate for nearly parallel vectors.
    a.cross(b).norm().atan2(a.dot(b))
}

pub fn skew(v: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub skew: f64,
}

impl Calibration {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, skew: f64) -> Result<Self> {
        let all_finite = [fx, fy, cx, cy, skew].iter().all(|v| v.is_finite());
        if !all_finite || fx <= 0.0 || fy <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "calibration needs finite values and positive focal lengths (fx={fx}, fy={fy})"
            )));
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            skew,
        })
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.fx, self.skew, self.cx, //
            0.0, self.fy, self.cy, //
            0.0, 0.0, 1.0,
        )
    }

    pub fn inverse_matrix(&self) -> Matrix3<f64> {
        let (fx, fy, s) = (self.fx, self.fy, self.skew);
        Matrix3::new(
            1.0 / fx,
            -s / (fx * fy),
            (s * self.cy - self.cx * fy) / (fx * fy),
            0.0,
            1.0 / fy,
            -self.cy / fy,
            0.0,
            0.0,
            1.0,
        )
    }

    /// `K⁻¹ [u; v; 1]`, the normalized image point with unit z.
    pub fn normalize(&self, pixel: &Pixel) -> Vec3 {
        let y = (pixel.y - self.cy) / self.fy;
        let x = (pixel.x - self.cx - self.skew * y) / self.fx;
        Vec3::new(x, y, 1.0)
    }

    /// Pixel of a camera-frame direction with positive z.
    pub fn denormalize(&self, x: f64, y: f64) -> Pixel {
        Pixel::new(self.fx * x + self.skew * y + self.cx, self.fy * y + self.cy)
    }
}

/// Unit camera-frame direction toward a pixel, with positive z.
pub fn bearing(calib: &Calibration, pixel: &Pixel) -> Vec3 {
    calib.normalize(pixel).normalize()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    /// World-to-camera rotation.
    pub rotation: Rotation,
    /// Camera center in world coordinates.
    pub center: Point3,
}

impl Pose {
    pub fn new(rotation: Rotation, center: Point3) -> Self {
        Self { rotation, center }
    }

    pub fn identity() -> Self {
        Self::new(Rotation::identity(), Point3::origin())
    }

    /// Camera at `center` with its optical axis toward `target`.
    ///
    /// Roll is fixed by keeping world +z "up" in the image (image y points
    /// away from it); when the axis is within 1e-6 of ±z, world +y is used.
    pub fn look_at(center: Point3, target: Point3) -> Result<Self> {
        let axis = target - center;
        let norm = axis.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidInput(
                "look-at target coincides with the camera center".into(),
            ));
        }
        let z = axis / norm;
        let mut up = Vec3::z();
        if z.cross(&up).norm() < 1e-6 {
            up = Vec3::y();
        }
        let up_ortho = (up - z * z.dot(&up)).normalize();
        let y = -up_ortho;
        let x = y.cross(&z);
        let m = Matrix3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]);
        Ok(Self::new(Rotation::from_matrix_unchecked(m), center))
    }

    pub fn to_camera(&self, p: &Point3) -> Vec3 {
        self.rotation * (p - self.center)
    }

    pub fn to_world_direction(&self, d: &Vec3) -> Vec3 {
        self.rotation.inverse() * d
    }

    /// Optical axis in world coordinates.
    pub fn optical_axis(&self) -> Vec3 {
        self.to_world_direction(&Vec3::z())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub calib: Calibration,
    pub pose: Pose,
    pub width: u32,
    pub height: u32,
}

impl Camera {
    pub fn new(calib: Calibration, pose: Pose, width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput("image size must be positive".into()));
        }
        Ok(Self {
            calib,
            pose,
            width,
            height,
        })
    }

    pub fn center(&self) -> Point3 {
        self.pose.center
    }

    /// The 3×4 camera matrix `K [R | -R c]`.
    pub fn matrix(&self) -> Matrix3x4<f64> {
        let r = self.pose.rotation.matrix();
        let t = -(r * self.pose.center.coords);
        let mut rt = Matrix3x4::zeros();
        rt.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
        rt.set_column(3, &t);
        self.calib.matrix() * rt
    }

    /// Depth of a world point along the optical axis.
    pub fn depth(&self, p: &Point3) -> f64 {
        self.pose.to_camera(p).z
    }

    /// Projects a world point to inhomogeneous pixel coordinates. No clamping
    /// to the image bounds is applied.
    pub fn project(&self, p: &Point3) -> Result<Pixel> {
        let x = self.pose.to_camera(p);
        if !(x.z > 0.0) {
            return Err(Error::CheiralityViolation);
        }
        Ok(self.calib.denormalize(x.x / x.z, x.y / x.z))
    }

    /// Projection without the cheirality check; `None` only when the point
    /// lies in the camera's principal plane.
    pub fn project_unchecked(&self, p: &Point3) -> Option<Pixel> {
        let x = self.pose.to_camera(p);
        if x.z == 0.0 || !x.z.is_finite() {
            return None;
        }
        Some(self.calib.denormalize(x.x / x.z, x.y / x.z))
    }

    pub fn bearing(&self, pixel: &Pixel) -> Vec3 {
        bearing(&self.calib, pixel)
    }

    /// Ray from the camera center through a pixel, pointing in front of the
    /// camera.
    pub fn line_of_sight(&self, pixel: &Pixel) -> Ray {
        let d = self.pose.to_world_direction(&self.calib.normalize(pixel));
        Ray {
            origin: self.pose.center,
            direction: d.normalize(),
        }
    }

    pub fn in_image(&self, pixel: &Pixel) -> bool {
        pixel.x >= 0.0
            && pixel.y >= 0.0
            && pixel.x < self.width as f64
            && pixel.y < self.height as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Point3,
    /// Unit length.
    pub direction: Vec3,
}

impl Ray {
    pub fn new(origin: Point3, direction: Vec3) -> Result<Self> {
        let n = direction.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidInput("ray direction must be nonzero".into()));
        }
        Ok(Self {
            origin,
            direction: direction / n,
        })
    }

    pub fn point_at(&self, t: f64) -> Point3 {
        self.origin + self.direction * t
    }

    /// Signed distance of the foot of `p` along the ray.
    pub fn depth_of(&self, p: &Point3) -> f64 {
        self.direction.dot(&(p - self.origin))
    }

    pub fn distance_to(&self, p: &Point3) -> f64 {
        let v = p - self.origin;
        (v - self.direction * self.direction.dot(&v)).norm()
    }
}
