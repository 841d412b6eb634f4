//! Seeded synthetic scenes and noise.
//!
//! Every random draw comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded
//! with `seed_from_u64(seed)`; independent streams are selected with
//! `set_stream((trial << 16) | lane)`. Trials can therefore run in any order
//! or in parallel and still reproduce a serial run bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal, UnitBall, UnitSphere};

use crate::error::{Error, Result};
use crate::geometry::{Calibration, Camera, Pixel, Point3, Pose, Rotation, Vec3};

pub type Seed = u64;

/// Stream lanes used by the generators and experiments.
pub mod lane {
    pub const POINTS: u64 = 0;
    pub const PIXELS: u64 = 1;
    /// Pose perturbation of camera `k` uses `CAMERA + k`.
    pub const CAMERA: u64 = 16;
}

pub const IMAGE_WIDTH: u32 = 640;
pub const IMAGE_HEIGHT: u32 = 480;
pub const SPHERE_RADIUS: f64 = 0.25;
pub const BOX_HALF_EXTENTS: [f64; 3] = [1.5, 4.0, 3.0];
pub const BOX_CENTERS: [[f64; 3]; 3] = [[-7.0, 3.0, 0.0], [-10.0, -3.0, 1.0], [-8.0, 0.0, -2.0]];

/// Independent generator for one (trial, lane) pair.
pub fn stream_rng(seed: Seed, trial: u64, lane: u64) -> ChaCha8Rng {
    assert!(trial < 1 << 48 && lane < 1 << 16, "stream index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 16) | lane);
    rng
}

/// The shared intrinsics of all synthetic cameras.
pub fn paper_calibration() -> Calibration {
    Calibration::new(300.0, 300.0, 320.0, 240.0, 0.0).expect("valid constants")
}

fn synthetic_camera(pose: Pose) -> Camera {
    Camera::new(paper_calibration(), pose, IMAGE_WIDTH, IMAGE_HEIGHT).expect("valid constants")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Per-axis center noise at level 1, scene units.
    pub sigma_center: f64,
    /// Rotation angle noise at level 1, degrees.
    pub sigma_angle: f64,
    pub sigma_pixel: f64,
    pub level: f64,
}

impl NoiseSpec {
    pub fn new(sigma_center: f64, sigma_angle: f64, sigma_pixel: f64, level: f64) -> Result<Self> {
        if [sigma_center, sigma_angle, sigma_pixel, level]
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(Error::InvalidInput("noise parameters must be finite and non-negative".into()));
        }
        Ok(Self {
            sigma_center,
            sigma_angle,
            sigma_pixel,
            level,
        })
    }

    /// Pose noise of the sensitivity experiments; pixels stay exact.
    pub fn sensitivity(level: f64) -> Result<Self> {
        Self::new(0.01, 0.1, 0.0, level)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub cameras: Vec<Camera>,
    pub points: Vec<Point3>,
    pub label: String,
}

impl Scene {
    /// Noise-free pixels, indexed `[point][camera]`.
    pub fn project(&self) -> Result<Vec<Vec<Pixel>>> {
        self.points
            .iter()
            .map(|p| self.cameras.iter().map(|c| c.project(p)).collect())
            .collect()
    }
}

/// Camera pairs of the sensitivity experiments.
///
/// In configuration 3 both optical axes point along +x.
pub fn make_conf(id: u8) -> Result<[Camera; 2]> {
    let (c1, c2, targets) = match id {
        1 => ([-5.0, -1.0, 0.0], [-5.0, 1.0, 0.0], None),
        2 => ([-12.0, 0.0, 0.0], [-2.0, 0.0, 0.0], None),
        3 => ([-10.0, 2.0, -1.0], [-5.0, -2.0, 1.0], Some(Vec3::x())),
        _ => return Err(Error::InvalidInput(format!("unknown configuration {id}"))),
    };
    let make = |c: [f64; 3]| -> Result<Camera> {
        let center = Point3::from(c);
        let target = match targets {
            Some(axis) => center + axis,
            None => Point3::origin(),
        };
        Ok(synthetic_camera(Pose::look_at(center, target)?))
    };
    Ok([make(c1)?, make(c2)?])
}

/// Box scene: cameras looking at the origin, points uniform in the box.
pub fn make_box_scene(seed: Seed, n_cameras: usize, n_points: usize) -> Result<Scene> {
    make_box_scene_for_trial(seed, 0, n_cameras, n_points)
}

pub fn make_box_scene_for_trial(seed: Seed, trial: u64, n_cameras: usize, n_points: usize) -> Result<Scene> {
    if !(2..=3).contains(&n_cameras) {
        return Err(Error::InvalidInput(format!("box scene has 2 or 3 cameras, not {n_cameras}")));
    }
    let cameras = BOX_CENTERS[..n_cameras]
        .iter()
        .map(|c| Pose::look_at(Point3::from(*c), Point3::origin()).map(synthetic_camera))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = stream_rng(seed, trial, lane::POINTS);
    let [hx, hy, hz] = BOX_HALF_EXTENTS;
    let points = (0..n_points)
        .map(|_| Point3::new(rng.random_range(-hx..=hx), rng.random_range(-hy..=hy), rng.random_range(-hz..=hz)))
        .collect();
    Ok(Scene {
        cameras,
        points,
        label: format!("box-{n_cameras}cam"),
    })
}

/// Uniform samples in the ball of radius 0.25 about the origin.
pub fn sample_sphere_points(rng: &mut impl Rng, n: usize) -> Vec<Point3> {
    (0..n)
        .map(|_| {
            let [x, y, z]: [f64; 3] = UnitBall.sample(rng);
            Point3::new(x, y, z) * SPHERE_RADIUS
        })
        .collect()
}

fn gaussian(rng: &mut impl Rng, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, sigma).expect("sigma checked finite").sample(rng)
}

/// Gaussian center offset plus a rotation about a uniform random axis by a
/// Gaussian angle, applied on the left of the world-to-camera rotation.
pub fn perturb_pose(pose: &Pose, noise: &NoiseSpec, rng: &mut impl Rng) -> Pose {
    let sc = noise.sigma_center * noise.level;
    let offset = Vec3::new(gaussian(rng, sc), gaussian(rng, sc), gaussian(rng, sc));
    let [x, y, z]: [f64; 3] = UnitSphere.sample(rng);
    let angle = gaussian(rng, (noise.sigma_angle * noise.level).to_radians());
    let tilt = Rotation::from_axis_angle(&nalgebra::Unit::new_unchecked(Vec3::new(x, y, z)), angle);
    Pose::new(tilt * pose.rotation, pose.center + offset)
}

/// Independent Gaussian noise on each coordinate; no clipping to the image.
pub fn perturb_pixels(pixels: &[Pixel], sigma_pixel: f64, rng: &mut impl Rng) -> Vec<Pixel> {
    if sigma_pixel == 0.0 {
        return pixels.to_vec();
    }
    pixels
        .iter()
        .map(|p| {
            let dx: f64 = rng.sample(StandardNormal);
            let dy: f64 = rng.sample(StandardNormal);
            Pixel::new(p.x + sigma_pixel * dx, p.y + sigma_pixel * dy)
        })
        .collect()
}
