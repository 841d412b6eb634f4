//! Calibrated relative pose from bearing correspondences.
//!
//! Convention: camera-2 coordinates of a point are `x₂ = R x₁ + t`, the
//! essential matrix is `E = [t]ₓ R` and correspondences satisfy `b₂ᵀ E b₁ = 0`.

use nalgebra::{DMatrix, Matrix3};

use crate::error::{Error, Result};
use crate::geometry::{angle_between, rotation_angle_between, skew, Ray, Rotation, Vec3};
use crate::triangulation::midpoint;

/// Relative tolerance on the essential-matrix singular value structure.
pub const ESSENTIAL_TOL: f64 = 1e-9;

/// The design matrix is rank-deficient (more than one null direction) when
/// its second-smallest singular value is below this fraction of the largest.
pub const NULL_SPACE_TOL: f64 = 1e-8;

/// Above this `σ₉ / σ₈` ratio the eight-point fit is flagged as noisy.
pub const NOISY_FIT_RATIO: f64 = 1e-4;

/// Candidates closer than this (radians, rotation and direction) count as the
/// same pose when breaking cheirality ties.
pub const SAME_POSE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssentialMatrix(Matrix3<f64>);

impl EssentialMatrix {
    /// Checks the `(σ, σ, 0)` structure and rescales to Frobenius norm √2.
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let sv = sorted_singular_values(&m);
        if !(sv[0] > 0.0)
            || (sv[0] - sv[1]).abs() > ESSENTIAL_TOL * sv[0]
            || sv[2] > ESSENTIAL_TOL * sv[0]
        {
            return Err(Error::InvalidInput(format!(
                "not an essential matrix (singular values {sv:?})"
            )));
        }
        Ok(Self(m * (2f64.sqrt() / m.norm())))
    }

    /// `[t]ₓ R`, normalized.
    pub fn from_pose(rotation: &Rotation, translation: &Vec3) -> Result<Self> {
        Self::new(skew(translation) * rotation.matrix())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn residual(&self, b1: &Vec3, b2: &Vec3) -> f64 {
        b2.dot(&(self.0 * b1))
    }
}

fn sorted_singular_values(m: &Matrix3<f64>) -> [f64; 3] {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    [sv[0], sv[1], sv[2]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativePose {
    /// Camera-1 to camera-2 rotation.
    pub rotation: Rotation,
    /// Unit vector from camera 1 toward camera 2's center, in camera 1's
    /// frame.
    pub direction: Vec3,
}

impl RelativePose {
    pub fn new(rotation: Rotation, direction: Vec3) -> Result<Self> {
        let n = direction.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidInput("relative direction must be nonzero".into()));
        }
        Ok(Self {
            rotation,
            direction: direction / n,
        })
    }

    /// Unit translation `t` of `x₂ = R x₁ + t`.
    pub fn translation(&self) -> Vec3 {
        -(self.rotation * self.direction)
    }

    pub fn essential(&self) -> EssentialMatrix {
        EssentialMatrix(skew(&self.translation()) * self.rotation.matrix())
    }

    /// Camera 2 expressed as a pose with camera 1 at the identity and unit
    /// baseline.
    pub fn second_camera_pose(&self) -> crate::geometry::Pose {
        crate::geometry::Pose::new(self.rotation, crate::geometry::Point3::from(self.direction))
    }

    fn close_to(&self, other: &RelativePose) -> bool {
        rotation_angle_between(&self.rotation, &other.rotation) <= SAME_POSE_TOL
            && angle_between(&self.direction, &other.direction) <= SAME_POSE_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssentialEstimate {
    pub essential: EssentialMatrix,
    /// `σ₉ / σ₈` of the design matrix; near zero for consistent data.
    pub null_ratio: f64,
}

impl EssentialEstimate {
    pub fn is_noisy(&self) -> bool {
        self.null_ratio > NOISY_FIT_RATIO
    }
}

/// Translation and scaling taking the points' centroid to the origin with
/// mean distance √2.
fn normalizing_transform(pts: &[(f64, f64)]) -> Matrix3<f64> {
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(x, y), p| (x + p.0 / n, y + p.1 / n));
    let mean_dist = pts
        .iter()
        .map(|p| ((p.0 - mx).powi(2) + (p.1 - my).powi(2)).sqrt())
        .sum::<f64>()
        / n;
    let s = if mean_dist > 0.0 {
        2f64.sqrt() / mean_dist
    } else {
        1.0
    };
    Matrix3::new(s, 0.0, -s * mx, 0.0, s, -s * my, 0.0, 0.0, 1.0)
}

fn dehomogenize(bearings: &[Vec3]) -> Result<Vec<(f64, f64)>> {
    bearings
        .iter()
        .map(|b| {
            if b.z > 1e-12 {
                Ok((b.x / b.z, b.y / b.z))
            } else {
                Err(Error::InvalidInput(
                    "bearing without positive forward component".into(),
                ))
            }
        })
        .collect()
}

/// Linear eight-point estimate of the essential matrix, projected onto the
/// essential manifold.
pub fn estimate_essential(bearings1: &[Vec3], bearings2: &[Vec3]) -> Result<EssentialEstimate> {
    let n = bearings1.len();
    if n != bearings2.len() {
        return Err(Error::InvalidInput(format!(
            "bearing lists differ in length ({n} vs {})",
            bearings2.len()
        )));
    }
    if n < 8 {
        return Err(Error::InvalidInput(format!(
            "eight-point estimation needs at least 8 correspondences, got {n}"
        )));
    }
    let x1 = dehomogenize(bearings1)?;
    let x2 = dehomogenize(bearings2)?;
    let t1 = normalizing_transform(&x1);
    let t2 = normalizing_transform(&x2);

    // At least 9 rows so the SVD exposes the full right singular basis.
    let mut design = DMatrix::zeros(n.max(9), 9);
    for (k, (p, q)) in x1.iter().zip(&x2).enumerate() {
        let a = t1 * Vec3::new(p.0, p.1, 1.0);
        let b = t2 * Vec3::new(q.0, q.1, 1.0);
        for i in 0..3 {
            for j in 0..3 {
                design[(k, 3 * i + j)] = b[i] * a[j];
            }
        }
    }
    let svd = design.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv = |k: usize| svd.singular_values[order[k]];
    let (s1, s8, s9) = (sv(0), sv(7), sv(8));
    if !(s8 > NULL_SPACE_TOL * s1) {
        return Err(Error::DegenerateConfiguration(format!(
            "epipolar design matrix has a multi-dimensional null space (σ8/σ1 = {:e})",
            s8 / s1
        )));
    }
    let null = v_t.row(order[8]);
    let e_norm = Matrix3::from_fn(|i, j| null[3 * i + j]);
    let e = t2.transpose() * e_norm * t1;

    let svd = e.svd(true, true);
    let (u, v_t) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    // Rebuild with singular values (1, 1, 0), i.e. Frobenius norm √2.
    let mut m = Matrix3::zeros();
    for &k in &idx[..2] {
        m += u.column(k) * v_t.row(k);
    }
    Ok(EssentialEstimate {
        essential: EssentialMatrix(m),
        null_ratio: s9 / s8,
    })
}

/// The four `(R, t)` factorizations of an essential matrix, ordered
/// `(Ra, t)`, `(Ra, -t)`, `(Rb, t)`, `(Rb, -t)`.
pub fn decompose_essential(e: &EssentialMatrix) -> [RelativePose; 4] {
    let svd = e.0.svd(true, true);
    let (mut u, mut v_t) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
    // Move the null direction to the last slot.
    let k0 = (0..3)
        .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
        .expect("three singular values");
    if k0 != 2 {
        u.swap_columns(k0, 2);
        v_t.swap_rows(k0, 2);
    }
    if u.determinant() < 0.0 {
        u.column_mut(2).neg_mut();
    }
    if v_t.determinant() < 0.0 {
        v_t.row_mut(2).neg_mut();
    }
    let w = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
    let ra = Rotation::from_matrix_unchecked(u * w * v_t);
    let rb = Rotation::from_matrix_unchecked(u * w.transpose() * v_t);
    let t: Vec3 = u.column(2).into_owned().normalize();
    let pose = |r: Rotation, t: Vec3| RelativePose {
        rotation: r,
        direction: -(r.inverse() * t),
    };
    [pose(ra, t), pose(ra, -t), pose(rb, t), pose(rb, -t)]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseSelection {
    pub pose: RelativePose,
    pub index: usize,
    /// Correspondences in front of both cameras, per candidate.
    pub counts: [usize; 4],
    /// Set when several candidates reached the best count but describe the
    /// same pose, and the lowest index was taken.
    pub tie_broken: bool,
}

/// Depths of a correspondence along its bearings, triangulated under `pose`
/// with camera 1 at the identity.
pub fn correspondence_depths(pose: &RelativePose, b1: &Vec3, b2: &Vec3) -> Option<(f64, f64)> {
    let origin2 = crate::geometry::Point3::from(pose.direction);
    let rays = [
        Ray::new(crate::geometry::Point3::origin(), *b1).ok()?,
        Ray::new(origin2, pose.rotation.inverse() * b2).ok()?,
    ];
    let p = midpoint(&rays).ok()?.point;
    let x2 = pose.rotation * p.coords + pose.translation();
    Some((b1.dot(&p.coords), b2.dot(&x2)))
}

/// Picks the candidate that puts the most correspondences in front of both
/// cameras.
pub fn select_pose(candidates: &[RelativePose; 4], bearings1: &[Vec3], bearings2: &[Vec3]) -> Result<PoseSelection> {
    if bearings1.is_empty() || bearings1.len() != bearings2.len() {
        return Err(Error::InvalidInput(
            "cheirality test needs matching, non-empty bearing lists".into(),
        ));
    }
    let mut counts = [0usize; 4];
    for (cand, count) in candidates.iter().zip(&mut counts) {
        *count = bearings1
            .iter()
            .zip(bearings2)
            .filter(|(b1, b2)| {
                correspondence_depths(cand, b1, b2).is_some_and(|(z1, z2)| z1 > 0.0 && z2 > 0.0)
            })
            .count();
    }
    let best = *counts.iter().max().expect("four candidates");
    let tied: Vec<usize> = (0..4).filter(|&i| counts[i] == best).collect();
    let index = tied[0];
    if tied[1..]
        .iter()
        .any(|&i| !candidates[i].close_to(&candidates[index]))
    {
        return Err(Error::AmbiguousCheirality { counts });
    }
    Ok(PoseSelection {
        pose: candidates[index],
        index,
        counts,
        tie_broken: tied.len() > 1,
    })
}

/// Eight-point estimate, decomposition and cheirality selection in one call.
pub fn relative_pose(bearings1: &[Vec3], bearings2: &[Vec3]) -> Result<(EssentialEstimate, PoseSelection)> {
    let est = estimate_essential(bearings1, bearings2)?;
    let sel = select_pose(&decompose_essential(&est.essential), bearings1, bearings2)?;
    Ok((est, sel))
}
