//! Similarity alignment of a reconstruction to ground truth, and the error
//! metrics evaluated on the aligned result.

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::geometry::{Point3, Rotation, Vec3};

/// Cross-covariance singular values below this fraction of the largest count
/// as zero when checking for collinear input.
pub const RANK_TOL: f64 = 1e-12;

/// `p ↦ s R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityTransform {
    pub scale: f64,
    pub rotation: Rotation,
    pub translation: Vec3,
}

impl SimilarityTransform {
    pub fn identity() -> Self {
        Self {
            scale: 1.0,
            rotation: Rotation::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        Point3::from(self.scale * (self.rotation * p.coords) + self.translation)
    }

    pub fn apply_all(&self, points: &[Point3]) -> Vec<Point3> {
        points.iter().map(|p| self.apply(p)).collect()
    }

    /// Sum of squared distances between the transformed estimates and `gt`.
    pub fn objective(&self, est: &[Point3], gt: &[Point3]) -> f64 {
        est.iter()
            .zip(gt)
            .map(|(e, g)| (self.apply(e) - g).norm_squared())
            .sum()
    }
}

fn centroid(points: &[Point3]) -> Vec3 {
    points.iter().map(|p| p.coords).sum::<Vec3>() / points.len() as f64
}

/// Least-squares similarity taking `est` onto `gt` (Umeyama's closed form).
pub fn fit_similarity(est: &[Point3], gt: &[Point3]) -> Result<SimilarityTransform> {
    if est.len() != gt.len() {
        return Err(Error::InvalidInput(format!(
            "{} estimated points for {} ground-truth points",
            est.len(),
            gt.len()
        )));
    }
    if est.len() < 3 {
        return Err(Error::DegenerateConfiguration(format!(
            "alignment needs 3 points, got {}",
            est.len()
        )));
    }
    let n = est.len() as f64;
    let me = centroid(est);
    let mg = centroid(gt);
    let mut cov = Matrix3::zeros();
    let mut var_e = 0.0;
    for (e, g) in est.iter().zip(gt) {
        let de = e.coords - me;
        cov += (g.coords - mg) * de.transpose();
        var_e += de.norm_squared();
    }
    cov /= n;
    var_e /= n;

    let svd = cov.svd(true, true);
    let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let mut d = svd.singular_values;
    // nalgebra does not promise an order.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    if !(d[order[1]] > RANK_TOL * d[order[0]]) || var_e <= 0.0 {
        return Err(Error::DegenerateConfiguration(
            "alignment points are collinear or coincident".into(),
        ));
    }
    let mut sign = Vec3::new(1.0, 1.0, 1.0);
    if u.determinant() * v_t.determinant() < 0.0 {
        sign[order[2]] = -1.0;
    }
    let r = u * Matrix3::from_diagonal(&sign) * v_t;
    d.component_mul_assign(&sign);
    let scale = d.sum() / var_e;
    let rotation = Rotation::from_matrix_unchecked(r);
    let translation = mg - scale * (rotation * me);
    Ok(SimilarityTransform {
        scale,
        rotation,
        translation,
    })
}

pub fn position_error(est: &Point3, gt: &Point3) -> f64 {
    (est - gt).norm()
}

pub fn distance_error(est1: &Point3, est2: &Point3, gt1: &Point3, gt2: &Point3) -> f64 {
    ((gt1 - gt2).norm() - (est1 - est2).norm()).abs()
}

fn angle_at(p1: &Point3, p2: &Point3, p3: &Point3) -> Result<f64> {
    let a = p2 - p1;
    let b = p3 - p1;
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateAngle);
    }
    Ok((a.dot(&b) / (na * nb)).clamp(-1.0, 1.0).acos())
}

/// Difference of the angles at `p₁` spanned by `p₂` and `p₃`, in radians.
pub fn angle_error(est: [&Point3; 3], gt: [&Point3; 3]) -> Result<f64> {
    Ok((angle_at(est[0], est[1], est[2])? - angle_at(gt[0], gt[1], gt[2])?).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

pub fn aggregate(values: &[f64]) -> Result<ErrorStats> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let median = if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    };
    Ok(ErrorStats {
        mean,
        std,
        median,
        min: sorted[0],
        max: sorted[m - 1],
    })
}
