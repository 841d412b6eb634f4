//! Sensitivity of triangulation to camera pose noise.
//!
//! Each (level, trial) unit samples points in the small sphere at the origin,
//! projects them with the true cameras, perturbs the camera poses and
//! triangulates with every method from the true pixels. Errors are measured
//! in the world frame without alignment.

use rayon::prelude::*;

use super::methods::Method;
use super::records::{join_notes, ErrorKind, TrialRecord};
use crate::alignment::{angle_error, distance_error, position_error};
use crate::error::{Error, Result};
use crate::geometry::{Camera, Pixel, Point3, Pose};
use crate::synth::{lane, make_conf, perturb_pixels, perturb_pose, sample_sphere_points, stream_rng, NoiseSpec, Seed};

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityConfig {
    pub conf: u8,
    pub kind: ErrorKind,
    pub levels: Vec<f64>,
    pub trials: u64,
    pub methods: Vec<Method>,
    pub seed: Seed,
    /// Per-axis center noise at level 1.
    pub sigma_center: f64,
    /// Rotation angle noise at level 1, degrees.
    pub sigma_angle: f64,
    /// Pixel noise, not scaled by the level. Zero by default.
    pub sigma_pixel: f64,
    /// Trials (by global index) forced to fail, for isolation tests.
    pub inject_failures: Vec<u64>,
}

impl SensitivityConfig {
    pub fn new(conf: u8, kind: ErrorKind) -> Self {
        Self {
            conf,
            kind,
            levels: (1..=10).map(f64::from).collect(),
            trials: 100,
            methods: Method::default_set(2),
            seed: 0,
            sigma_center: 0.01,
            sigma_angle: 0.1,
            sigma_pixel: 0.0,
            inject_failures: vec![],
        }
    }

    pub fn experiment_id(&self) -> String {
        format!("sensitivity-conf{}-{}", self.conf, self.kind)
    }
}

fn points_for(kind: ErrorKind) -> Result<usize> {
    match kind {
        ErrorKind::Position => Ok(1),
        ErrorKind::Distance => Ok(2),
        ErrorKind::Angle => Ok(3),
        ErrorKind::Aligned3d => Err(Error::InvalidInput("sensitivity runs measure position, distance or angle".into())),
    }
}

fn error_of(kind: ErrorKind, est: &[Point3], gt: &[Point3]) -> Result<f64> {
    match kind {
        ErrorKind::Position => Ok(position_error(&est[0], &gt[0])),
        ErrorKind::Distance => Ok(distance_error(&est[0], &est[1], &gt[0], &gt[1])),
        ErrorKind::Angle => angle_error([&est[0], &est[1], &est[2]], [&gt[0], &gt[1], &gt[2]]),
        ErrorKind::Aligned3d => unreachable!("rejected by points_for"),
    }
}

struct Unit {
    level_index: usize,
    level: f64,
    trial: u64,
}

fn run_unit(cfg: &SensitivityConfig, cameras: &[Camera; 2], n_points: usize, u: &Unit) -> Result<Vec<TrialRecord>> {
    // Streams are indexed by a global trial number so every level sees fresh draws.
    let global = u.level_index as u64 * cfg.trials + u.trial;
    let noise = NoiseSpec::new(cfg.sigma_center, cfg.sigma_angle, cfg.sigma_pixel, u.level)?;
    let points = sample_sphere_points(&mut stream_rng(cfg.seed, global, lane::POINTS), n_points);
    let perturbed: Vec<Camera> = cameras
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mut rng = stream_rng(cfg.seed, global, lane::CAMERA + k as u64);
            let pose: Pose = perturb_pose(&c.pose, &noise, &mut rng);
            Camera { pose, ..*c }
        })
        .collect();
    let mut pixel_rng = stream_rng(cfg.seed, global, lane::PIXELS);
    let observations: Vec<Vec<Pixel>> = points
        .iter()
        .map(|p| {
            let clean = cameras.iter().map(|c| c.project(p)).collect::<Result<Vec<_>>>()?;
            Ok(perturb_pixels(&clean, cfg.sigma_pixel, &mut pixel_rng))
        })
        .collect::<Result<_>>()?;

    let records = cfg
        .methods
        .iter()
        .map(|&m| {
            let outcome = if cfg.inject_failures.contains(&global) {
                Err(Error::InvalidInput("injected failure".into()))
            } else {
                evaluate(cfg.kind, m, &perturbed, &observations, &points)
            };
            let mut notes = String::new();
            if cfg.conf == 3 {
                join_notes(&mut notes, "conf3-axes=+x");
            }
            let (value, converged) = match outcome {
                Ok((v, c)) => (v, c),
                Err(e) => {
                    join_notes(&mut notes, &format!("error={e}"));
                    (f64::NAN, false)
                }
            };
            TrialRecord {
                experiment: cfg.experiment_id(),
                trial: u.trial,
                level: u.level,
                method: m.name().to_string(),
                kind: cfg.kind,
                value,
                converged,
                notes,
            }
        })
        .collect();
    Ok(records)
}

fn evaluate(kind: ErrorKind, m: Method, cameras: &[Camera], obs: &[Vec<Pixel>], gt: &[Point3]) -> Result<(f64, bool)> {
    let mut est = vec![];
    let mut converged = true;
    for px in obs {
        let r = m.triangulate(cameras, px)?;
        converged &= r.converged;
        est.push(r.point);
    }
    let v = error_of(kind, &est, gt)?;
    if !v.is_finite() {
        return Err(Error::DegenerateGeometry("non-finite error".into()));
    }
    Ok((v, converged))
}

/// One record per (level, trial, method). Failed triangulations become
/// records with a NaN value and the error in the notes.
pub fn run_sensitivity(cfg: &SensitivityConfig) -> Result<Vec<TrialRecord>> {
    let n_points = points_for(cfg.kind)?;
    let cameras = make_conf(cfg.conf)?;
    if cfg.methods.is_empty() {
        return Err(Error::InvalidInput("no methods given".into()));
    }
    if let Some(m) = cfg.methods.iter().find(|m| m.two_view_only() && cameras.len() != 2) {
        return Err(Error::InvalidInput(format!("method {m} needs two views")));
    }
    NoiseSpec::new(cfg.sigma_center, cfg.sigma_angle, cfg.sigma_pixel, 0.0)?;
    if let Some(l) = cfg.levels.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
        return Err(Error::InvalidInput(format!("noise level {l} must be finite and non-negative")));
    }
    let units: Vec<Unit> = cfg
        .levels
        .iter()
        .enumerate()
        .flat_map(|(level_index, &level)| (0..cfg.trials).map(move |trial| Unit { level_index, level, trial }))
        .collect();
    let per_unit: Vec<Vec<TrialRecord>> = units
        .par_iter()
        .map(|u| run_unit(cfg, &cameras, n_points, u))
        .collect::<Result<_>>()?;
    Ok(per_unit.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ErrorKind) -> SensitivityConfig {
        SensitivityConfig {
            levels: vec![0.0, 2.0],
            trials: 5,
            ..SensitivityConfig::new(1, kind)
        }
    }

    #[test]
    fn level_zero_is_exact() {
        for conf in 1..=3 {
            for kind in [ErrorKind::Position, ErrorKind::Distance, ErrorKind::Angle] {
                let cfg = SensitivityConfig {
                    conf,
                    levels: vec![0.0],
                    trials: 5,
                    methods: Method::ALL.to_vec(),
                    ..SensitivityConfig::new(conf, kind)
                };
                for r in run_sensitivity(&cfg).unwrap() {
                    assert!(r.value < 1e-9, "{r:?}");
                }
            }
        }
    }

    #[test]
    fn record_count() {
        let cfg = small(ErrorKind::Distance);
        let recs = run_sensitivity(&cfg).unwrap();
        assert_eq!(recs.len(), 2 * 5 * cfg.methods.len());
        assert!(recs.iter().filter(|r| r.level > 0.0).all(|r| r.value > 0.0));
    }

    #[test]
    fn injected_failure_is_isolated() {
        let clean = run_sensitivity(&small(ErrorKind::Angle)).unwrap();
        let cfg = SensitivityConfig {
            inject_failures: vec![7],
            ..small(ErrorKind::Angle)
        };
        let faulty = run_sensitivity(&cfg).unwrap();
        assert_eq!(clean.len(), faulty.len());
        for (a, b) in clean.iter().zip(&faulty) {
            // Global trial 7 is level index 1, trial 2.
            if b.level == 2.0 && b.trial == 2 {
                assert!(b.failed() && !b.converged && b.notes.contains("injected"));
            } else {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn aligned_kind_rejected() {
        assert!(run_sensitivity(&SensitivityConfig::new(1, ErrorKind::Aligned3d)).is_err());
        assert!(run_sensitivity(&SensitivityConfig::new(4, ErrorKind::Position)).is_err());
    }
}
