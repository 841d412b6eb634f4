//! Full reconstruction experiments: estimate poses, triangulate, align to
//! ground truth and record the mean point error.

use std::collections::BTreeMap;

use log::info;
use rand::seq::index;
use rayon::prelude::*;

use super::data::{CorrespondenceSet, Observation};
use super::methods::Method;
use super::pipeline::{estimate_cameras, triangulate_tracks, MIN_PAIR_CORRESPONDENCES};
use super::records::{join_notes, ErrorKind, TrialRecord};
use crate::alignment::{fit_similarity, position_error};
use crate::error::{Error, Result};
use crate::geometry::{Camera, Point3};
use crate::synth::{lane, make_box_scene_for_trial, perturb_pixels, stream_rng, Seed};

/// Mean aligned error of each method on one correspondence set. Poses are
/// estimated once and shared by all methods.
fn evaluate_set(set: &CorrespondenceSet, methods: &[Method]) -> Vec<(Method, Result<(f64, bool)>, String)> {
    let gt = set.ground_truth().expect("sets passed here carry ground truth");
    let estimated = estimate_cameras(set);
    methods
        .iter()
        .map(|&m| {
            let mut notes = String::new();
            if let Some(ext) = m.extension_note() {
                join_notes(&mut notes, ext);
            }
            let outcome = estimated.as_ref().map_err(|e| e.to_string()).and_then(|cams| {
                join_notes(&mut notes, &format!("poses={:016x}", cams.digest()));
                aligned_error(set, cams, gt, m).map_err(|e| e.to_string())
            });
            let outcome = outcome.map_err(Error::InvalidInput);
            (m, outcome, notes)
        })
        .collect()
}

fn aligned_error(
    set: &CorrespondenceSet,
    cams: &super::pipeline::EstimatedCameras,
    gt: &BTreeMap<u64, Point3>,
    m: Method,
) -> Result<(f64, bool)> {
    let (points, converged) = triangulate_tracks(set, cams, m)?;
    let est: Vec<Point3> = points.values().copied().collect();
    let truth: Vec<Point3> = points.keys().map(|id| gt[id]).collect();
    let sim = fit_similarity(&est, &truth)?;
    let mean = est
        .iter()
        .zip(&truth)
        .map(|(e, t)| position_error(&sim.apply(e), t))
        .sum::<f64>()
        / est.len() as f64;
    if !mean.is_finite() {
        return Err(Error::DegenerateGeometry("non-finite reconstruction error".into()));
    }
    Ok((mean, converged))
}

fn to_records(
    experiment: &str,
    trial: u64,
    level: f64,
    results: Vec<(Method, Result<(f64, bool)>, String)>,
    extra_note: &str,
) -> Vec<TrialRecord> {
    results
        .into_iter()
        .map(|(m, outcome, mut notes)| {
            join_notes(&mut notes, extra_note);
            let (value, converged) = match outcome {
                Ok(v) => v,
                Err(e) => {
                    // evaluate_set stringifies errors; strip the wrapper prefix.
                    let msg = e.to_string();
                    let msg = msg.strip_prefix("invalid input: ").unwrap_or(&msg).to_string();
                    join_notes(&mut notes, &format!("error={msg}"));
                    (f64::NAN, false)
                }
            };
            TrialRecord {
                experiment: experiment.to_string(),
                trial,
                level,
                method: m.name().to_string(),
                kind: ErrorKind::Aligned3d,
                value,
                converged,
                notes,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfmSynthConfig {
    pub n_cameras: usize,
    pub trials: u64,
    pub methods: Vec<Method>,
    pub seed: Seed,
    pub pixel_noise: f64,
    pub n_points: usize,
    pub inject_failures: Vec<u64>,
}

impl SfmSynthConfig {
    pub fn new(n_cameras: usize) -> Self {
        Self {
            n_cameras,
            trials: 100,
            methods: Method::default_set(n_cameras),
            seed: 0,
            pixel_noise: 1.0,
            n_points: 20,
            inject_failures: vec![],
        }
    }

    pub fn experiment_id(&self) -> String {
        format!("sfm-synth-{}cam", self.n_cameras)
    }
}

/// The noisy correspondences of one synthetic trial, with ground truth.
/// Camera ids are 0..n, point ids 0..n_points.
pub fn synth_trial_set(cfg: &SfmSynthConfig, trial: u64) -> Result<CorrespondenceSet> {
    if !(cfg.pixel_noise.is_finite() && cfg.pixel_noise >= 0.0) {
        return Err(Error::InvalidInput("pixel noise must be finite and non-negative".into()));
    }
    let scene = make_box_scene_for_trial(cfg.seed, trial, cfg.n_cameras, cfg.n_points)?;
    let clean = scene.project()?;
    let mut rng = stream_rng(cfg.seed, trial, lane::PIXELS);
    let mut obs = vec![];
    for (pid, pixels) in clean.iter().enumerate() {
        for (cid, px) in perturb_pixels(pixels, cfg.pixel_noise, &mut rng).into_iter().enumerate() {
            obs.push(Observation {
                point_id: pid as u64,
                camera_id: cid as u64,
                pixel: px,
            });
        }
    }
    let cameras: BTreeMap<u64, Camera> = scene.cameras.iter().enumerate().map(|(i, c)| (i as u64, *c)).collect();
    let gt = scene.points.iter().enumerate().map(|(i, p)| (i as u64, *p)).collect();
    CorrespondenceSet::new(cameras, &obs)?.with_ground_truth(gt)
}

pub fn run_sfm_synth(cfg: &SfmSynthConfig) -> Result<Vec<TrialRecord>> {
    if cfg.methods.is_empty() {
        return Err(Error::InvalidInput("no methods given".into()));
    }
    if let Some(m) = cfg.methods.iter().find(|m| m.two_view_only() && cfg.n_cameras != 2) {
        return Err(Error::InvalidInput(format!("method {m} handles two views only")));
    }
    if cfg.n_points < MIN_PAIR_CORRESPONDENCES {
        return Err(Error::InvalidInput(format!("at least {MIN_PAIR_CORRESPONDENCES} points are needed")));
    }
    let id = cfg.experiment_id();
    let per_trial: Vec<Vec<TrialRecord>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let set = synth_trial_set(cfg, trial)?;
            let results = if cfg.inject_failures.contains(&trial) {
                cfg.methods
                    .iter()
                    .map(|&m| (m, Err(Error::InvalidInput("injected failure".into())), String::new()))
                    .collect()
            } else {
                evaluate_set(&set, &cfg.methods)
            };
            Ok(to_records(&id, trial, cfg.pixel_noise, results, ""))
        })
        .collect::<Result<_>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SfmRealConfig {
    pub n_view: usize,
    pub points_per_run: usize,
    pub runs: u64,
    pub methods: Vec<Method>,
    pub seed: Seed,
}

impl SfmRealConfig {
    pub fn new(n_view: usize) -> Self {
        Self {
            n_view,
            points_per_run: 20,
            runs: 10,
            methods: Method::default_set(n_view),
            seed: 0,
        }
    }

    pub fn experiment_id(&self) -> String {
        format!("sfm-real-{}view", self.n_view)
    }
}

fn combinations(ids: &[u64], k: usize) -> Vec<Vec<u64>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for (i, &first) in ids.iter().enumerate() {
        for mut rest in combinations(&ids[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// For every camera pair or triple with enough shared points, `runs`
/// reconstructions from random subsets of `points_per_run` shared points.
///
/// Trial numbers are `combination_index * runs + run`, counting skipped
/// combinations, so adding data to one combination never renumbers another.
pub fn run_sfm_real(set: &CorrespondenceSet, cfg: &SfmRealConfig) -> Result<Vec<TrialRecord>> {
    if !(2..=3).contains(&cfg.n_view) {
        return Err(Error::InvalidInput(format!("views per run must be 2 or 3, not {}", cfg.n_view)));
    }
    if set.ground_truth().is_none() {
        return Err(Error::InvalidInput("real-data runs need ground-truth points".into()));
    }
    if cfg.methods.is_empty() {
        return Err(Error::InvalidInput("no methods given".into()));
    }
    if let Some(m) = cfg.methods.iter().find(|m| m.two_view_only() && cfg.n_view != 2) {
        return Err(Error::InvalidInput(format!("method {m} handles two views only")));
    }
    if cfg.points_per_run < MIN_PAIR_CORRESPONDENCES {
        return Err(Error::InvalidInput(format!(
            "points per run must be at least {MIN_PAIR_CORRESPONDENCES}"
        )));
    }
    let mut units = vec![];
    for (ci, combo) in combinations(&set.observing_cameras(), cfg.n_view).into_iter().enumerate() {
        let shared = set.shared_points(&combo);
        let label = combo.iter().map(u64::to_string).collect::<Vec<_>>().join("-");
        if shared.len() < MIN_PAIR_CORRESPONDENCES {
            info!("cameras {label}: {} shared correspondences, skipped", shared.len());
            continue;
        }
        if cfg.points_per_run > shared.len() {
            return Err(Error::InsufficientCorrespondences {
                requested: cfg.points_per_run,
                available: shared.len(),
            }
            .context(format!("cameras {label}")));
        }
        for run in 0..cfg.runs {
            units.push((ci as u64 * cfg.runs + run, combo.clone(), shared.clone(), label.clone()));
        }
    }
    let id = cfg.experiment_id();
    let per_unit: Vec<Vec<TrialRecord>> = units
        .par_iter()
        .map(|(trial, combo, shared, label)| {
            let mut rng = stream_rng(cfg.seed, *trial, lane::POINTS);
            let mut picked = index::sample(&mut rng, shared.len(), cfg.points_per_run).into_vec();
            picked.sort_unstable();
            let points: Vec<u64> = picked.iter().map(|&k| shared[k]).collect();
            let subset = set.subset(combo, &points)?;
            let results = evaluate_set(&subset, &cfg.methods);
            Ok(to_records(&id, *trial, 0.0, results, &format!("cameras={label}")))
        })
        .collect::<Result<_>>()?;
    Ok(per_unit.into_iter().flatten().collect())
}
