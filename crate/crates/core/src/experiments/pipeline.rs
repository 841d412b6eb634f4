//! Calibrated reconstruction without bundle adjustment: pairwise essential
//! matrices, global poses, then triangulation of every track.

use std::collections::BTreeMap;

use log::debug;

use super::methods::Method;
use super::CorrespondenceSet;
use crate::error::{Error, Result, ResultExt};
use crate::geometry::{Camera, Point3, Pose, Vec3};
use crate::relpose::relative_pose;
use crate::viewgraph::{solve_viewing_graph, Edge, GlobalPoses, ViewingGraph};

/// Fewest shared correspondences for a usable camera pair.
pub const MIN_PAIR_CORRESPONDENCES: usize = 8;

/// Estimated cameras in the gauge of the first camera (identity rotation,
/// origin center, unit first baseline).
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedCameras {
    pub ids: Vec<u64>,
    pub poses: GlobalPoses,
    pub cameras: Vec<Camera>,
}

impl EstimatedCameras {
    /// FNV-1a hash of the pose bits, used to show that methods in one trial
    /// share the same poses.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: f64| {
            for b in v.to_bits().to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for (r, c) in self.poses.rotations.iter().zip(&self.poses.centers) {
            r.matrix().iter().for_each(|v| eat(*v));
            c.iter().for_each(|v| eat(*v));
        }
        h
    }

    fn index_of(&self, id: u64) -> Option<usize> {
        self.ids.iter().position(|&c| c == id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub cameras: EstimatedCameras,
    pub points: BTreeMap<u64, Point3>,
    /// False when any iterative triangulation stopped at its iteration cap.
    pub converged: bool,
}

/// Relative poses of every camera pair with enough shared points, then
/// global poses. Only the calibrations of the roster are read.
pub fn estimate_cameras(set: &CorrespondenceSet) -> Result<EstimatedCameras> {
    let ids = set.observing_cameras();
    if ids.len() < 2 {
        return Err(Error::InvalidInput("reconstruction needs two observing cameras".into()));
    }
    let roster = set.cameras();
    let mut edges = vec![];
    for a in 0..ids.len() {
        for b in a + 1..ids.len() {
            let (ia, ib) = (ids[a], ids[b]);
            let shared = set.shared_points(&[ia, ib]);
            if shared.len() < MIN_PAIR_CORRESPONDENCES {
                debug!("cameras {ia}-{ib}: {} shared points, pair not used", shared.len());
                continue;
            }
            let bearings = |id: u64| -> Vec<Vec3> {
                shared.iter().map(|p| roster[&id].bearing(&set.tracks()[p][&id])).collect()
            };
            let (_, selection) =
                relative_pose(&bearings(ia), &bearings(ib)).context_with(|| format!("cameras {ia}-{ib}"))?;
            edges.push(Edge {
                i: a,
                j: b,
                pose: selection.pose,
            });
        }
    }
    let poses = if ids.len() == 2 {
        let edge = edges.first().ok_or_else(|| {
            Error::InsufficientCorrespondences {
                requested: MIN_PAIR_CORRESPONDENCES,
                available: set.shared_points(&ids).len(),
            }
            .context(format!("cameras {}-{}", ids[0], ids[1]))
        })?;
        let second = edge.pose.second_camera_pose();
        GlobalPoses {
            rotations: vec![Pose::identity().rotation, second.rotation],
            centers: vec![Point3::origin(), second.center],
        }
    } else {
        let graph = ViewingGraph::new(ids.len(), edges)?;
        solve_viewing_graph(&graph).context_with(|| "viewing graph".into())?
    };
    let cameras = ids
        .iter()
        .enumerate()
        .map(|(k, id)| {
            let c = &roster[id];
            Camera::new(c.calib, Pose::new(poses.rotations[k], poses.centers[k]), c.width, c.height)
        })
        .collect::<Result<_>>()?;
    Ok(EstimatedCameras { ids, poses, cameras })
}

/// Triangulates every track of `set` with the estimated cameras.
pub fn triangulate_tracks(
    set: &CorrespondenceSet,
    cameras: &EstimatedCameras,
    method: Method,
) -> Result<(BTreeMap<u64, Point3>, bool)> {
    let mut points = BTreeMap::new();
    let mut converged = true;
    for (&pid, track) in set.tracks() {
        let mut cams = vec![];
        let mut pixels = vec![];
        for (cid, px) in track {
            let k = cameras
                .index_of(*cid)
                .ok_or_else(|| Error::InvalidInput(format!("camera {cid} has no estimated pose")))?;
            cams.push(cameras.cameras[k]);
            pixels.push(*px);
        }
        let r = method
            .triangulate(&cams, &pixels)
            .context_with(|| format!("point {pid}, method {method}"))?;
        converged &= r.converged;
        points.insert(pid, r.point);
    }
    Ok((points, converged))
}

pub fn reconstruct(set: &CorrespondenceSet, method: Method) -> Result<Reconstruction> {
    let cameras = estimate_cameras(set)?;
    let (points, converged) = triangulate_tracks(set, &cameras, method)?;
    Ok(Reconstruction {
        cameras,
        points,
        converged,
    })
}
