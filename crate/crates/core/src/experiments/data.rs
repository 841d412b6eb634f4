//! Correspondence sets and their whitespace-separated text formats.
//!
//! * cameras: `id fx fy cx cy skew width height r11 r12 r13 r21 r22 r23 r31 r32 r33 cx cy cz`
//! * correspondences: `point_id camera_id u v`
//! * ground-truth points: `point_id x y z`
//!
//! Blank lines and lines starting with `#` are ignored. Writers use the
//! shortest decimal form that parses back to the same `f64`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::geometry::{rotation_from_matrix, Calibration, Camera, Pixel, Point3, Pose};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub point_id: u64,
    pub camera_id: u64,
    pub pixel: Pixel,
}

/// Image measurements of a set of points, with the camera roster that
/// supplies the calibrations. Roster poses are ground truth and are never
/// read by the estimation pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceSet {
    cameras: BTreeMap<u64, Camera>,
    /// `point_id -> camera_id -> pixel`.
    tracks: BTreeMap<u64, BTreeMap<u64, Pixel>>,
    ground_truth: Option<BTreeMap<u64, Point3>>,
}

impl CorrespondenceSet {
    pub fn new(cameras: BTreeMap<u64, Camera>, observations: &[Observation]) -> Result<Self> {
        let mut tracks: BTreeMap<u64, BTreeMap<u64, Pixel>> = BTreeMap::new();
        for o in observations {
            if !cameras.contains_key(&o.camera_id) {
                return Err(Error::InvalidInput(format!(
                    "point {} observed by unknown camera {}",
                    o.point_id, o.camera_id
                )));
            }
            if tracks.entry(o.point_id).or_default().insert(o.camera_id, o.pixel).is_some() {
                return Err(Error::InvalidInput(format!(
                    "point {} observed twice by camera {}",
                    o.point_id, o.camera_id
                )));
            }
        }
        if let Some((id, _)) = tracks.iter().find(|(_, t)| t.len() < 2) {
            return Err(Error::InvalidInput(format!("point {id} is observed by only one camera")));
        }
        Ok(Self {
            cameras,
            tracks,
            ground_truth: None,
        })
    }

    pub fn with_ground_truth(mut self, points: BTreeMap<u64, Point3>) -> Result<Self> {
        if let Some(id) = self.tracks.keys().find(|id| !points.contains_key(id)) {
            return Err(Error::InvalidInput(format!("no ground truth for point {id}")));
        }
        self.ground_truth = Some(points);
        Ok(self)
    }

    pub fn cameras(&self) -> &BTreeMap<u64, Camera> {
        &self.cameras
    }

    pub fn tracks(&self) -> &BTreeMap<u64, BTreeMap<u64, Pixel>> {
        &self.tracks
    }

    pub fn ground_truth(&self) -> Option<&BTreeMap<u64, Point3>> {
        self.ground_truth.as_ref()
    }

    /// Cameras with at least one observation, in id order.
    pub fn observing_cameras(&self) -> Vec<u64> {
        let ids: BTreeSet<u64> = self.tracks.values().flat_map(|t| t.keys().copied()).collect();
        ids.into_iter().collect()
    }

    /// Points seen by every camera in `ids`, in id order.
    pub fn shared_points(&self, ids: &[u64]) -> Vec<u64> {
        self.tracks
            .iter()
            .filter(|(_, t)| ids.iter().all(|c| t.contains_key(c)))
            .map(|(&p, _)| p)
            .collect()
    }

    /// The observations of `points` restricted to the cameras `ids`.
    pub fn subset(&self, ids: &[u64], points: &[u64]) -> Result<Self> {
        let mut obs = vec![];
        for p in points {
            let track = self
                .tracks
                .get(p)
                .ok_or_else(|| Error::InvalidInput(format!("unknown point {p}")))?;
            for c in ids {
                if let Some(px) = track.get(c) {
                    obs.push(Observation {
                        point_id: *p,
                        camera_id: *c,
                        pixel: *px,
                    });
                }
            }
        }
        let cameras = ids
            .iter()
            .map(|c| {
                self.cameras
                    .get(c)
                    .map(|cam| (*c, *cam))
                    .ok_or_else(|| Error::InvalidInput(format!("unknown camera {c}")))
            })
            .collect::<Result<_>>()?;
        let set = Self::new(cameras, &obs)?;
        match &self.ground_truth {
            Some(gt) => set.with_ground_truth(gt.clone()),
            None => Ok(set),
        }
    }

    pub fn observations(&self) -> Vec<Observation> {
        self.tracks
            .iter()
            .flat_map(|(&point_id, t)| {
                t.iter().map(move |(&camera_id, &pixel)| Observation {
                    point_id,
                    camera_id,
                    pixel,
                })
            })
            .collect()
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Numbered, non-comment lines split on whitespace, each with exactly `n` fields.
fn records<'a>(text: &'a str, path: &'a Path, n: usize) -> impl Iterator<Item = Result<(usize, Vec<&'a str>)>> + 'a {
    text.lines().enumerate().filter_map(move |(i, line)| {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return None;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != n {
            return Some(Err(format_error(path, i + 1, format!("expected {n} fields, found {}", fields.len()))));
        }
        Some(Ok((i + 1, fields)))
    })
}

fn format_error(path: &Path, line: usize, message: String) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        line,
        message,
    }
}

fn field<T: FromStr>(s: &str, path: &Path, line: usize, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| format_error(path, line, format!("cannot parse {what} from {s:?}")))
}

fn finite(s: &str, path: &Path, line: usize, what: &str) -> Result<f64> {
    let v: f64 = field(s, path, line, what)?;
    if !v.is_finite() {
        return Err(format_error(path, line, format!("{what} is not finite")));
    }
    Ok(v)
}

fn insert_unique<V>(map: &mut BTreeMap<u64, V>, id: u64, v: V, path: &Path, line: usize) -> Result<()> {
    if map.insert(id, v).is_some() {
        return Err(format_error(path, line, format!("duplicate id {id}")));
    }
    Ok(())
}

pub fn parse_cameras(text: &str, path: &Path) -> Result<BTreeMap<u64, Camera>> {
    let mut out = BTreeMap::new();
    for rec in records(text, path, 20) {
        let (line, f) = rec?;
        let id = field(f[0], path, line, "camera id")?;
        let num = |k: usize| finite(f[k], path, line, "camera parameter");
        let calib = Calibration::new(num(1)?, num(2)?, num(3)?, num(4)?, num(5)?)
            .map_err(|e| format_error(path, line, e.to_string()))?;
        let width = field(f[6], path, line, "width")?;
        let height = field(f[7], path, line, "height")?;
        let mut r = Matrix3::zeros();
        for k in 0..9 {
            r[(k / 3, k % 3)] = num(8 + k)?;
        }
        let rotation = rotation_from_matrix(r).map_err(|e| format_error(path, line, e.to_string()))?;
        let center = Point3::new(num(17)?, num(18)?, num(19)?);
        let camera = Camera::new(calib, Pose::new(rotation, center), width, height)
            .map_err(|e| format_error(path, line, e.to_string()))?;
        insert_unique(&mut out, id, camera, path, line)?;
    }
    Ok(out)
}

pub fn parse_correspondences(text: &str, path: &Path) -> Result<Vec<Observation>> {
    records(text, path, 4)
        .map(|rec| {
            let (line, f) = rec?;
            Ok(Observation {
                point_id: field(f[0], path, line, "point id")?,
                camera_id: field(f[1], path, line, "camera id")?,
                pixel: Pixel::new(finite(f[2], path, line, "u")?, finite(f[3], path, line, "v")?),
            })
        })
        .collect()
}

pub fn parse_points(text: &str, path: &Path) -> Result<BTreeMap<u64, Point3>> {
    let mut out = BTreeMap::new();
    for rec in records(text, path, 4) {
        let (line, f) = rec?;
        let id = field(f[0], path, line, "point id")?;
        let p = Point3::new(
            finite(f[1], path, line, "x")?,
            finite(f[2], path, line, "y")?,
            finite(f[3], path, line, "z")?,
        );
        insert_unique(&mut out, id, p, path, line)?;
    }
    Ok(out)
}

pub fn read_cameras(path: &Path) -> Result<BTreeMap<u64, Camera>> {
    parse_cameras(&read_text(path)?, path)
}

pub fn read_correspondences(path: &Path) -> Result<Vec<Observation>> {
    parse_correspondences(&read_text(path)?, path)
}

pub fn read_points(path: &Path) -> Result<BTreeMap<u64, Point3>> {
    parse_points(&read_text(path)?, path)
}

pub fn format_cameras(cameras: &BTreeMap<u64, Camera>) -> String {
    let mut s = String::new();
    for (id, c) in cameras {
        let k = &c.calib;
        write!(s, "{id} {} {} {} {} {} {} {}", k.fx, k.fy, k.cx, k.cy, k.skew, c.width, c.height).unwrap();
        for v in c.pose.rotation.matrix().transpose().iter() {
            write!(s, " {v}").unwrap();
        }
        let o = c.pose.center;
        writeln!(s, " {} {} {}", o.x, o.y, o.z).unwrap();
    }
    s
}

pub fn format_correspondences(observations: &[Observation]) -> String {
    observations
        .iter()
        .map(|o| format!("{} {} {} {}\n", o.point_id, o.camera_id, o.pixel.x, o.pixel.y))
        .collect()
}

pub fn format_points(points: &BTreeMap<u64, Point3>) -> String {
    points.iter().map(|(id, p)| format!("{id} {} {} {}\n", p.x, p.y, p.z)).collect()
}

pub fn write_cameras(path: &Path, cameras: &BTreeMap<u64, Camera>) -> Result<()> {
    write_text(path, &format_cameras(cameras))
}

pub fn write_correspondences(path: &Path, observations: &[Observation]) -> Result<()> {
    write_text(path, &format_correspondences(observations))
}

pub fn write_points(path: &Path, points: &BTreeMap<u64, Point3>) -> Result<()> {
    write_text(path, &format_points(points))
}
