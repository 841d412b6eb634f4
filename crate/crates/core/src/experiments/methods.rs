use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Camera, Pixel, Ray};
use crate::triangulation::{
    angular_l1_twoview, angular_l2_twoview, l1_multiview_irls, l1_twoview, l2_multiview_refine, l2_twoview, midpoint,
    midpoint_irls, TriangulationResult, DEFAULT_MAX_ITER, DEFAULT_TOL,
};

/// Triangulation methods selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Midpoint,
    MidpointIrls,
    L2,
    L1,
    AngularL1,
    AngularL2,
    /// Damped Gauss-Newton on the reprojection error, started at the midpoint.
    L2Refine,
    /// IRLS on the sum of reprojection distances, started at the midpoint.
    L1Irls,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Midpoint,
        Method::MidpointIrls,
        Method::L2,
        Method::L1,
        Method::AngularL1,
        Method::AngularL2,
        Method::L2Refine,
        Method::L1Irls,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Midpoint => "midpoint",
            Method::MidpointIrls => "midpoint-irls",
            Method::L2 => "l2",
            Method::L1 => "l1",
            Method::AngularL1 => "angular-l1",
            Method::AngularL2 => "angular-l2",
            Method::L2Refine => "l2-refine",
            Method::L1Irls => "l1-irls",
        }
    }

    pub fn two_view_only(self) -> bool {
        matches!(self, Method::L2 | Method::L1 | Method::AngularL1 | Method::AngularL2)
    }

    /// Note attached to records of methods that extend a two-view idea to
    /// more views in a way of our own choosing.
    pub fn extension_note(self) -> Option<&'static str> {
        match self {
            Method::L2Refine => Some("multiview-extension=lm-from-midpoint"),
            Method::L1Irls => Some("multiview-extension=irls-from-midpoint"),
            _ => None,
        }
    }

    pub fn default_set(n_views: usize) -> Vec<Method> {
        if n_views <= 2 {
            vec![
                Method::Midpoint,
                Method::MidpointIrls,
                Method::L2,
                Method::L1,
                Method::AngularL1,
                Method::AngularL2,
            ]
        } else {
            vec![Method::Midpoint, Method::MidpointIrls, Method::L2Refine, Method::L1Irls]
        }
    }

    pub fn triangulate(self, cameras: &[Camera], pixels: &[Pixel]) -> Result<TriangulationResult> {
        if cameras.len() != pixels.len() {
            return Err(Error::InvalidInput(format!(
                "{} cameras but {} observations",
                cameras.len(),
                pixels.len()
            )));
        }
        if cameras.len() < 2 {
            return Err(Error::InvalidInput("triangulation needs at least two views".into()));
        }
        if self.two_view_only() && cameras.len() != 2 {
            return Err(Error::InvalidInput(format!(
                "method {self} handles exactly two views, got {}",
                cameras.len()
            )));
        }
        let rays = || -> Vec<Ray> { cameras.iter().zip(pixels).map(|(c, p)| c.line_of_sight(p)).collect() };
        match self {
            Method::Midpoint => midpoint(&rays()),
            Method::MidpointIrls => midpoint_irls(&rays(), DEFAULT_TOL, DEFAULT_MAX_ITER),
            Method::L2 => l2_twoview(&cameras[0], &cameras[1], &pixels[0], &pixels[1]),
            Method::L1 => l1_twoview(&cameras[0], &cameras[1], &pixels[0], &pixels[1]),
            Method::AngularL1 => {
                let r = rays();
                angular_l1_twoview(&r[0], &r[1])
            }
            Method::AngularL2 => {
                let r = rays();
                angular_l2_twoview(&r[0], &r[1])
            }
            Method::L2Refine => {
                let init = midpoint(&rays())?.point;
                l2_multiview_refine(cameras, pixels, &init, DEFAULT_TOL, DEFAULT_MAX_ITER)
            }
            Method::L1Irls => {
                let init = midpoint(&rays())?.point;
                l1_multiview_irls(cameras, pixels, &init, DEFAULT_TOL, DEFAULT_MAX_ITER)
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                Error::InvalidInput(format!("unknown method {s:?} (known: {})", known.join(", ")))
            })
    }
}

/// Comma-separated method names, duplicates removed, order kept.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    let mut out: Vec<Method> = vec![];
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m: Method = name.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidInput("no methods given".into()));
    }
    Ok(out)
}
