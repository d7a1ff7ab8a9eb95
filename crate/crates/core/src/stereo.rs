//! Rectified stereo camera model.
//!
//! The camera frame {C} sits at the middle of the baseline with X along the
//! baseline, Z along the optical axis. Both lenses share the intrinsic matrix
//! `diag(F, F, 1)` (no skew, no principal-point offset); the left lens is
//! displaced by `-b/2` and the right by `+b/2` in the projection, so a point
//! in front of the camera always has `u_r > u_l`. Everything is metric:
//! points in millimeters, image coordinates in millimeters on the image plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::se3::Point3;

/// Smallest disparity `|u_r − u_l|` (mm) accepted by [`triangulate`].
pub const MIN_DISPARITY: f64 = 1e-12;

/// Rated depth range of the default camera, millimeters. Informational only.
pub const DEPTH_RANGE_MM: (f64, f64) = (500.0, 25_000.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    /// Focal length F, mm.
    pub focal_length: f64,
    /// Baseline b between the two lens centers, mm.
    pub baseline: f64,
}

impl Default for CameraIntrinsics {
    /// ZED 2 class stereo head: F = 2.8 mm, b = 120 mm.
    fn default() -> Self {
        Self { focal_length: 2.8, baseline: 120.0 }
    }
}

impl CameraIntrinsics {
    pub fn new(focal_length: f64, baseline: f64) -> Result<Self> {
        let intr = Self { focal_length, baseline };
        intr.validate()?;
        Ok(intr)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.focal_length > 0.0 && self.focal_length.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "focal length must be positive, got {}",
                self.focal_length
            )));
        }
        if !(self.baseline > 0.0 && self.baseline.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "baseline must be positive, got {}",
                self.baseline
            )));
        }
        Ok(())
    }

    pub fn depth_in_range(&self, z_mm: f64) -> bool {
        (DEPTH_RANGE_MM.0..=DEPTH_RANGE_MM.1).contains(&z_mm)
    }
}

/// Left/right image coordinates of one scene point, mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageTriplet {
    pub u_l: f64,
    pub u_r: f64,
    pub v: f64,
}

impl ImageTriplet {
    pub fn new(u_l: f64, u_r: f64, v: f64) -> Self {
        Self { u_l, u_r, v }
    }

    pub fn disparity(&self) -> f64 {
        self.u_r - self.u_l
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.u_l, self.u_r, self.v]
    }
}

/// Stereo projection of a camera-frame point given in millimeters.
pub fn project(intr: &CameraIntrinsics, p: &Point3) -> Result<ImageTriplet> {
    let z = p.z;
    if !(z > 0.0) {
        return Err(Error::NonPositiveDepth { depth: z });
    }
    let f = intr.focal_length;
    let half_b = intr.baseline / 2.0;
    Ok(ImageTriplet {
        u_l: f * (p.x - half_b) / z,
        u_r: f * (p.x + half_b) / z,
        v: f * p.y / z,
    })
}

/// Inverse of [`project`]: camera-frame point in millimeters.
pub fn triangulate(intr: &CameraIntrinsics, t: &ImageTriplet) -> Result<Point3> {
    let d = t.disparity();
    if !(d.abs() >= MIN_DISPARITY) {
        return Err(Error::ZeroDisparity { disparity: d });
    }
    let b = intr.baseline;
    Ok(Point3::new(
        b * (t.u_r + t.u_l) / (2.0 * d),
        b * t.v / d,
        intr.focal_length * b / d,
    ))
}
