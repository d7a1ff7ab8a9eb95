#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use servo_forge::eye_in_hand::{robot_to_camera, EihParameters, MarkerSet};
use servo_forge::kinematics::{is_safe_configuration, safe_bounds, JointVector, RobotGeometry};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn deg6(v: [f64; 6]) -> JointVector {
    JointVector::from_iterator(v.iter().map(|d| d.to_radians()))
}

/// Uniform draw from the safe workspace (rejection on the reach condition).
pub fn safe_configuration(geom: &RobotGeometry, rng: &mut impl Rng) -> JointVector {
    let b = safe_bounds(geom);
    loop {
        let q = JointVector::from_fn(|i, _| rng.random_range(b[i][0]..=b[i][1]));
        if is_safe_configuration(geom, &q) {
            return q;
        }
    }
}

/// Safe configuration with all three markers inside the camera's working
/// depth range.
pub fn visible_configuration(params: &EihParameters, markers: &MarkerSet, rng: &mut impl Rng) -> JointVector {
    loop {
        let q = safe_configuration(&params.geom, rng);
        let depths_ok = markers
            .points()
            .iter()
            .all(|p| params.intr.depth_in_range(robot_to_camera(params, &q, p).z * 1000.0));
        if depths_ok {
            return q;
        }
    }
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}
