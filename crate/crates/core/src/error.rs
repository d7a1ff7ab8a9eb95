use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point has non-positive depth Z = {depth} mm")]
    NonPositiveDepth { depth: f64 },

    #[error("stereo disparity {disparity} mm is too small to triangulate")]
    ZeroDisparity { disparity: f64 },

    #[error("points are collinear (or coincident); no unique frame")]
    CollinearPoints,

    #[error("the two points coincide")]
    CoincidentPoints,

    #[error("expected {expected} points, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("pose is outside the reachable workspace ({reason})")]
    Unreachable { reason: &'static str },

    #[error("wrist is singular (sin q5 = {sin_q5:e}); q4 and q6 are not separable")]
    SingularWrist { sin_q5: f64 },

    #[error("marker {0} is behind the camera")]
    MarkerBehindCamera(usize),

    #[error("transfer function evaluated at a pole")]
    PoleHit,

    #[error("transfer function is improper (numerator degree {num} > denominator degree {den})")]
    ImproperTF { num: usize, den: usize },

    #[error("jacobian is rank deficient (sigma_min / sigma_max = {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("target is unreachable: {0}")]
    TargetUnreachable(Box<Error>),

    #[error("simulation diverged at t = {time} s (joint {joint} = {value} rad)")]
    SimDiverged { time: f64, joint: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
