//! Rigid-body math: rotations, homogeneous transforms and SVD point-set
//! registration.

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point3 = nalgebra::Point3<f64>;

/// Tolerance on `RᵀR = I` and `det R = 1` for a valid rotation.
pub const ORTHONORMAL_TOL: f64 = 1e-9;

/// Rank threshold (relative to the largest singular value) used to call a
/// centered point set collinear.
pub const COLLINEAR_RTOL: f64 = 1e-9;

/// A rigid transform in SE(3), `p ↦ R·p + t`.
///
/// The same type stores frame poses (columns of `rotation` are the frame axes
/// expressed in the parent frame, `translation` is the frame origin) and point
/// maps such as `T_0^6` or `T_M^C`; which one is meant is stated at each use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self { rotation, translation }
    }

    pub fn identity() -> Self {
        Self::new(Matrix3::identity(), Vector3::zeros())
    }

    pub fn from_translation(x: f64, y: f64, z: f64) -> Self {
        Self::new(Matrix3::identity(), Vector3::new(x, y, z))
    }

    pub fn from_rotation(rotation: Matrix3<f64>) -> Self {
        Self::new(rotation, Vector3::zeros())
    }

    pub fn rot_x(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_rotation(Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
    }

    pub fn rot_y(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_rotation(Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
    }

    pub fn rot_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_rotation(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }

    /// Rotation by `angle` about the unit `axis` (Rodrigues).
    pub fn axis_angle(axis: &Vector3<f64>, angle: f64) -> Self {
        let k = axis.normalize();
        let kx = k.cross_matrix();
        let r = Matrix3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos());
        Self::from_rotation(r)
    }

    /// Homogeneous product `self · other`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose::new(
            self.rotation * other.rotation,
            self.rotation * other.translation + self.translation,
        )
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose::new(rt, -(rt * self.translation))
    }

    pub fn transform_point(&self, p: &Point3) -> Point3 {
        Point3::from(self.rotation * p.coords + self.translation)
    }

    pub fn transform_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Builds a pose from the top 3×4 block of a homogeneous matrix. The
    /// bottom row is not inspected.
    pub fn from_matrix(m: &Matrix4<f64>) -> Pose {
        Pose::new(
            m.fixed_view::<3, 3>(0, 0).into_owned(),
            m.fixed_view::<3, 1>(0, 3).into_owned(),
        )
    }

    /// Row-major 4×4 nested array, bottom row included.
    pub fn to_rows(&self) -> [[f64; 4]; 4] {
        let m = self.to_matrix();
        let mut rows = [[0.0; 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = m[(i, j)];
            }
        }
        rows
    }

    /// Largest deviation of `RᵀR` from identity and of `det R` from one.
    pub fn orthonormality_error(&self) -> f64 {
        let r = &self.rotation;
        let gram = (r.transpose() * r - Matrix3::identity()).abs().max();
        gram.max((r.determinant() - 1.0).abs())
    }

    pub fn is_valid(&self) -> bool {
        self.rotation.iter().chain(self.translation.iter()).all(|v| v.is_finite())
            && self.orthonormality_error() <= ORTHONORMAL_TOL
    }

    /// Projects the rotation onto SO(3) (polar decomposition) when it has
    /// drifted past [`ORTHONORMAL_TOL`]; otherwise returns `self` unchanged.
    pub fn reorthonormalized(&self) -> Pose {
        if self.orthonormality_error() <= ORTHONORMAL_TOL {
            return *self;
        }
        Pose::new(nearest_rotation(&self.rotation), self.translation)
    }

    /// Rotation angle in `[0, π]`.
    pub fn rotation_angle(&self) -> f64 {
        // atan2 form stays accurate near 0 and π, unlike acos of the trace
        let r = &self.rotation;
        let sin2 = Vector3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]).norm();
        sin2.atan2(r.trace() - 1.0)
    }

    /// Frobenius norm of the rotation difference and Euclidean norm of the
    /// translation difference.
    pub fn distance(&self, other: &Pose) -> (f64, f64) {
        (
            (self.rotation - other.rotation).norm(),
            (self.translation - other.translation).norm(),
        )
    }

    /// Maximum absolute entry difference of the 3×4 blocks.
    pub fn max_abs_diff(&self, other: &Pose) -> f64 {
        (self.rotation - other.rotation)
            .abs()
            .max()
            .max((self.translation - other.translation).abs().max())
    }
}

/// Closest proper rotation to `m` in the Frobenius sense.
pub fn nearest_rotation(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd computes U");
    let mut v_t = svd.v_t.expect("svd computes Vᵀ");
    if (u * v_t).determinant() < 0.0 {
        let k = smallest_index(&svd.singular_values);
        v_t.row_mut(k).neg_mut();
    }
    u * v_t
}

fn smallest_index(values: &Vector3<f64>) -> usize {
    values.imin()
}

fn centroid(points: &[Point3]) -> Vector3<f64> {
    points.iter().fold(Vector3::zeros(), |acc, p| acc + p.coords) / points.len() as f64
}

/// Fails with [`Error::CollinearPoints`] unless the centered points span at
/// least a plane.
pub fn check_non_collinear(points: &[Point3]) -> Result<()> {
    if points.len() < 3 {
        return Err(Error::CollinearPoints);
    }
    let c = centroid(points);
    let mut scatter = Matrix3::zeros();
    for p in points {
        let d = p.coords - c;
        scatter += d * d.transpose();
    }
    let mut ev: Vec<f64> = scatter.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    // eigenvalues of the scatter matrix are squared singular values
    if ev[0] <= 0.0 || ev[1].max(0.0).sqrt() <= COLLINEAR_RTOL * ev[0].sqrt() {
        return Err(Error::CollinearPoints);
    }
    Ok(())
}

/// Least-squares rigid transform `T` with `dst ≈ T·src` (Kabsch).
///
/// The centered cross-covariance `H = Σ src'·dst'ᵀ` is decomposed as
/// `H = U Σ Vᵀ` and `R = V Uᵀ`; when that product is a reflection the column
/// of `V` belonging to the smallest singular value is negated. `t` aligns the
/// centroids.
pub fn rigid_register(src: &[Point3], dst: &[Point3]) -> Result<Pose> {
    if src.len() != dst.len() {
        return Err(Error::LengthMismatch { expected: src.len(), found: dst.len() });
    }
    check_non_collinear(src)?;

    let c_src = centroid(src);
    let c_dst = centroid(dst);
    let mut h = Matrix3::zeros();
    for (s, d) in src.iter().zip(dst) {
        h += (s.coords - c_src) * (d.coords - c_dst).transpose();
    }

    let svd = h.svd(true, true);
    let u = svd.u.expect("svd computes U");
    let mut v = svd.v_t.expect("svd computes Vᵀ").transpose();
    if (v * u.transpose()).determinant() < 0.0 {
        let k = smallest_index(&svd.singular_values);
        v.column_mut(k).neg_mut();
    }
    let r = v * u.transpose();
    Ok(Pose::new(r, c_dst - r * c_src))
}

/// Sum of squared residuals `Σ |T·src − dst|²`.
pub fn registration_residual(pose: &Pose, src: &[Point3], dst: &[Point3]) -> f64 {
    src.iter()
        .zip(dst)
        .map(|(s, d)| (pose.transform_point(s) - d).norm_squared())
        .sum()
}
