//! Forward kinematics and Jacobians of the planar 3-DOF arm and the 5-DOF
//! rover, plus the unit/frame transforms relating two descriptions of the
//! same physical system.
//!
//! Angles are radians throughout; lengths are in whatever unit the model was
//! built with.

use crate::error::{Error, Result};
use crate::inverse::{orthonormality_defect, BlockPartition};
use crate::matrix::{diag_from, rotation_embed, Matrix};

/// Planar arm with two revolute joints and one prismatic offset `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmModel {
    pub a1: f64,
    pub a2: f64,
    /// `[θ1, θ2, l]`
    pub q: [f64; 3],
}

impl ArmModel {
    /// Link lengths 1 m and 1.1 m, θ1 = θ2 = 30°, l = 0.7 m.
    pub fn reference() -> Self {
        let deg30 = 30f64.to_radians();
        Self {
            a1: 1.0,
            a2: 1.1,
            q: [deg30, deg30, 0.7],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a1 > 0.0 && self.a2 > 0.0) || !self.a1.is_finite() || !self.a2.is_finite() {
            return Err(Error::InvalidInput(
                "arm link lengths must be positive".into(),
            ));
        }
        if self.q.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("arm state"));
        }
        if self.q[2] < 0.0 {
            return Err(Error::InvalidInput(
                "arm extension l must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// The same arm with every length expressed in a unit `c` times smaller.
    pub fn in_units(&self, c: f64) -> Self {
        Self {
            a1: self.a1 * c,
            a2: self.a2 * c,
            q: [self.q[0], self.q[1], self.q[2] * c],
        }
    }
}

pub fn arm_forward(model: &ArmModel) -> [f64; 3] {
    let [t1, t2, l] = model.q;
    let (s1, c1) = t1.sin_cos();
    let (s12, c12) = (t1 + t2).sin_cos();
    [
        model.a1 * c1 + model.a2 * c12 + l * s12,
        model.a1 * s1 + model.a2 * s12 - l * c12,
        0.0,
    ]
}

/// `∂P/∂q` for the arm. The third row is identically zero.
pub fn arm_jacobian(model: &ArmModel) -> Matrix {
    let [t1, t2, l] = model.q;
    let (s1, c1) = t1.sin_cos();
    let (s12, c12) = (t1 + t2).sin_cos();
    let (a1, a2) = (model.a1, model.a2);
    Matrix::from_fn(3, 3, |i, j| match (i, j) {
        (0, 0) => -a1 * s1 - a2 * s12 + l * c12,
        (0, 1) => -a2 * s12 + l * c12,
        (0, 2) => s12,
        (1, 0) => a1 * c1 + a2 * c12 + l * s12,
        (1, 1) => a2 * c12 + l * s12,
        (1, 2) => -c12,
        _ => 0.0,
    })
}

/// Rover carrying a telescoping arm at a fixed inclination `theta0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoverModel {
    pub theta0: f64,
    /// `[θ1, l, x1, y1, z1]`
    pub q: [f64; 5],
}

impl RoverModel {
    /// θ0 = θ1 = 45°, base at the origin, arm extension `l`.
    pub fn reference(l: f64) -> Self {
        let deg45 = 45f64.to_radians();
        Self {
            theta0: deg45,
            q: [deg45, l, 0.0, 0.0, 0.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta0.is_finite() || self.q.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("rover state"));
        }
        if self.q[1] < 0.0 {
            return Err(Error::InvalidInput(
                "rover arm length l must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// The same rover described in units `c` times smaller and in a frame
    /// rotated by `theta_prime` about the vertical axis.
    pub fn in_frame(&self, c: f64, theta_prime: f64) -> Self {
        let [t1, l, x1, y1, z1] = self.q;
        let (s, co) = theta_prime.sin_cos();
        Self {
            theta0: self.theta0,
            q: [
                t1 - theta_prime,
                l * c,
                c * (co * x1 + s * y1),
                c * (-s * x1 + co * y1),
                c * z1,
            ],
        }
    }
}

/// Tip position `[x, y, z, 0, 0]`.
pub fn rover_forward(model: &RoverModel) -> [f64; 5] {
    let [t1, l, x1, y1, z1] = model.q;
    let (s0, c0) = model.theta0.sin_cos();
    let (s1, c1) = t1.sin_cos();
    [x1 + l * s0 * c1, y1 + l * s0 * s1, z1 - l * c0, 0.0, 0.0]
}

/// `∂P/∂q` for the rover. Rows 4 and 5 are identically zero.
pub fn rover_jacobian(model: &RoverModel) -> Matrix {
    let [t1, l, ..] = model.q;
    let (s0, c0) = model.theta0.sin_cos();
    let (s1, c1) = t1.sin_cos();
    let mut j = Matrix::zeros(5, 5);
    j[(0, 0)] = -l * s0 * s1;
    j[(0, 1)] = s0 * c1;
    j[(0, 2)] = 1.0;
    j[(1, 0)] = l * s0 * c1;
    j[(1, 1)] = s0 * s1;
    j[(1, 3)] = 1.0;
    j[(2, 1)] = -c0;
    j[(2, 4)] = 1.0;
    j
}

/// Splits a rover Jacobian into the unit-consistent `(θ1, l)` block and the
/// rotation-consistent `(x1, y1, z1)` block.
pub fn rover_partition(j: &Matrix) -> Result<BlockPartition> {
    if j.shape() != (5, 5) {
        return Err(Error::InvalidInput(format!(
            "rover Jacobian must be 5x5, got {}x{}",
            j.rows(),
            j.cols()
        )));
    }
    BlockPartition::split(j, 2)
}

/// Relates a baseline problem `v = J·q̇` to the same problem posed in other
/// units or another frame:
///
/// ```text
/// v_left · v = j_left · J · j_right · q̇'      q̇ = solution_normalizer · q̇'
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTransform {
    pub v_left: Matrix,
    pub j_left: Matrix,
    pub j_right: Matrix,
    pub solution_normalizer: Matrix,
}

impl FrameTransform {
    pub fn identity(task_dim: usize, joint_dim: usize) -> Self {
        Self {
            v_left: Matrix::identity(task_dim),
            j_left: Matrix::identity(task_dim),
            j_right: Matrix::identity(joint_dim),
            solution_normalizer: Matrix::identity(joint_dim),
        }
    }

    pub fn transform_jacobian(&self, j: &Matrix) -> Result<Matrix> {
        self.j_left.matmul(j)?.matmul(&self.j_right)
    }

    pub fn transform_target(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.v_left.mul_vec(v)
    }

    /// Maps a solution of the transformed problem back to baseline units/frame.
    pub fn normalize(&self, qdot: &[f64]) -> Result<Vec<f64>> {
        self.solution_normalizer.mul_vec(qdot)
    }

    pub fn is_identity(&self) -> bool {
        [
            &self.v_left,
            &self.j_left,
            &self.j_right,
            &self.solution_normalizer,
        ]
        .iter()
        .all(|m| *m == &Matrix::identity(m.rows()))
    }

    /// Checks the structural invariants: `j_left` orthonormal and
    /// `v_left = scale · j_left` for a single positive scale.
    pub fn validate(&self) -> Result<()> {
        if orthonormality_defect(&self.j_left) > 1e-10 {
            return Err(Error::InvalidInput("j_left is not orthonormal".into()));
        }
        let scale = self.v_left.frobenius_norm() / self.j_left.frobenius_norm();
        if !(scale > 0.0) || self.v_left.max_abs_diff(&self.j_left.scale(scale)) > 1e-10 * scale {
            return Err(Error::InvalidInput(
                "v_left is not a positive multiple of j_left".into(),
            ));
        }
        Ok(())
    }
}

fn check_scale(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "unit scale must be positive, got {c}"
        )))
    }
}

/// Arm lengths converted to a unit `c` times smaller (c = 100: m → cm).
pub fn arm_unit_transform(c: f64) -> Result<FrameTransform> {
    check_scale(c)?;
    Ok(FrameTransform {
        v_left: Matrix::identity(3).scale(c),
        j_left: Matrix::identity(3),
        j_right: diag_from(&[c, c, 1.0]),
        solution_normalizer: diag_from(&[1.0, 1.0, 1.0 / c]),
    })
}

/// Rover lengths converted by `c` and the horizontal frame rotated by
/// `theta_prime`.
///
/// Rotating the frame re-expresses the task-space `(x, y)` velocity, the
/// heading θ1 and the base position `(x1, y1)` in the new frame, so
/// `J' = R·J·diag(c,1,1,1,1)·Q` with `R = diag(R₂(−θ'), I₃)` acting on task
/// rows and `Q = diag(1, 1, R₂(θ'), 1)` acting on the base columns.
pub fn rover_frame_transform(c: f64, theta_prime: f64) -> Result<FrameTransform> {
    check_scale(c)?;
    let task_rotation = rotation_embed(-theta_prime, 5, (0, 1))?;
    let base_rotation = rotation_embed(theta_prime, 5, (2, 3))?;
    let units = diag_from(&[c, 1.0, 1.0, 1.0, 1.0]);
    let j_right = &units * &base_rotation;
    Ok(FrameTransform {
        v_left: task_rotation.scale(c),
        j_left: task_rotation,
        solution_normalizer: j_right.scale(1.0 / c),
        j_right,
    })
}

/// The rover transform with the rotation applied to task-space rows only and
/// a purely diagonal right factor. This leaves θ1 and the base coordinates in
/// the original frame.
pub fn rover_displayed_transform(c: f64, theta_prime: f64) -> Result<FrameTransform> {
    check_scale(c)?;
    let rotation = rotation_embed(theta_prime, 5, (0, 1))?;
    Ok(FrameTransform {
        v_left: rotation.scale(c),
        j_left: rotation,
        j_right: diag_from(&[c, 1.0, 1.0, 1.0, 1.0]),
        solution_normalizer: diag_from(&[1.0, 1.0 / c, 1.0 / c, 1.0 / c, 1.0 / c]),
    })
}
