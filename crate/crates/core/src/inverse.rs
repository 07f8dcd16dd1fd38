//! Unit-consistent and mixed generalized inverses, and the consistency laws
//! used to tell the three inverses apart.
//!
//! * The Moore-Penrose inverse commutes with orthonormal changes of frame:
//!   `(U·A·V)⁻ᴾ = Vᵀ·A⁻ᴾ·Uᵀ`.
//! * The unit-consistent (UC) inverse commutes with positive diagonal
//!   changes of units: `(E·A·D⁻¹)⁻ᵁ = D·A⁻ᵁ·E⁻¹`. It is computed from the
//!   scale decomposition `A = D_A·S·E_A` as `E_A⁻¹·S⁻ᴾ·D_A⁻¹`.
//! * The mixed inverse applies UC treatment to the first `m` variables and
//!   MP treatment to the remaining `n` through the block formula
//!
//! ```text
//!         ⎡ (W − X·Z⁻ᴾ·Y)⁻ᵁ              −W⁻ᵁ·X·(Z − Y·W⁻ᵁ·X)⁻ᴾ ⎤
//!  A⁻ᴹ =  ⎢                                                       ⎥
//!         ⎣ −Z⁻ᴾ·Y·(W − X·Z⁻ᴾ·Y)⁻ᵁ        (Z − Y·W⁻ᵁ·X)⁻ᴾ        ⎦
//! ```

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::balance::{scale_decompose, BalanceReport, BalanceSettings};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pinv::{pinv, RankTolerance};

/// Tuning shared by all three inverses.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InverseOptions {
    pub rank: RankTolerance,
    pub balance: BalanceSettings,
}

impl From<BalanceSettings> for InverseOptions {
    fn from(balance: BalanceSettings) -> Self {
        Self {
            balance,
            ..Self::default()
        }
    }
}

/// Aggregated balancing diagnostics across every UC inverse taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceSummary {
    pub decompositions: usize,
    pub all_converged: bool,
    pub max_iterations: usize,
}

impl Default for BalanceSummary {
    fn default() -> Self {
        Self {
            decompositions: 0,
            all_converged: true,
            max_iterations: 0,
        }
    }
}

impl BalanceSummary {
    pub fn record(&mut self, report: BalanceReport) {
        self.decompositions += 1;
        self.all_converged &= report.converged;
        self.max_iterations = self.max_iterations.max(report.iterations);
    }

    pub fn absorb(&mut self, other: &BalanceSummary) {
        self.decompositions += other.decompositions;
        self.all_converged &= other.all_converged;
        self.max_iterations = self.max_iterations.max(other.max_iterations);
    }
}

/// `E_A⁻¹ · S⁻ᴾ · D_A⁻¹` together with the balancing report.
pub fn uc_inverse_with_report(
    a: &Matrix,
    opts: &InverseOptions,
) -> Result<(Matrix, BalanceReport)> {
    let dec = scale_decompose(a, &opts.balance)?;
    let s_pinv = pinv(&dec.s, opts.rank)?;
    let inv_e: Vec<f64> = dec.e.iter().map(|x| x.recip()).collect();
    let inv_d: Vec<f64> = dec.d.iter().map(|x| x.recip()).collect();
    let out = s_pinv.scale_rows(&inv_e)?.scale_cols(&inv_d)?;
    Ok((out, dec.report))
}

/// The unit-consistent generalized inverse.
pub fn uc_inverse(a: &Matrix, settings: &BalanceSettings) -> Result<Matrix> {
    uc_inverse_with_report(a, &InverseOptions::from(*settings)).map(|(m, _)| m)
}

/// A square matrix split as `[[W, X], [Y, Z]]` with `W` `m × m` (unit
/// consistent variables) and `Z` `n × n` (rotation consistent variables).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    pub w: Matrix,
    pub x: Matrix,
    pub y: Matrix,
    pub z: Matrix,
}

impl BlockPartition {
    pub fn new(w: Matrix, x: Matrix, y: Matrix, z: Matrix) -> Result<Self> {
        let (m, n) = (w.rows(), z.rows());
        if !w.is_square() || !z.is_square() {
            return Err(Error::InvalidInput(format!(
                "mixed inverse needs square diagonal blocks, got W {:?} and Z {:?}",
                w.shape(),
                z.shape()
            )));
        }
        if x.shape() != (m, n) || y.shape() != (n, m) {
            return Err(Error::Shape(format!(
                "off-diagonal blocks must be {m}x{n} and {n}x{m}, got {:?} and {:?}",
                x.shape(),
                y.shape()
            )));
        }
        if m + n == 0 {
            return Err(Error::InvalidInput("empty partition".into()));
        }
        Ok(Self { w, x, y, z })
    }

    /// Splits a square matrix after its first `m` rows and columns.
    pub fn split(a: &Matrix, m: usize) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidInput(format!(
                "mixed inverse needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let total = a.rows();
        if m > total {
            return Err(Error::InvalidInput(format!(
                "split {m} exceeds matrix size {total}"
            )));
        }
        let n = total - m;
        Self::new(
            a.block(0, 0, m, m)?,
            a.block(0, m, m, n)?,
            a.block(m, 0, n, m)?,
            a.block(m, m, n, n)?,
        )
    }

    pub fn m(&self) -> usize {
        self.w.rows()
    }

    pub fn n(&self) -> usize {
        self.z.rows()
    }

    pub fn assemble(&self) -> Matrix {
        Matrix::from_blocks(&self.w, &self.x, &self.y, &self.z).expect("validated partition")
    }
}

pub fn mixed_inverse_with_report(
    p: &BlockPartition,
    opts: &InverseOptions,
) -> Result<(Matrix, BalanceSummary)> {
    let mut summary = BalanceSummary::default();
    let mut uc = |a: &Matrix| -> Result<Matrix> {
        let (inv, report) = uc_inverse_with_report(a, opts)?;
        summary.record(report);
        Ok(inv)
    };

    let z_p = pinv(&p.z, opts.rank)?;
    let w_u = uc(&p.w)?;

    let top_left = uc(&(&p.w - &(&(&p.x * &z_p) * &p.y)))?;
    let bottom_right = pinv(&(&p.z - &(&(&p.y * &w_u) * &p.x)), opts.rank)?;
    let top_right = -&(&(&w_u * &p.x) * &bottom_right);
    let bottom_left = -&(&(&z_p * &p.y) * &top_left);

    let out = Matrix::from_blocks(&top_left, &top_right, &bottom_left, &bottom_right)?;
    Ok((out, summary))
}

/// Mixed UC/MP block inverse.
pub fn mixed_inverse(p: &BlockPartition, settings: &BalanceSettings) -> Result<Matrix> {
    mixed_inverse_with_report(p, &InverseOptions::from(*settings)).map(|(m, _)| m)
}

/// Which generalized inverse to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum InverseKind {
    Mp,
    Uc,
    /// UC on the first `m` variables, MP on the rest.
    Mixed {
        m: usize,
    },
}

impl InverseKind {
    pub fn invert(&self, a: &Matrix, opts: &InverseOptions) -> Result<(Matrix, BalanceSummary)> {
        let mut summary = BalanceSummary::default();
        let inv = match *self {
            InverseKind::Mp => pinv(a, opts.rank)?,
            InverseKind::Uc => {
                let (inv, report) = uc_inverse_with_report(a, opts)?;
                summary.record(report);
                inv
            }
            InverseKind::Mixed { m } => {
                let (inv, s) = mixed_inverse_with_report(&BlockPartition::split(a, m)?, opts)?;
                summary = s;
                inv
            }
        };
        Ok((inv, summary))
    }

    pub fn apply(&self, a: &Matrix, opts: &InverseOptions) -> Result<Matrix> {
        self.invert(a, opts).map(|(m, _)| m)
    }

    pub fn label(&self) -> &'static str {
        match self {
            InverseKind::Mp => "mp",
            InverseKind::Uc => "uc",
            InverseKind::Mixed { .. } => "mixed",
        }
    }
}

impl fmt::Display for InverseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InverseKind::Mixed { m } => write!(f, "mixed(m={m})"),
            other => f.write_str(other.label()),
        }
    }
}

impl FromStr for InverseKind {
    type Err = Error;

    /// Accepts `mp`, `uc`, `mixed:<m>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mp" => Ok(InverseKind::Mp),
            "uc" => Ok(InverseKind::Uc),
            other => match other.strip_prefix("mixed:") {
                Some(m) => m
                    .parse()
                    .map(|m| InverseKind::Mixed { m })
                    .map_err(|_| Error::InvalidInput(format!("bad mixed split in {s:?}"))),
                None => Err(Error::InvalidInput(format!(
                    "unknown inverse kind {s:?} (expected mp, uc or mixed:<m>)"
                ))),
            },
        }
    }
}

fn relative_deviation(lhs: &Matrix, rhs: &Matrix) -> f64 {
    lhs.max_abs_diff(rhs) / rhs.max_abs().max(1.0)
}

/// Deviation from the unit-consistency law
/// `inv(E·A·D⁻¹) = D·inv(A)·E⁻¹`, where `e_diag` scales the rows of `a` and
/// `d_diag` its columns. Returned as the max-abs entry difference relative to
/// `max(1, ‖D·inv(A)·E⁻¹‖_max)`.
pub fn check_unit_consistency(
    kind: InverseKind,
    a: &Matrix,
    d_diag: &[f64],
    e_diag: &[f64],
    opts: &InverseOptions,
) -> Result<f64> {
    if d_diag.len() != a.cols() || e_diag.len() != a.rows() {
        return Err(Error::Shape(format!(
            "{} column scales and {} row scales for a {}x{} matrix",
            d_diag.len(),
            e_diag.len(),
            a.rows(),
            a.cols()
        )));
    }
    if d_diag
        .iter()
        .chain(e_diag)
        .any(|&s| !(s > 0.0) || !s.is_finite())
    {
        return Err(Error::InvalidInput(
            "scales must be finite and strictly positive".into(),
        ));
    }
    let inv_d: Vec<f64> = d_diag.iter().map(|x| x.recip()).collect();
    let inv_e: Vec<f64> = e_diag.iter().map(|x| x.recip()).collect();

    let transformed = a.scale_rows(e_diag)?.scale_cols(&inv_d)?;
    let lhs = kind.apply(&transformed, opts)?;
    let rhs = kind
        .apply(a, opts)?
        .scale_rows(d_diag)?
        .scale_cols(&inv_e)?;
    Ok(relative_deviation(&lhs, &rhs))
}

/// Max-abs deviation of `QᵀQ` from the identity.
pub fn orthonormality_defect(q: &Matrix) -> f64 {
    (&q.transpose() * q).max_abs_diff(&Matrix::identity(q.cols()))
}

/// Deviation from the rotation-consistency law
/// `inv(U·A·V) = Vᵀ·inv(A)·Uᵀ`, relative to `max(1, ‖Vᵀ·inv(A)·Uᵀ‖_max)`.
pub fn check_rotation_consistency(
    kind: InverseKind,
    a: &Matrix,
    u: &Matrix,
    v: &Matrix,
    opts: &InverseOptions,
) -> Result<f64> {
    if !u.is_square() || !v.is_square() || u.rows() != a.rows() || v.rows() != a.cols() {
        return Err(Error::Shape(format!(
            "U {:?} and V {:?} do not conform with A {:?}",
            u.shape(),
            v.shape(),
            a.shape()
        )));
    }
    for (name, q) in [("U", u), ("V", v)] {
        if orthonormality_defect(q) > 1e-10 {
            return Err(Error::InvalidInput(format!("{name} is not orthonormal")));
        }
    }
    let lhs = kind.apply(&(&(u * a) * v), opts)?;
    let rhs = &(&v.transpose() * &kind.apply(a, opts)?) * &u.transpose();
    Ok(relative_deviation(&lhs, &rhs))
}
