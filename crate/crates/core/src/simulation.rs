//! Fixed-step resolved-rate control: at every step solve `q̇ = J⁺·v` with
//! the selected generalized inverse, then advance `q ← q + q̇·dt`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inverse::{BalanceSummary, InverseKind, InverseOptions};
use crate::kinematics::{
    arm_forward, arm_jacobian, arm_unit_transform, rover_forward, rover_frame_transform,
    rover_jacobian, ArmModel, FrameTransform, RoverModel,
};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Arm(ArmModel),
    Rover(RoverModel),
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Arm(_) => "arm",
            Model::Rover(_) => "rover",
        }
    }

    pub fn q(&self) -> Vec<f64> {
        match self {
            Model::Arm(m) => m.q.to_vec(),
            Model::Rover(m) => m.q.to_vec(),
        }
    }

    /// Same model at a different joint state.
    pub fn with_q(&self, q: &[f64]) -> Result<Self> {
        let wrong = || {
            Error::Shape(format!(
                "{} state has wrong length {}",
                self.name(),
                q.len()
            ))
        };
        Ok(match self {
            Model::Arm(m) => Model::Arm(ArmModel {
                q: q.try_into().map_err(|_| wrong())?,
                ..*m
            }),
            Model::Rover(m) => Model::Rover(RoverModel {
                q: q.try_into().map_err(|_| wrong())?,
                ..*m
            }),
        })
    }

    pub fn jacobian(&self) -> Matrix {
        match self {
            Model::Arm(m) => arm_jacobian(m),
            Model::Rover(m) => rover_jacobian(m),
        }
    }

    pub fn forward(&self) -> Vec<f64> {
        match self {
            Model::Arm(m) => arm_forward(m).to_vec(),
            Model::Rover(m) => rover_forward(m).to_vec(),
        }
    }

    pub fn joint_count(&self) -> usize {
        match self {
            Model::Arm(_) => 3,
            Model::Rover(_) => 5,
        }
    }

    pub fn task_dim(&self) -> usize {
        self.joint_count()
    }

    /// Which joints are angles (radians internally, degrees on output).
    pub fn angular_joints(&self) -> &'static [bool] {
        match self {
            Model::Arm(_) => &[true, true, false],
            Model::Rover(_) => &[true, false, false, false, false],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Arm(m) => m.validate(),
            Model::Rover(m) => m.validate(),
        }
    }

    /// The model re-expressed in units `c` times smaller and, for the rover,
    /// a frame rotated by `theta_prime`, with the matching transform.
    pub fn in_frame(&self, c: f64, theta_prime: f64) -> Result<(Model, FrameTransform)> {
        match self {
            Model::Arm(m) => {
                if theta_prime != 0.0 {
                    return Err(Error::InvalidInput(
                        "the planar arm supports unit changes only, not frame rotation".into(),
                    ));
                }
                Ok((Model::Arm(m.in_units(c)), arm_unit_transform(c)?))
            }
            Model::Rover(m) => Ok((
                Model::Rover(m.in_frame(c, theta_prime)),
                rover_frame_transform(c, theta_prime)?,
            )),
        }
    }
}

/// When a run counts as diverged: some normalized `|q̇_j|` exceeds `factor`
/// times the peak `|q̇_j|` of the baseline run (same model and inverse, base
/// units, unrotated frame, dt = 1e-3), at a time no earlier than
/// `settle_fraction · duration`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceCriterion {
    pub factor: f64,
    pub settle_fraction: f64,
}

impl Default for DivergenceCriterion {
    fn default() -> Self {
        Self {
            factor: 50.0,
            settle_fraction: 0.1,
        }
    }
}

pub const BASELINE_DT: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// Model in base units and the reference frame.
    pub model: Model,
    pub inverse: InverseKind,
    /// Target tip velocity in base units and the reference frame.
    pub target: Vec<f64>,
    pub dt: f64,
    pub duration: f64,
    /// Length-unit scale (100 for metres → centimetres).
    pub unit_scale: f64,
    /// Frame rotation in radians (rover only).
    pub frame_rotation: f64,
    pub options: InverseOptions,
    pub divergence: DivergenceCriterion,
}

impl SimulationConfig {
    pub fn new(model: Model, inverse: InverseKind, target: Vec<f64>) -> Self {
        Self {
            model,
            inverse,
            target,
            dt: 1e-3,
            duration: 0.1,
            unit_scale: 1.0,
            frame_rotation: 0.0,
            options: InverseOptions::default(),
            divergence: DivergenceCriterion::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidInput(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.duration >= self.dt) || !self.duration.is_finite() {
            return Err(Error::InvalidInput(format!(
                "duration {} must be at least dt {}",
                self.duration, self.dt
            )));
        }
        if self.target.len() != self.model.task_dim() {
            return Err(Error::Shape(format!(
                "target has {} components, {} model needs {}",
                self.target.len(),
                self.model.name(),
                self.model.task_dim()
            )));
        }
        if self.target.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("target velocity"));
        }
        if !(self.unit_scale > 0.0) || !self.unit_scale.is_finite() {
            return Err(Error::InvalidInput("unit scale must be positive".into()));
        }
        if !self.frame_rotation.is_finite() {
            return Err(Error::NonFinite("frame rotation"));
        }
        self.options.balance.validate()
    }

    pub fn step_count(&self) -> usize {
        // guard against 0.1 / 1e-3 = 100.00000000000001
        ((self.duration / self.dt) - 1e-9).ceil().max(1.0) as usize
    }

    /// The same experiment in base units, the reference frame and dt = 1e-3.
    pub fn baseline(&self) -> Self {
        Self {
            dt: BASELINE_DT,
            unit_scale: 1.0,
            frame_rotation: 0.0,
            ..self.clone()
        }
    }

    fn is_baseline(&self) -> bool {
        self.dt == BASELINE_DT && self.unit_scale == 1.0 && self.frame_rotation == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    /// Joint rates in the simulation's own units (angles in rad/s).
    pub qdot: Vec<f64>,
    /// Joint state after the step.
    pub q: Vec<f64>,
    /// `J·q̇`.
    pub achieved_v: Vec<f64>,
    /// `‖J·q̇ − v‖₂`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    /// Peak normalized `|q̇_j|` over the whole run.
    pub max_abs_qdot: Vec<f64>,
    pub threshold: Vec<f64>,
    pub diverged: bool,
    pub first_divergence_time: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub qdot: Vec<f64>,
    pub next: Model,
    pub achieved_v: Vec<f64>,
    pub residual: f64,
    pub balance: BalanceSummary,
}

/// One explicit-Euler control step with the Jacobian evaluated at `model`.
pub fn step(
    model: &Model,
    target: &[f64],
    dt: f64,
    inverse: InverseKind,
    options: &InverseOptions,
) -> Result<StepOutcome> {
    let j = model.jacobian();
    let (inv, balance) = inverse.invert(&j, options)?;
    let qdot = inv.mul_vec(target)?;
    let achieved_v = j.mul_vec(&qdot)?;
    let residual = achieved_v
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let q: Vec<f64> = model
        .q()
        .iter()
        .zip(&qdot)
        .map(|(q, qd)| q + qd * dt)
        .collect();
    if q.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("integrated joint state"));
    }
    Ok(StepOutcome {
        next: model.with_q(&q)?,
        qdot,
        achieved_v,
        residual,
        balance,
    })
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<TrajectoryRecord>,
    pub divergence: DivergenceReport,
    pub balance: BalanceSummary,
    /// Maps this run's joint rates back to base units and frame.
    pub transform: FrameTransform,
    /// Model (in the run's own units/frame) after the last step.
    pub final_model: Model,
}

impl RunOutput {
    /// Joint rates of every step, normalized to base units and frame.
    pub fn normalized_qdot(&self) -> Result<Vec<Vec<f64>>> {
        self.records
            .iter()
            .map(|r| self.transform.normalize(&r.qdot))
            .collect()
    }
}

struct Integration {
    records: Vec<TrajectoryRecord>,
    balance: BalanceSummary,
    transform: FrameTransform,
    final_model: Model,
    normalized: Vec<Vec<f64>>,
}

fn integrate(config: &SimulationConfig) -> Result<Integration> {
    config.validate()?;
    let (mut model, transform) = config
        .model
        .in_frame(config.unit_scale, config.frame_rotation)?;
    let target = transform.transform_target(&config.target)?;

    let n = config.step_count();
    let mut records = Vec::with_capacity(n);
    let mut normalized = Vec::with_capacity(n);
    let mut balance = BalanceSummary::default();
    for k in 0..n {
        let out = step(&model, &target, config.dt, config.inverse, &config.options)?;
        balance.absorb(&out.balance);
        normalized.push(transform.normalize(&out.qdot)?);
        records.push(TrajectoryRecord {
            t: k as f64 * config.dt,
            qdot: out.qdot,
            q: out.next.q(),
            achieved_v: out.achieved_v,
            residual: out.residual,
        });
        model = out.next;
    }
    Ok(Integration {
        records,
        balance,
        transform,
        final_model: model,
        normalized,
    })
}

fn peak_abs(series: &[Vec<f64>], width: usize) -> Vec<f64> {
    let mut peak = vec![0.0_f64; width];
    for row in series {
        for (p, x) in peak.iter_mut().zip(row) {
            *p = p.max(x.abs());
        }
    }
    peak
}

// Floor for thresholds of joints that never move in the baseline.
const THRESHOLD_FLOOR: f64 = 1e-12;

/// Runs the full simulation and classifies divergence against the baseline.
pub fn run(config: &SimulationConfig) -> Result<RunOutput> {
    let sim = integrate(config)?;
    let width = config.model.joint_count();

    let baseline_peak = if config.is_baseline() {
        peak_abs(&sim.normalized, width)
    } else {
        peak_abs(&integrate(&config.baseline())?.normalized, width)
    };
    let threshold: Vec<f64> = baseline_peak
        .iter()
        .map(|p| (config.divergence.factor * p).max(THRESHOLD_FLOOR))
        .collect();

    let settle = config.divergence.settle_fraction * config.duration;
    let first_divergence_time = sim
        .records
        .iter()
        .zip(&sim.normalized)
        .filter(|(r, _)| r.t >= settle - 1e-12)
        .find(|(_, qd)| qd.iter().zip(&threshold).any(|(x, t)| x.abs() > *t))
        .map(|(r, _)| r.t);

    let divergence = DivergenceReport {
        max_abs_qdot: peak_abs(&sim.normalized, width),
        threshold,
        diverged: first_divergence_time.is_some(),
        first_divergence_time,
    };
    Ok(RunOutput {
        records: sim.records,
        divergence,
        balance: sim.balance,
        transform: sim.transform,
        final_model: sim.final_model,
    })
}

/// Largest `‖normalize(b.q̇) − a.q̇‖∞` over all steps.
pub fn compare_runs(
    a: &[TrajectoryRecord],
    b: &[TrajectoryRecord],
    normalizer: &FrameTransform,
) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "trajectories have {} and {} steps",
            a.len(),
            b.len()
        )));
    }
    let mut worst = 0.0_f64;
    for (ra, rb) in a.iter().zip(b) {
        let nb = normalizer.normalize(&rb.qdot)?;
        if nb.len() != ra.qdot.len() {
            return Err(Error::Shape("joint counts differ".into()));
        }
        for (x, y) in nb.iter().zip(&ra.qdot) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}
