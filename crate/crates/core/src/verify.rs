//! Reproduction and randomized property suites.
//!
//! Every suite is deterministic for a given seed. Randomized suites report
//! the worst deviation seen over all trials for each property.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::balance::{scale_decompose, BalanceSettings};
use crate::error::{Error, Result};
use crate::inverse::{
    check_rotation_consistency, check_unit_consistency, uc_inverse, InverseKind, InverseOptions,
};
use crate::kinematics::{rover_jacobian, rover_partition, RoverModel};
use crate::matrix::{kron, Matrix};
use crate::pinv::{pinv, PenroseResiduals, RankTolerance};
use crate::random::{log_uniform_scales, orthonormal, seeded, sparse_matrix, uniform_matrix};
use crate::scenario::{
    magnitude_check, CheckResult, Provenance, Runner, SummaryReport, ROVER_L_TABLE, ROVER_TARGET,
    TABLE2,
};

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const DEFAULT_TRIALS: usize = 200;
pub const PROPERTY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Table1,
    Table2,
    Penrose,
    UcConsistency,
    MpRotation,
    Kron,
    Balance,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Table1,
        Suite::Table2,
        Suite::Penrose,
        Suite::UcConsistency,
        Suite::MpRotation,
        Suite::Kron,
        Suite::Balance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Table1 => "table1",
            Suite::Table2 => "table2",
            Suite::Penrose => "penrose",
            Suite::UcConsistency => "uc-consistency",
            Suite::MpRotation => "mp-rotation",
            Suite::Kron => "kron",
            Suite::Balance => "balance",
        }
    }

    pub fn is_randomized(self) -> bool {
        !matches!(self, Suite::Table1 | Suite::Table2)
    }

    /// Distinct stream per suite so suites stay independent of run order.
    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::InvalidInput(format!(
                    "unknown suite {s:?}; known: {}, all",
                    known.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            trials: DEFAULT_TRIALS,
            tolerance: PROPERTY_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SummaryReport>,
}

pub fn run_suites(suites: &[Suite], config: &VerifyConfig) -> Result<VerifyReport> {
    let suites = suites
        .iter()
        .map(|&s| run_suite(s, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Result<SummaryReport> {
    if config.trials == 0 && suite.is_randomized() {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    if !(config.tolerance > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let mut rng = seeded(config.seed ^ suite.stream().wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let checks = match suite {
        Suite::Table1 => table1()?,
        Suite::Table2 => table2()?,
        Suite::Penrose => penrose(&mut rng, config)?,
        Suite::UcConsistency => uc_consistency(&mut rng, config)?,
        Suite::MpRotation => mp_rotation(&mut rng, config)?,
        Suite::Kron => kronecker(&mut rng, config)?,
        Suite::Balance => balance(&mut rng, config)?,
    };
    let mut report = SummaryReport::new(suite.name(), checks);
    if suite.is_randomized() {
        report.seed = Some(config.seed);
        report.trials = Some(config.trials);
    }
    Ok(report)
}

/// Worst value of a per-trial deviation, with the trial that produced it.
#[derive(Default)]
struct Worst {
    value: f64,
    trial: usize,
}

impl Worst {
    fn update(&mut self, trial: usize, value: f64) {
        // NaN sticks so a broken trial cannot be hidden
        if self.value.is_nan() {
            return;
        }
        if value.is_nan() || value > self.value {
            self.value = value;
            self.trial = trial;
        }
    }

    fn check(&self, name: &str, tolerance: f64) -> CheckResult {
        CheckResult::at_most(name, Provenance::Derived, self.value, tolerance)
            .with_note(format!("worst at trial {}", self.trial))
    }
}

fn relative(lhs: &Matrix, rhs: &Matrix) -> f64 {
    if lhs.shape() != rhs.shape() {
        return f64::INFINITY;
    }
    lhs.max_abs_diff(rhs) / rhs.max_abs().max(1.0)
}

fn dims(rng: &mut ChaCha8Rng, max: usize) -> (usize, usize) {
    (rng.gen_range(1..=max), rng.gen_range(1..=max))
}

fn table1() -> Result<Vec<CheckResult>> {
    let mut runner = Runner::new();
    let mut checks = Vec::new();
    for name in ["arm-mp-m", "arm-mp-cm", "arm-mp-cm-dt1e-4", "arm-uc-cm"] {
        let report = runner.evaluate(name)?;
        checks.extend(report.checks.into_iter().map(|mut c| {
            c.name = format!("{name}: {}", c.name);
            c
        }));
    }
    Ok(checks)
}

fn table2() -> Result<Vec<CheckResult>> {
    let mut runner = Runner::new();
    let mut checks = Vec::new();
    for cell in TABLE2 {
        let report = runner.evaluate(cell.scenario)?;
        checks.extend(report.checks.into_iter().map(|mut c| {
            c.name = format!("{}: {}", cell.scenario, c.name);
            c
        }));
    }

    // Hand-derived intermediates of the mixed solution at t = 0.
    let model = RoverModel::reference(ROVER_L_TABLE);
    let part = rover_partition(&rover_jacobian(&model))?;
    let v1 = &ROVER_TARGET[..2];
    let w_inv = uc_inverse(&part.w, &BalanceSettings::default())?;
    let w_v1 = w_inv.mul_vec(v1)?;
    let expected = [-2.0 / ROVER_L_TABLE, 2.0];
    checks.push(
        CheckResult::at_most(
            format!("W^-U v1 = {:?} vs [-1.8182, 2]", w_v1),
            Provenance::Paper,
            w_v1.iter()
                .zip([-1.8182, 2.0])
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())),
            1e-4,
        )
        .with_note("closed form [-2/l, 2]"),
    );
    checks.push(CheckResult::at_most(
        "W^-U v1 equals the closed form [-2/l, 2]",
        Provenance::Derived,
        w_v1.iter()
            .zip(expected)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())),
        1e-12,
    ));

    // The mixed inverse of the rover Jacobian reproduces the published vector.
    let inv = InverseKind::Mixed { m: 2 }.apply(&part.assemble(), &InverseOptions::default())?;
    let qdot = inv.mul_vec(&ROVER_TARGET)?;
    let mixed = TABLE2
        .iter()
        .find(|c| c.scenario == "rover-mixed-m")
        .expect("mixed cell");
    checks.push(magnitude_check(
        "mixed inverse times v at t=0",
        &qdot,
        &mixed.published,
        1e-3,
    ));
    Ok(checks)
}

fn penrose(rng: &mut ChaCha8Rng, config: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let mut worst = [
        Worst::default(),
        Worst::default(),
        Worst::default(),
        Worst::default(),
    ];
    for trial in 0..config.trials {
        let (m, n) = dims(rng, 8);
        let a = uniform_matrix(rng, m, n);
        let p = pinv(&a, RankTolerance::Auto)?;
        let r = PenroseResiduals::of(&a, &p)?;
        for (w, value) in worst
            .iter_mut()
            .zip([r.apa, r.pap, r.ap_symmetric, r.pa_symmetric])
        {
            w.update(trial, value);
        }
    }
    let names = [
        "MP: A P A = A",
        "MP: P A P = P",
        "MP: (A P)^T = A P",
        "MP: (P A)^T = P A",
    ];
    Ok(worst
        .iter()
        .zip(names)
        .map(|(w, name)| w.check(name, config.tolerance))
        .collect())
}

fn uc_consistency(rng: &mut ChaCha8Rng, config: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let opts = InverseOptions::default();
    let mut unit = Worst::default();
    let mut axioms = Worst::default();
    let mut exact = Worst::default();
    let mut mp_violations = 0usize;
    for trial in 0..config.trials {
        let (m, n) = dims(rng, 6);
        let a = sparse_matrix(rng, m, n, 0.2);
        let d = log_uniform_scales(rng, n, -3.0, 3.0);
        let e = log_uniform_scales(rng, m, -3.0, 3.0);
        unit.update(
            trial,
            check_unit_consistency(InverseKind::Uc, &a, &d, &e, &opts)?,
        );
        if check_unit_consistency(InverseKind::Mp, &a, &d, &e, &opts)? > 1e-6 {
            mp_violations += 1;
        }

        let x = InverseKind::Uc.apply(&a, &opts)?;
        axioms.update(trial, PenroseResiduals::of(&a, &x)?.generalized());

        // square, well-conditioned: UC inverse is the ordinary inverse
        let k = rng.gen_range(1..=6);
        let b = &uniform_matrix(rng, k, k) + &Matrix::identity(k).scale(k as f64 + 1.0);
        let bi = InverseKind::Uc.apply(&b, &opts)?;
        exact.update(trial, (&b * &bi).max_abs_diff(&Matrix::identity(k)));
    }
    Ok(vec![
        unit.check(
            "UC: inv(E A D^-1) = D inv(A) E^-1, scales in [1e-3, 1e3]",
            config.tolerance,
        ),
        axioms.check("UC: A X A = A and X A X = X", config.tolerance),
        exact.check("UC: equals the inverse for nonsingular A", config.tolerance),
        CheckResult::at_most(
            "MP violates unit consistency on generic inputs (informational)",
            Provenance::Derived,
            0.0,
            0.0,
        )
        .with_note(format!(
            "{mp_violations} of {} trials violated",
            config.trials
        )),
    ])
}

fn mp_rotation(rng: &mut ChaCha8Rng, config: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let opts = InverseOptions::default();
    let mut mp = Worst::default();
    let mut uc_violations = 0usize;
    for trial in 0..config.trials {
        let (m, n) = dims(rng, 8);
        let a = uniform_matrix(rng, m, n);
        let u = orthonormal(rng, m);
        let v = orthonormal(rng, n);
        mp.update(
            trial,
            check_rotation_consistency(InverseKind::Mp, &a, &u, &v, &opts)?,
        );
        if check_rotation_consistency(InverseKind::Uc, &a, &u, &v, &opts)? > 1e-6 {
            uc_violations += 1;
        }
    }
    Ok(vec![
        mp.check("MP: inv(U A V) = V^T inv(A) U^T", config.tolerance),
        CheckResult::at_most(
            "UC violates rotation consistency on generic inputs (informational)",
            Provenance::Derived,
            0.0,
            0.0,
        )
        .with_note(format!(
            "{uc_violations} of {} trials violated",
            config.trials
        )),
    ])
}

fn kronecker(rng: &mut ChaCha8Rng, config: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let settings = BalanceSettings::default();
    let mut theorem1 = Worst::default();
    let mut theorem2 = Worst::default();
    let mut mp = Worst::default();
    let mut mixed_product = Worst::default();
    let mut transpose = Worst::default();
    let mut bilinear = Worst::default();
    let mut assoc = Worst::default();
    for trial in 0..config.trials {
        let (am, an) = dims(rng, 4);
        let (bm, bn) = dims(rng, 4);
        let a = uniform_matrix(rng, am, an);
        let b = uniform_matrix(rng, bm, bn);
        let ab = kron(&a, &b)?;

        let lhs = uc_inverse(&ab, &settings)?;
        let rhs = kron(&uc_inverse(&a, &settings)?, &uc_inverse(&b, &settings)?)?;
        theorem1.update(trial, relative(&lhs, &rhs));

        let lhs = pinv(&ab, RankTolerance::Auto)?;
        let rhs = kron(
            &pinv(&a, RankTolerance::Auto)?,
            &pinv(&b, RankTolerance::Auto)?,
        )?;
        mp.update(trial, relative(&lhs, &rhs));

        let factors: Vec<Matrix> = (0..3)
            .map(|_| {
                let (r, c) = dims(rng, 3);
                uniform_matrix(rng, r, c)
            })
            .collect();
        let product = kron(&kron(&factors[0], &factors[1])?, &factors[2])?;
        let mut rhs = uc_inverse(&factors[0], &settings)?;
        for f in &factors[1..] {
            rhs = kron(&rhs, &uc_inverse(f, &settings)?)?;
        }
        theorem2.update(trial, relative(&uc_inverse(&product, &settings)?, &rhs));

        let (cn, dn) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let c = uniform_matrix(rng, an, cn);
        let d = uniform_matrix(rng, bn, dn);
        let lhs = &ab * &kron(&c, &d)?;
        let rhs = kron(&(&a * &c), &(&b * &d))?;
        mixed_product.update(trial, relative(&lhs, &rhs));

        transpose.update(
            trial,
            relative(&ab.transpose(), &kron(&a.transpose(), &b.transpose())?),
        );

        let a2 = uniform_matrix(rng, am, an);
        let b2 = uniform_matrix(rng, bm, bn);
        let k = rng.gen_range(-2.0..=2.0);
        let dev = relative(&kron(&(&a + &a2), &b)?, &(&ab + &kron(&a2, &b)?))
            .max(relative(&kron(&a, &(&b + &b2))?, &(&ab + &kron(&a, &b2)?)))
            .max(relative(&kron(&a.scale(k), &b)?, &ab.scale(k)))
            .max(relative(&kron(&a, &b.scale(k))?, &ab.scale(k)));
        bilinear.update(trial, dev);

        let lhs = kron(&kron(&a, &b)?, &c)?;
        let rhs = kron(&a, &kron(&b, &c)?)?;
        assoc.update(trial, relative(&lhs, &rhs));
    }
    let tol = config.tolerance;
    Ok(vec![
        theorem1.check("UC: inv(A (x) B) = inv(A) (x) inv(B)", tol),
        theorem2.check(
            "UC: inv(A1 (x) A2 (x) A3) = inv(A1) (x) inv(A2) (x) inv(A3)",
            tol,
        ),
        mp.check("MP: pinv(A (x) B) = pinv(A) (x) pinv(B)", tol),
        mixed_product.check("(A (x) B)(C (x) D) = AC (x) BD", tol.min(1e-10)),
        transpose.check("(A (x) B)^T = A^T (x) B^T", tol.min(1e-12)),
        bilinear.check("bilinearity", tol.min(1e-12)),
        assoc.check("(A (x) B) (x) C = A (x) (B (x) C)", tol.min(1e-12)),
    ])
}

fn balance(rng: &mut ChaCha8Rng, config: &VerifyConfig) -> Result<Vec<CheckResult>> {
    let settings = BalanceSettings::default();
    let mut reconstruct = Worst::default();
    let mut products = Worst::default();
    let mut pattern = Worst::default();
    let mut equivariance = Worst::default();
    for trial in 0..config.trials {
        let (m, n) = dims(rng, 8);
        let a = sparse_matrix(rng, m, n, 0.3);
        let dec = scale_decompose(&a, &settings)?;

        reconstruct.update(
            trial,
            dec.reconstruct().frobenius_diff(&a) / a.frobenius_norm().max(1.0),
        );
        products.update(trial, unit_product_defect(&dec.s));

        let structure_ok = a
            .as_slice()
            .iter()
            .zip(dec.s.as_slice())
            .all(|(&x, &y)| (x == 0.0) == (y == 0.0) && x.signum() == y.signum());
        pattern.update(trial, if structure_ok { 0.0 } else { 1.0 });

        let d0 = log_uniform_scales(rng, m, -3.0, 3.0);
        let e0 = log_uniform_scales(rng, n, -3.0, 3.0);
        let scaled = a.scale_rows(&d0)?.scale_cols(&e0)?;
        let other = scale_decompose(&scaled, &settings)?;
        equivariance.update(trial, other.s.max_abs_diff(&dec.s));
    }
    let tol = config.tolerance;
    Ok(vec![
        reconstruct.check("D S E reconstructs A (relative Frobenius)", tol.min(1e-10)),
        products.check(
            "|product of nonzeros| = 1 in every row and column of S",
            tol,
        ),
        pattern.check("S keeps the zero pattern and signs of A", 0.0),
        equivariance.check("S is unchanged by positive diagonal scaling of A", tol),
    ])
}

/// Largest deviation from 1 of the nonzero-entry product magnitude over all
/// rows and columns that have a nonzero.
pub fn unit_product_defect(s: &Matrix) -> f64 {
    let (m, n) = s.shape();
    let line = |vals: &mut dyn Iterator<Item = f64>| {
        let (log_sum, count) = vals
            .filter(|x| *x != 0.0)
            .fold((0.0, 0usize), |(acc, c), x| (acc + x.abs().ln(), c + 1));
        if count == 0 {
            0.0
        } else {
            (log_sum.exp() - 1.0).abs()
        }
    };
    let rows = (0..m).map(|i| line(&mut s.row(i).iter().copied()));
    let cols = (0..n).map(|j| line(&mut (0..m).map(|i| s[(i, j)])));
    rows.chain(cols).fold(0.0, f64::max)
}
