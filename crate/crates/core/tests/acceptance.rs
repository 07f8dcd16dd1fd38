//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.
//!
//! Run with `cargo test -p ucinv-core --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use ucinv::kinematics::{rover_jacobian, rover_partition, RoverModel};
use ucinv::scenario::{magnitude_check, CheckResult, Runner, ROVER_L_TABLE, TABLE2};
use ucinv::verify::{run_suite, Suite, VerifyConfig};
use ucinv::{uc_inverse, BalanceSettings};

struct Outcome {
    id: u8,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn report(outcomes: &[Outcome]) {
    println!();
    for o in outcomes {
        println!(
            "[{}] AC{} {}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.detail
        );
    }
}

fn summarize(checks: &[CheckResult]) -> String {
    checks
        .iter()
        .map(|c| {
            format!(
                "{}{} (dev {:.3e} tol {:.1e})",
                if c.pass { "" } else { "!! " },
                c.name,
                c.deviation,
                c.tolerance
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn criterion_checks(
    runner: &mut Runner,
    scenario: &str,
    filter: impl Fn(&CheckResult) -> bool,
) -> Vec<CheckResult> {
    runner
        .evaluate(scenario)
        .expect("scenario runs")
        .checks
        .into_iter()
        .filter(|c| filter(c))
        .map(|mut c| {
            c.name = format!("{scenario}: {}", c.name);
            c
        })
        .collect()
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let mut runner = Runner::new();
    let checks = criterion_checks(&mut runner, "arm-mp-m", |c| {
        c.name.starts_with("table1") || c.name.starts_with("l rate")
    });
    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(1);
    Outcome {
        id: 1,
        title: "Table 1 reproduction",
        pass: fast && checks.len() == 3 && checks.iter().all(|c| c.pass),
        detail: format!("{}; runtime {:?}", summarize(&checks), elapsed),
    }
}

fn ac2() -> Outcome {
    let mut runner = Runner::new();
    let checks = criterion_checks(&mut runner, "arm-mp-m", |c| c.name.starts_with("final"));
    Outcome {
        id: 2,
        title: "final state after 0.1 s",
        pass: checks.len() == 3 && checks.iter().all(|c| c.pass),
        detail: summarize(&checks),
    }
}

fn ac3() -> Outcome {
    let mut runner = Runner::new();
    let mut checks = criterion_checks(&mut runner, "arm-mp-cm", |c| c.name.starts_with("diverged"));
    checks.extend(criterion_checks(&mut runner, "arm-mp-cm-dt1e-4", |c| {
        c.name.starts_with("diverged")
    }));
    Outcome {
        id: 3,
        title: "divergence in centimetres at dt=1e-3 only",
        pass: checks.len() == 2 && checks.iter().all(|c| c.pass),
        detail: summarize(&checks),
    }
}

fn ac4() -> Outcome {
    let mut runner = Runner::new();
    let checks = criterion_checks(&mut runner, "arm-uc-cm", |c| {
        c.name.contains("match arm-uc-m")
    });
    Outcome {
        id: 4,
        title: "UC unit invariance, metres vs centimetres",
        pass: checks.len() == 1 && checks[0].pass && checks[0].tolerance <= 1e-9,
        detail: summarize(&checks),
    }
}

fn ac5() -> Outcome {
    let mut runner = Runner::new();
    let mut checks = Vec::new();
    for cell in TABLE2 {
        checks.extend(criterion_checks(&mut runner, cell.scenario, |c| {
            c.name.starts_with("table2")
        }));
    }
    let part = rover_partition(&rover_jacobian(&RoverModel::reference(ROVER_L_TABLE))).unwrap();
    let w_v1 = uc_inverse(&part.w, &BalanceSettings::default())
        .unwrap()
        .mul_vec(&[2.0, 0.0])
        .unwrap();
    let mut intermediate = magnitude_check("W^-U v1", &w_v1, &[-1.8182, 2.0], 1e-4);
    let signed = w_v1
        .iter()
        .zip([-1.8182, 2.0])
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    intermediate.pass &= signed <= 1e-4;
    checks.push(intermediate);
    let notes: Vec<String> = checks
        .iter()
        .filter_map(|c| {
            c.note
                .as_ref()
                .filter(|n| n.contains("differs"))
                .map(|n| format!("{}: {n}", c.name))
        })
        .collect();
    Outcome {
        id: 5,
        title: "Table 2 reproduction",
        pass: checks.len() == 10 && checks.iter().all(|c| c.pass),
        detail: format!(
            "{} of 10 within tolerance, worst magnitude deviation {:.3e}; sign notes: {}",
            checks.iter().filter(|c| c.pass).count(),
            checks.iter().map(|c| c.deviation).fold(0.0, f64::max),
            notes.join(" | ")
        ),
    }
}

fn ac6() -> Outcome {
    let mut runner = Runner::new();
    let mut checks = Vec::new();
    for name in ["rover-mixed-cm", "rover-mixed-cm-rot30"] {
        checks.extend(criterion_checks(&mut runner, name, |c| {
            c.name.contains("match")
        }));
    }
    checks.extend(criterion_checks(&mut runner, "rover-mp-cm", |c| {
        c.name.contains("differ")
    }));
    checks.extend(criterion_checks(&mut runner, "rover-uc-cm-rot30", |c| {
        c.name.contains("differ")
    }));
    Outcome {
        id: 6,
        title: "mixed inverse invariance, MP and UC sensitivity",
        pass: checks.len() == 4 && checks.iter().all(|c| c.pass),
        detail: summarize(&checks),
    }
}

fn ac7() -> Outcome {
    let config = VerifyConfig::default();
    let start = Instant::now();
    let suites = [
        Suite::Penrose,
        Suite::MpRotation,
        Suite::UcConsistency,
        Suite::Balance,
        Suite::Kron,
    ];
    let reports: Vec<_> = suites
        .iter()
        .map(|&s| run_suite(s, &config).expect("suite runs"))
        .collect();
    let elapsed = start.elapsed();
    let failing: Vec<String> = reports
        .iter()
        .flat_map(|r| {
            r.checks
                .iter()
                .filter(|c| !c.pass)
                .map(move |c| format!("{}: {}", r.name, c.name))
        })
        .collect();
    let worst = reports
        .iter()
        .flat_map(|r| r.checks.iter())
        .filter(|c| c.tolerance > 0.0)
        .map(|c| c.deviation)
        .fold(0.0, f64::max);
    Outcome {
        id: 7,
        title: "property suites",
        pass: failing.is_empty()
            && elapsed < Duration::from_secs(30)
            && config.trials == 200
            && config.tolerance == 1e-8,
        detail: format!(
            "{} trials each, seed {}, worst deviation {:.3e}, runtime {:?}{}",
            config.trials,
            config.seed,
            worst,
            elapsed,
            if failing.is_empty() {
                String::new()
            } else {
                format!("; failing: {}", failing.join(", "))
            }
        ),
    }
}

#[test]
fn acceptance_criteria() {
    let outcomes = vec![ac1(), ac2(), ac3(), ac4(), ac5(), ac6(), ac7()];
    report(&outcomes);
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failing acceptance criteria: {failed:?}");
}
