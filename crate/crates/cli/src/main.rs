use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ucinv::kinematics::{ArmModel, RoverModel};
use ucinv::scenario::{
    self, CheckResult, Provenance, Runner, SummaryReport, ARM_TARGET, CM_PER_M, ROVER_L_TABLE,
    ROVER_TARGET,
};
use ucinv::simulation::{run, Model, RunOutput, SimulationConfig};
use ucinv::text::{format_number, parse_matrix, write_matrix};
use ucinv::verify::{run_suite, run_suites, Suite, VerifyConfig, DEFAULT_SEED};
use ucinv::{BalanceSettings, InverseKind, InverseOptions, RankTolerance};

const SEED_ENV: &str = "UCINV_SEED";

/// Moore-Penrose, unit-consistent and mixed generalized inverses.
#[derive(Debug, Parser)]
#[command(name = "ucinv", version, args_override_self = true)]
struct Cli {
    /// key=value file whose entries act as default flags for the subcommand
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Invert a matrix read from a CSV file.
    Invert(InvertArgs),
    /// Run a built-in scenario or a custom kinematics simulation.
    Simulate(SimulateArgs),
    /// Run reproduction and property suites.
    Verify(VerifyArgs),
    /// List the built-in scenarios.
    List,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Mp,
    Uc,
    Mixed,
}

#[derive(Debug, Args)]
struct BalanceArgs {
    /// Convergence tolerance of the balancing iteration
    #[arg(long, default_value_t = BalanceSettings::default().convergence_tolerance)]
    balance_tol: f64,
    /// Iteration cap of the balancing iteration
    #[arg(long, default_value_t = BalanceSettings::default().max_iterations)]
    max_iterations: usize,
    /// Entries with magnitude at or below this are treated as structural zeros
    #[arg(long, default_value_t = 0.0)]
    zero_threshold: f64,
    /// Absolute singular-value cutoff (default: max(m,n)·σmax·ε)
    #[arg(long)]
    rank_tol: Option<f64>,
}

impl BalanceArgs {
    fn options(&self) -> Result<InverseOptions, String> {
        let balance = BalanceSettings {
            convergence_tolerance: self.balance_tol,
            max_iterations: self.max_iterations,
            zero_threshold: self.zero_threshold,
        };
        balance.validate().map_err(|e| e.to_string())?;
        let rank = match self.rank_tol {
            None => RankTolerance::Auto,
            Some(t) if t >= 0.0 && t.is_finite() => RankTolerance::Absolute(t),
            Some(t) => return Err(format!("--rank-tol must be non-negative, got {t}")),
        };
        Ok(InverseOptions { rank, balance })
    }
}

#[derive(Debug, Args)]
struct InvertArgs {
    /// Input matrix (comma-separated rows)
    input: PathBuf,
    #[arg(long, value_enum, default_value = "uc")]
    kind: Kind,
    /// Size of the unit-consistent block for --kind mixed
    #[arg(long)]
    split: Option<usize>,
    #[command(flatten)]
    balance: BalanceArgs,
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Arm,
    Rover,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Units {
    M,
    Cm,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Built-in scenario; flags below override its settings
    scenario: Option<String>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    /// mp, uc, mixed or mixed:<m>
    #[arg(long)]
    inverse: Option<String>,
    #[arg(long, value_enum)]
    units: Option<Units>,
    /// Frame rotation in degrees (rover only)
    #[arg(long)]
    rotation_deg: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    duration: Option<f64>,
    /// Rover arm length in metres
    #[arg(long)]
    rover_length: Option<f64>,
    /// Target tip velocity in base units, comma-separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    target: Option<Vec<f64>>,
    /// Trajectory CSV (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary (default: stdout when --out is set, otherwise stderr)
    #[arg(long)]
    summary: Option<PathBuf>,
}

impl SimulateArgs {
    fn has_overrides(&self) -> bool {
        self.model.is_some()
            || self.inverse.is_some()
            || self.units.is_some()
            || self.rotation_deg.is_some()
            || self.dt.is_some()
            || self.duration.is_some()
            || self.rover_length.is_some()
            || self.target.is_some()
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suite name or `all`
    suite: String,
    /// Seed for randomized suites (env: UCINV_SEED)
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = ucinv::verify::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = ucinv::verify::PROPERTY_TOLERANCE)]
    tolerance: f64,
}

enum Failure {
    /// Bad input or usage: exit 2.
    Usage(String),
    /// Ran, but a check failed: exit 1.
    Check,
}

impl From<ucinv::Error> for Failure {
    fn from(e: ucinv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Usage(e)
    }
}

const SUBCOMMANDS: [&str; 4] = ["invert", "simulate", "verify", "list"];

/// Splices `key=value` lines from `--config FILE` in as `--key value` right
/// after the subcommand, so flags given on the command line still win.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let text = arg.to_string_lossy().into_owned();
        if text == "--config" {
            let path = iter.next().ok_or("--config needs a file")?;
            config = Some(PathBuf::from(path));
        } else if let Some(path) = text.strip_prefix("--config=") {
            config = Some(PathBuf::from(path));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut injected = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), n + 1))?;
        injected.push(OsString::from(format!(
            "--{}",
            key.trim().replace('_', "-")
        )));
        injected.push(OsString::from(value.trim()));
    }
    let at = rest
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
        .map_or(rest.len(), |i| i + 1);
    rest.splice(at..at, injected);
    Ok(rest)
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            Err(Failure::Usage(format!("stdout: {e}")))
        }
        _ => Ok(()),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => emit(text),
    }
}

fn cmd_invert(args: &InvertArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.input.display())))?;
    let a = parse_matrix(&text)?;
    let kind = match (args.kind, args.split) {
        (Kind::Mp, None) => InverseKind::Mp,
        (Kind::Uc, None) => InverseKind::Uc,
        (Kind::Mixed, Some(m)) => InverseKind::Mixed { m },
        (Kind::Mixed, None) => return Err(Failure::Usage("--kind mixed needs --split".into())),
        (_, Some(_)) => {
            return Err(Failure::Usage(
                "--split only applies to --kind mixed".into(),
            ))
        }
    };
    let (inv, _) = kind.invert(&a, &args.balance.options()?)?;
    write_output(args.out.as_deref(), &write_matrix(&inv))
}

fn parse_inverse(text: &str, model: &Model) -> Result<InverseKind, Failure> {
    if text == "mixed" {
        return match model {
            Model::Rover(_) => Ok(InverseKind::Mixed { m: 2 }),
            Model::Arm(_) => Err(Failure::Usage(
                "the arm needs an explicit split: mixed:<m>".into(),
            )),
        };
    }
    Ok(text.parse()?)
}

fn custom_config(
    args: &SimulateArgs,
    base: Option<SimulationConfig>,
) -> Result<SimulationConfig, Failure> {
    let mut config = match (base, args.model) {
        (Some(config), None) => config,
        (base, Some(model)) => {
            let model = match model {
                ModelArg::Arm => Model::Arm(ArmModel::reference()),
                ModelArg::Rover => Model::Rover(RoverModel::reference(ROVER_L_TABLE)),
            };
            let target = match model {
                Model::Arm(_) => ARM_TARGET.to_vec(),
                Model::Rover(_) => ROVER_TARGET.to_vec(),
            };
            let inverse = base.map_or(InverseKind::Mp, |b| b.inverse);
            SimulationConfig::new(model, inverse, target)
        }
        (None, None) => {
            return Err(Failure::Usage(
                "give a scenario name or --model and --inverse".into(),
            ))
        }
    };
    match &args.inverse {
        Some(text) => config.inverse = parse_inverse(text, &config.model)?,
        None if args.model.is_some() => {
            return Err(Failure::Usage("--model needs --inverse".into()))
        }
        None => {}
    }
    if let Some(l) = args.rover_length {
        match &mut config.model {
            Model::Rover(rover) => rover.q[1] = l,
            Model::Arm(_) => {
                return Err(Failure::Usage("--rover-length applies to the rover".into()))
            }
        }
    }
    if let Some(units) = args.units {
        config.unit_scale = match units {
            Units::M => 1.0,
            Units::Cm => CM_PER_M,
        };
    }
    if let Some(deg) = args.rotation_deg {
        config.frame_rotation = deg.to_radians();
    }
    if let Some(dt) = args.dt {
        config.dt = dt;
    }
    if let Some(duration) = args.duration {
        config.duration = duration;
    }
    if let Some(target) = &args.target {
        config.target = target.clone();
    }
    config.validate()?;
    Ok(config)
}

fn trajectory_csv(config: &SimulationConfig, out: &RunOutput) -> String {
    let k = config.model.joint_count();
    let dim = config.model.task_dim();
    let angular = config.model.angular_joints();
    let mut header = vec!["t".to_string()];
    header.extend((1..=k).map(|i| format!("qd_{i}")));
    header.extend((1..=k).map(|i| format!("q_{i}")));
    header.extend((1..=dim).map(|i| format!("v_{i}")));
    header.push("residual".into());

    let shown = |vals: &[f64]| -> Vec<String> {
        vals.iter()
            .zip(angular)
            .map(|(&x, &deg)| format_number(if deg { x.to_degrees() } else { x }))
            .collect()
    };
    let mut csv = header.join(",");
    csv.push('\n');
    for r in &out.records {
        let mut row = vec![format_number(r.t)];
        row.extend(shown(&r.qdot));
        row.extend(shown(&r.q));
        row.extend(r.achieved_v.iter().map(|&x| format_number(x)));
        row.push(format_number(r.residual));
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    csv
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let spec = match &args.scenario {
        Some(name) => Some(scenario::find(name).ok_or_else(|| {
            Failure::Usage(format!(
                "unknown scenario {name:?}; known scenarios:\n  {}",
                scenario::names().join("\n  ")
            ))
        })?),
        None => None,
    };

    let (config, out, report) = match spec {
        Some(spec) if !args.has_overrides() => {
            let mut runner = Runner::new();
            let report = runner.evaluate(spec.name)?;
            let (_, out) = runner.run(spec.name)?;
            (spec.config, out.clone(), report)
        }
        spec => {
            let config = custom_config(args, spec.map(|s| s.config))?;
            let out = run(&config)?;
            let v = out.transform.transform_target(&config.target)?;
            let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
            let worst = out.records.iter().fold(0.0_f64, |m, r| m.max(r.residual));
            let mut report = SummaryReport::new(
                args.scenario.clone().unwrap_or_else(|| "custom".into()),
                vec![CheckResult::at_most(
                    "relative residual |J qdot - v| / max(1,|v|) at every step",
                    Provenance::Derived,
                    worst / scale,
                    1e-9,
                )],
            );
            report.divergence = Some(out.divergence.clone());
            report.balance = Some(out.balance);
            (config, out, report)
        }
    };

    write_output(args.out.as_deref(), &trajectory_csv(&config, &out))?;
    let json = serde_json::to_string_pretty(&report).expect("summary serializes") + "\n";
    match (&args.summary, &args.out) {
        (Some(path), _) => write_output(Some(path), &json)?,
        (None, Some(_)) => emit(&json)?,
        (None, None) => eprint!("{json}"),
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let seed = match args.seed {
        Some(s) => s,
        None => match std::env::var(SEED_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| {
                Failure::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))
            })?,
            Err(_) => DEFAULT_SEED,
        },
    };
    let config = VerifyConfig {
        seed,
        trials: args.trials,
        tolerance: args.tolerance,
    };
    let (json, passed) = if args.suite == "all" {
        let report = run_suites(&Suite::ALL, &config)?;
        (serde_json::to_string_pretty(&report), report.passed)
    } else {
        let suite: Suite = args.suite.parse()?;
        let report = run_suite(suite, &config)?;
        (serde_json::to_string_pretty(&report), report.passed)
    };
    emit(&(json.expect("report serializes") + "\n"))?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    let result = match &cli.command {
        Command::Invert(a) => cmd_invert(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::List => {
            let listing: String = scenario::registry()
                .iter()
                .map(|s| format!("{:<22} {}\n", s.name, s.description))
                .collect();
            emit(&listing)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
