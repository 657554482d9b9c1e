use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use ptbrach_core::brachsolver::{self, FinalStateSpec, EVOLUTION_TOL, NORM_CONDITION_TOL};
use ptbrach_core::hermitian::{self, EnergyConstraint, GridSpec, PhaseConvention, TargetState};
use ptbrach_core::linalg2::{propagator_oracle, StateVector2};
use ptbrach_core::verify::{self, Suite, VerifyOptions};
use ptbrach_core::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Cli, Command, FlipArgs, HermitianArgs, ReachArgs, VerifyArgs};
use crate::report::{
    CsvTable, HermitianResult, OracleSummary, ReachRow, Report, RowStatus, RunConfig, SeriesComparison, Status,
};

/// Largest accepted `--tolerance`.
pub const MAX_TOLERANCE: f64 = 1e-4;
/// Slack on `|a|² + |b|² = 1` for targets given on the command line.
pub const INPUT_NORM_TOL: f64 = 1e-9;
/// Fidelity deficit allowed for the Hermitian optimum at `τ`.
pub const HERMITIAN_FIDELITY_TOL: f64 = 1e-9;
/// Flip fidelity deficit allowed at `τ`.
pub const FLIP_FIDELITY_TOL: f64 = 1e-8;
/// Allowed relative distance between the grid optimizer and `τ`.
pub const ORACLE_AGREEMENT: f64 = 0.01;

/// What the binary should print and how it should exit.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub output: String,
    pub status: Status,
    /// One-line summaries for stderr.
    pub notes: Vec<String>,
}

/// Anything that makes the inputs unusable; exits with code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, InputError> {
    let c = EnergyConstraint::new(cli.omega, cli.hbar)?;
    if let Some(tol) = cli.tolerance {
        if !(tol > 0.0 && tol <= MAX_TOLERANCE) {
            return Err(InputError(format!(
                "--tolerance must lie in (0, {MAX_TOLERANCE:e}], got {tol:e}"
            )));
        }
    }
    let config = |args: Value| RunConfig {
        omega: c.omega,
        hbar: c.hbar,
        tolerance: cli.tolerance,
        args: match args {
            Value::Object(m) => m.into_iter().collect(),
            _ => BTreeMap::new(),
        },
    };
    match &cli.command {
        Command::HermitianOptimal(a) => {
            let (report, notes) = hermitian_optimal(a, &c, cli.tolerance)?;
            Ok(finish(report.with_config(config(json!(a_config(a)))), cli, notes))
        }
        Command::PtFlip(a) => {
            let report = pt_flip(a, &c, cli.tolerance)?;
            let cfg =
                json!({ "alpha": a.alpha, "sweep": a.sweep.map(|s| [s.start, s.stop, s.step]), "theta": a.theta });
            Ok(finish(report.with_config(config(cfg)), cli, Vec::new()))
        }
        Command::PtReach(a) => {
            let report = pt_reach(a, &c, cli.tolerance)?;
            let cfg = json!({
                "u": a.u, "v": a.v, "A": a.phase, "xi": a.xi, "T": a.t,
                "T_sweep": a.t_sweep.map(|s| [s.start, s.stop, s.step]), "series": a.series,
            });
            Ok(finish(report.with_config(config(cfg)), cli, Vec::new()))
        }
        Command::Verify(a) => {
            let (report, notes) = run_verify(a, &c, cli.tolerance);
            let names: Vec<_> = a.suites.iter().map(|s| s.name()).collect();
            Ok(finish(
                report.with_config(config(json!({ "suites": names, "seed": a.seed }))),
                cli,
                notes,
            ))
        }
    }
}

fn a_config(a: &HermitianArgs) -> Value {
    let c = |z: Option<crate::args::ComplexArg>| z.map(|z| [z.0.re, z.0.im]);
    json!({ "a": c(a.a), "b": c(a.b), "arg_a": a.arg_a, "oracle": a.oracle, "grid": a.grid })
}

fn finish<R: CsvTable + Serialize>(report: Report<R>, cli: &Cli, notes: Vec<String>) -> Outcome {
    Outcome {
        output: report.render(cli.format),
        status: report.status,
        notes,
    }
}

impl<R> Report<R> {
    fn new(command: &str, results: R, residuals: BTreeMap<String, f64>, status: Status) -> Self {
        let config = RunConfig {
            omega: 0.0,
            hbar: 0.0,
            tolerance: None,
            args: BTreeMap::new(),
        };
        Report {
            command: command.to_string(),
            config,
            results,
            residuals,
            status,
        }
    }

    fn with_config(mut self, config: RunConfig) -> Self {
        self.config = config;
        self
    }
}

/// Fills in a missing amplitude as the nonnegative real that normalizes the
/// state, checks the norm, and rescales away the residual slack.
pub fn resolve_target(a: Option<Complex64>, b: Option<Complex64>) -> Result<TargetState, InputError> {
    let fill = |given: Complex64| {
        let rest = 1.0 - given.norm_sqr();
        if rest < -INPUT_NORM_TOL {
            return Err(InputError(format!("|amplitude|^2 = {} exceeds 1", given.norm_sqr())));
        }
        Ok(Complex64::new(rest.max(0.0).sqrt(), 0.0))
    };
    let (a, b) = match (a, b) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) => (a, fill(a)?),
        (None, Some(b)) => (fill(b)?, b),
        (None, None) => return Err(InputError("give at least one of --a, --b".into())),
    };
    let norm_sq = a.norm_sqr() + b.norm_sqr();
    if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > INPUT_NORM_TOL {
        return Err(Error::InvalidTarget { norm_sq }.into());
    }
    Ok(TargetState::normalized(a, b)?)
}

pub fn hermitian_optimal(
    args: &HermitianArgs,
    c: &EnergyConstraint,
    tolerance: Option<f64>,
) -> Result<(Report<HermitianResult>, Vec<String>), InputError> {
    let target = resolve_target(args.a.map(|z| z.0), args.b.map(|z| z.0))?;
    let tau = hermitian::optimal_time(&target, c);
    let convention = match args.arg_a {
        Some(phi) if phi.is_finite() => PhaseConvention::ArgA(phi),
        Some(phi) => return Err(InputError(format!("--arg-a must be finite, got {phi}"))),
        None => PhaseConvention::ZeroArgA,
    };
    let params = match hermitian::optimal_hamiltonian(&target, c, convention) {
        Ok(p) => Some(p),
        Err(Error::DegenerateTarget) => None,
        Err(e) => return Err(e.into()),
    };
    let hamiltonian = params.map(|p| p.build()).transpose()?;
    // Replay with the series exponential rather than the closed form.
    let psi = match &hamiltonian {
        Some(h) => propagator_oracle(h, tau, c.hbar).apply(&StateVector2::up()),
        None => StateVector2::up(),
    };
    let fidelity = hermitian::target_fidelity(&target, &psi);

    let mut residuals = BTreeMap::new();
    let deficit = 1.0 - fidelity;
    residuals.insert("fidelity_deficit".to_string(), deficit);
    let mut status = if deficit <= tolerance.unwrap_or(HERMITIAN_FIDELITY_TOL) {
        Status::Ok
    } else {
        Status::EvolutionCheckFailed
    };
    let mut notes = Vec::new();

    let oracle = if args.oracle {
        let grid = GridSpec::uniform(args.grid);
        let result = hermitian::brute_force_optimal_time(&target, c, &grid)?;
        let relative_deviation = if tau > 0.0 {
            (result.time - tau) / tau
        } else {
            result.time
        };
        let resolution_error = grid.resolution_error(c);
        residuals.insert("oracle_relative_deviation".to_string(), relative_deviation);
        if relative_deviation.abs() > ORACLE_AGREEMENT || result.time < tau - resolution_error {
            status = status.worst(Status::EvolutionCheckFailed);
        }
        notes.push(format!(
            "grid optimizer: t = {:.12} vs tau = {:.12} (relative {:+.2e}, {} evaluations)",
            result.time, tau, relative_deviation, result.evaluations
        ));
        Some(OracleSummary {
            grid: args.grid,
            result,
            relative_deviation,
            resolution_error,
        })
    } else {
        None
    };

    let results = HermitianResult {
        a: target.a,
        b: target.b,
        tau,
        params,
        hamiltonian,
        fidelity,
        oracle,
    };
    Ok((Report::new("hermitian-optimal", results, residuals, status), notes))
}

pub fn pt_flip(
    args: &FlipArgs,
    c: &EnergyConstraint,
    tolerance: Option<f64>,
) -> Result<Report<Vec<brachsolver::FlipRow>>, InputError> {
    let alphas = match (args.alpha, args.sweep) {
        (Some(a), None) => vec![a],
        (None, Some(s)) => s.values(),
        _ => return Err(InputError("give exactly one of --alpha, --sweep".into())),
    };
    if alphas.is_empty() {
        return Err(InputError("sweep is empty".into()));
    }
    for &a in &alphas {
        if !(a.abs() < FRAC_PI_2) {
            return Err(InputError(format!("alpha = {a} is outside (-pi/2, pi/2)")));
        }
    }
    let rows = brachsolver::flip_sweep(&alphas, args.theta, c)?;
    let worst_deficit = rows.iter().map(|r| 1.0 - r.fidelity).fold(0.0, f64::max);
    let worst_drift = rows.iter().map(|r| r.norm_drift).fold(0.0, f64::max);
    let mut residuals = BTreeMap::new();
    residuals.insert("fidelity_deficit".to_string(), worst_deficit);
    residuals.insert("norm_drift".to_string(), worst_drift);
    let status = if worst_deficit <= tolerance.unwrap_or(FLIP_FIDELITY_TOL) {
        Status::Ok
    } else {
        Status::EvolutionCheckFailed
    };
    Ok(Report::new("pt-flip", rows, residuals, status))
}

fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(std::f64::consts::TAU);
    if y > std::f64::consts::PI {
        y - std::f64::consts::TAU
    } else {
        y
    }
}

pub fn pt_reach(
    args: &ReachArgs,
    c: &EnergyConstraint,
    tolerance: Option<f64>,
) -> Result<Report<Vec<ReachRow>>, InputError> {
    let f = FinalStateSpec::new(args.u, args.v, args.phase, args.xi)?;
    let times = match (args.t, args.t_sweep) {
        (Some(t), None) => vec![t],
        (None, Some(s)) => s.values(),
        _ => return Err(InputError("give exactly one of --T, --T-sweep".into())),
    };
    if times.is_empty() {
        return Err(InputError("sweep is empty".into()));
    }
    if let Some(&t) = times.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(InputError(format!("T must be positive and finite, got {t}")));
    }
    let coefficients = if args.series {
        Some(brachsolver::laurent_coefficients(&f)?)
    } else {
        None
    };
    let replay_tol = tolerance.unwrap_or(EVOLUTION_TOL);
    let norm_tol = tolerance.unwrap_or(NORM_CONDITION_TOL);

    let mut rows = Vec::with_capacity(times.len());
    let mut status = Status::Ok;
    let (mut worst_res, mut worst_norm, mut worst_replay) = (0.0f64, 0.0f64, 0.0f64);
    for &t in &times {
        let series = |sol: Option<&brachsolver::ReachabilitySolution>| {
            coefficients.map(|k| SeriesComparison {
                coefficients: k,
                delta_x: sol.map(|s| s.vars.x * t - k.x_m1),
                delta_y: sol.map(|s| s.vars.y * t - k.y_m1),
                delta_z: sol.map(|s| s.vars.z * t - k.z_m1),
                delta_gamma: sol.map(|s| wrap_angle(s.vars.gamma - k.gamma0)),
            })
        };
        match brachsolver::solve_reachability_auto(&f, t, c) {
            Ok(sol) => {
                let replay = sol.replay_error(&f, c);
                worst_res = worst_res.max(sol.max_residual());
                worst_norm = worst_norm.max(sol.norm_condition.abs());
                worst_replay = worst_replay.max(replay);
                let row_status = if replay <= replay_tol && sol.norm_condition.abs() <= norm_tol {
                    RowStatus::Ok
                } else {
                    status = status.worst(Status::EvolutionCheckFailed);
                    RowStatus::EvolutionCheckFailed
                };
                rows.push(ReachRow {
                    t,
                    status: row_status,
                    solution: Some(sol),
                    replay_error: Some(replay),
                    best_residual: None,
                    series: series(Some(&sol)),
                });
            }
            Err(Error::NoConvergence { best_residual, .. }) => {
                status = status.worst(Status::NoConvergence);
                worst_res = worst_res.max(best_residual);
                rows.push(ReachRow {
                    t,
                    status: RowStatus::NoConvergence,
                    solution: None,
                    replay_error: None,
                    best_residual: Some(best_residual),
                    series: series(None),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut residuals = BTreeMap::new();
    residuals.insert("equations".to_string(), worst_res);
    residuals.insert("norm_condition".to_string(), worst_norm);
    residuals.insert("replay_error".to_string(), worst_replay);
    Ok(Report::new("pt-reach", rows, residuals, status))
}

pub fn run_verify(
    args: &VerifyArgs,
    c: &EnergyConstraint,
    tolerance: Option<f64>,
) -> (Report<Vec<verify::SuiteReport>>, Vec<String>) {
    let suites: Vec<Suite> = if args.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suites.clone()
    };
    let opts = VerifyOptions {
        constraint: *c,
        tolerance,
        seed: args.seed,
    };
    let reports = verify::run_suites(&suites, &opts);
    let notes = reports
        .iter()
        .map(|r| {
            format!(
                "{:>2} {:<24} {}  worst {:.3e} / threshold {:.1e}  ({} cases, {:.1}s)",
                r.number,
                r.suite.name(),
                if r.passed { "PASS" } else { "FAIL" },
                r.worst_residual,
                r.threshold,
                r.cases,
                r.seconds
            )
        })
        .collect();
    let residuals = reports
        .iter()
        .map(|r| (r.suite.name().to_string(), r.worst_residual))
        .collect();
    let status = if reports.iter().all(|r| r.passed) {
        Status::Ok
    } else {
        Status::VerificationFailed
    };
    (Report::new("verify", reports, residuals, status), notes)
}
