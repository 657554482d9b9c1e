//! Report envelope shared by all subcommands, plus the CSV layouts.

use std::collections::BTreeMap;

use clap::ValueEnum;
use num_complex::Complex64;
use ptbrach_core::brachsolver::{FlipRow, LaurentCoefficients, ReachabilitySolution};
use ptbrach_core::hermitian::{HermitianParams, OracleResult};
use ptbrach_core::linalg2::ComplexMatrix2;
use ptbrach_core::verify::SuiteReport;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    VerificationFailed,
    InvalidInput,
    EvolutionCheckFailed,
    NoConvergence,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::VerificationFailed => 1,
            Status::InvalidInput => 2,
            Status::EvolutionCheckFailed => 3,
            Status::NoConvergence => 4,
        }
    }

    /// The more severe of two outcomes, ranked by exit code.
    pub fn worst(self, other: Status) -> Status {
        if other.exit_code() > self.exit_code() {
            other
        } else {
            self
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub omega: f64,
    pub hbar: f64,
    pub tolerance: Option<f64>,
    /// Subcommand arguments as given, after defaults.
    pub args: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<R> {
    pub command: String,
    pub config: RunConfig,
    pub results: R,
    pub residuals: BTreeMap<String, f64>,
    pub status: Status,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianResult {
    pub a: Complex64,
    pub b: Complex64,
    pub tau: f64,
    /// Absent when `b = 0`: the start state already is the target.
    pub params: Option<HermitianParams>,
    pub hamiltonian: Option<ComplexMatrix2>,
    pub fidelity: f64,
    pub oracle: Option<OracleSummary>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub grid: usize,
    pub result: OracleResult,
    pub relative_deviation: f64,
    pub resolution_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    EvolutionCheckFailed,
    NoConvergence,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachRow {
    #[serde(rename = "T")]
    pub t: f64,
    pub status: RowStatus,
    pub solution: Option<ReachabilitySolution>,
    pub replay_error: Option<f64>,
    /// Smallest residual seen when no seed converged.
    pub best_residual: Option<f64>,
    pub series: Option<SeriesComparison>,
}

/// Leading series terms next to the solution: `T·X − X₋₁` and friends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesComparison {
    pub coefficients: LaurentCoefficients,
    pub delta_x: Option<f64>,
    pub delta_y: Option<f64>,
    pub delta_z: Option<f64>,
    pub delta_gamma: Option<f64>,
}

pub const HERMITIAN_HEADER: &str = "a_re,a_im,b_re,b_im,tau,r,s,u,theta,fidelity,oracle_tau";
pub const FLIP_HEADER: &str = "alpha,s,r,theta,tau,fidelity,max_element,norm_drift";
pub const REACH_HEADER: &str =
    "T,status,X,Y,Z,gamma,B,kappa,x,y,z,r0,r1,r2,r3,r4,norm_condition,replay_error,iterations,\
x_m1,y_m1,z_m1,gamma0,delta_x,delta_y,delta_z,delta_gamma";
pub const VERIFY_HEADER: &str = "suite,number,passed,worst_residual,threshold,cases,failures,seconds";

pub const CSV_SCHEMAS: &str = "\
CSV columns (one header line, then one row per result; blank = not available):
  hermitian-optimal  a_re,a_im,b_re,b_im,tau,r,s,u,theta,fidelity,oracle_tau
  pt-flip            alpha,s,r,theta,tau,fidelity,max_element,norm_drift
  pt-reach           T,status,X,Y,Z,gamma,B,kappa,x,y,z,r0,r1,r2,r3,r4,norm_condition,
                     replay_error,iterations,x_m1,y_m1,z_m1,gamma0,delta_x,delta_y,delta_z,delta_gamma
  verify             suite,number,passed,worst_residual,threshold,cases,failures,seconds

Exit codes: 0 ok, 1 verification failed, 2 invalid input,
3 evolution check failed, 4 no convergence (report still written).";

/// Table form of a result set.
pub trait CsvTable {
    const HEADER: &'static str;
    fn rows(&self) -> Vec<Vec<String>>;
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl CsvTable for HermitianResult {
    const HEADER: &'static str = HERMITIAN_HEADER;

    fn rows(&self) -> Vec<Vec<String>> {
        let p = self.params;
        vec![vec![
            num(self.a.re),
            num(self.a.im),
            num(self.b.re),
            num(self.b.im),
            num(self.tau),
            opt(p.map(|p| p.r)),
            opt(p.map(|p| p.s)),
            opt(p.map(|p| p.u)),
            opt(p.map(|p| p.theta)),
            num(self.fidelity),
            opt(self.oracle.map(|o| o.result.time)),
        ]]
    }
}

impl CsvTable for Vec<FlipRow> {
    const HEADER: &'static str = FLIP_HEADER;

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| {
                [
                    r.alpha,
                    r.s,
                    r.r,
                    r.theta,
                    r.tau,
                    r.fidelity,
                    r.max_element,
                    r.norm_drift,
                ]
                .into_iter()
                .map(num)
                .collect()
            })
            .collect()
    }
}

impl RowStatus {
    fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::EvolutionCheckFailed => "evolution_check_failed",
            RowStatus::NoConvergence => "no_convergence",
        }
    }
}

impl CsvTable for Vec<ReachRow> {
    const HEADER: &'static str = REACH_HEADER;

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|row| {
                let mut out = vec![num(row.t), row.status.as_str().to_string()];
                match &row.solution {
                    Some(sol) => {
                        let v = sol.vars;
                        let p = sol.params;
                        out.extend([v.x, v.y, v.z, v.gamma, v.b, v.kappa, p.x, p.y, p.z].map(num));
                        out.extend(sol.residuals.map(num));
                        out.push(num(sol.norm_condition));
                        out.push(opt(row.replay_error));
                        out.push(sol.iterations.to_string());
                    }
                    None => out.extend(std::iter::repeat_n(String::new(), 17)),
                }
                match &row.series {
                    Some(s) => {
                        let k = s.coefficients;
                        out.extend([k.x_m1, k.y_m1, k.z_m1, k.gamma0].map(num));
                        out.extend([s.delta_x, s.delta_y, s.delta_z, s.delta_gamma].map(opt));
                    }
                    None => out.extend(std::iter::repeat_n(String::new(), 8)),
                }
                out
            })
            .collect()
    }
}

impl CsvTable for Vec<SuiteReport> {
    const HEADER: &'static str = VERIFY_HEADER;

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| {
                vec![
                    r.suite.name().to_string(),
                    r.number.to_string(),
                    r.passed.to_string(),
                    num(r.worst_residual),
                    num(r.threshold),
                    r.cases.to_string(),
                    r.failures.to_string(),
                    format!("{:.3}", r.seconds),
                ]
            })
            .collect()
    }
}

impl<R: CsvTable + Serialize> Report<R> {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(R::HEADER);
        s.push('\n');
        for row in self.results.rows() {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}
