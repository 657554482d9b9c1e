//! End-to-end verification suites.
//!
//! Each suite samples its own deterministic set of specs, compares closed
//! forms against the numerical oracles and reports the worst residual
//! against a pinned threshold. A global tolerance override replaces every
//! suite's threshold.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::brachsolver::{
    evolve_pt3, evolve_pt4, flip_sweep, laurent_coefficients, solve_reachability_auto, spin_flip_time, FinalStateSpec,
    EVOLUTION_TOL, NORM_CONDITION_TOL, RESIDUAL_TOL,
};
use crate::error::Result;
use crate::hermitian::{
    brute_force_optimal_time, evolve_hermitian, optimal_hamiltonian, optimal_time, target_fidelity, EnergyConstraint,
    GridSpec, PhaseConvention,
};
use crate::linalg2::{propagator, propagator_oracle, ComplexMatrix2, StateVector2};
use crate::ptcore::{equivalent_hermitian, pt3_eigensystem, spectral_distance, verify_metric_axioms, MetricContext};
use crate::sampling;

/// Grid resolution used by the Hermitian-optimum suite.
pub const ORACLE_GRID: usize = 200;

/// Minimum observed convergence order accepted for the small-`T` series.
pub const SERIES_MIN_ORDER: f64 = 1.95;

/// Errors below this are treated as converged when measuring the order.
pub const SERIES_NOISE_FLOOR: f64 = 1e-10;

/// The horizons at which the small-`T` series is compared.
pub const SERIES_TIMES: [f64; 3] = [0.02, 0.01, 0.005];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    HermitianOptimum,
    OptimalHamiltonian,
    MetricAxioms,
    EigenstateNorms,
    SpinFlip,
    HyperbolicConstraints,
    EquivalenceMap,
    Propagators,
    Reachability,
    LaurentSeries,
    NormConservation,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::HermitianOptimum,
        Suite::OptimalHamiltonian,
        Suite::MetricAxioms,
        Suite::EigenstateNorms,
        Suite::SpinFlip,
        Suite::HyperbolicConstraints,
        Suite::EquivalenceMap,
        Suite::Propagators,
        Suite::Reachability,
        Suite::LaurentSeries,
        Suite::NormConservation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::HermitianOptimum => "hermitian-optimum",
            Suite::OptimalHamiltonian => "optimal-hamiltonian",
            Suite::MetricAxioms => "metric-axioms",
            Suite::EigenstateNorms => "eigenstate-norms",
            Suite::SpinFlip => "spin-flip",
            Suite::HyperbolicConstraints => "hyperbolic-constraints",
            Suite::EquivalenceMap => "equivalence-map",
            Suite::Propagators => "propagators",
            Suite::Reachability => "reachability",
            Suite::LaurentSeries => "laurent-series",
            Suite::NormConservation => "norm-conservation",
        }
    }

    /// 1-based position in [`Suite::ALL`].
    pub fn number(self) -> usize {
        Suite::ALL.iter().position(|&s| s == self).expect("listed") + 1
    }

    /// Threshold on the suite's residual when no override is given.
    pub fn default_threshold(self) -> f64 {
        match self {
            Suite::HermitianOptimum => 0.01,
            Suite::OptimalHamiltonian => 1e-9,
            Suite::MetricAxioms => 1e-10,
            Suite::EigenstateNorms => 1e-12,
            Suite::SpinFlip => 1e-8,
            Suite::HyperbolicConstraints => 1e-10,
            Suite::EquivalenceMap => 1e-10,
            Suite::Propagators => 1e-10,
            Suite::Reachability => RESIDUAL_TOL,
            Suite::LaurentSeries => 2.0 - SERIES_MIN_ORDER,
            Suite::NormConservation => 1e-10,
        }
    }

    /// What the residual measures.
    pub fn residual_meaning(self) -> &'static str {
        match self {
            Suite::HermitianOptimum => "max |oracle time / closed-form time - 1|",
            Suite::OptimalHamiltonian => "max 1 - fidelity",
            Suite::MetricAxioms => "max of |C^2 - 1|, |[C,H]|, |[C,PT]|",
            Suite::EigenstateNorms => "max |CPT norm - sqrt(2 cos alpha)|",
            Suite::SpinFlip => "max 1 - flip fidelity",
            Suite::HyperbolicConstraints => "max relative |gap^2 - omega^2|",
            Suite::EquivalenceMap => "max of hermiticity and spectral residuals, relative",
            Suite::Propagators => "max closed-form vs series difference, relative",
            Suite::Reachability => "max equation residual",
            Suite::LaurentSeries => "max (2 - observed order)",
            Suite::NormConservation => "max relative drift of the squared norm",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s || suite.number().to_string() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                format!("unknown suite '{s}' (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Constraint for the suites that work at a fixed gap.
    pub constraint: EnergyConstraint,
    /// Replaces every suite's threshold when set.
    pub tolerance: Option<f64>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            constraint: EnergyConstraint { omega: 1.0, hbar: 1.0 },
            tolerance: None,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub number: usize,
    pub passed: bool,
    pub worst_residual: f64,
    pub threshold: f64,
    pub cases: usize,
    pub failures: usize,
    pub seconds: f64,
    pub detail: String,
}

/// Running worst-case residual over the cases of one suite.
struct Tally {
    threshold: f64,
    worst: f64,
    cases: usize,
    failures: usize,
    notes: Vec<String>,
}

impl Tally {
    fn new(threshold: f64) -> Self {
        Self {
            threshold,
            worst: 0.0,
            cases: 0,
            failures: 0,
            notes: Vec::new(),
        }
    }

    fn record(&mut self, residual: f64) {
        self.cases += 1;
        if residual.is_nan() {
            self.worst = f64::NAN;
        } else if !self.worst.is_nan() {
            self.worst = self.worst.max(residual);
        }
        if !(residual < self.threshold) {
            self.failures += 1;
        }
    }

    fn fail(&mut self, note: String) {
        self.cases += 1;
        self.failures += 1;
        if self.notes.len() < 5 {
            self.notes.push(note);
        }
    }

    /// Records `Ok(residual)`; an `Err` counts as a failed case.
    fn record_result(&mut self, label: &str, r: Result<f64>) {
        match r {
            Ok(x) => self.record(x),
            Err(e) => self.fail(format!("{label}: {e}")),
        }
    }

    fn check(&mut self, ok: bool, note: impl FnOnce() -> String) {
        if !ok {
            self.fail(note());
        }
    }

    fn finish(self, suite: Suite, start: Instant) -> SuiteReport {
        let mut detail = format!("{}; {} cases", suite.residual_meaning(), self.cases);
        for n in &self.notes {
            detail.push_str("; ");
            detail.push_str(n);
        }
        SuiteReport {
            suite,
            number: suite.number(),
            passed: self.failures == 0 && self.cases > 0,
            worst_residual: self.worst,
            threshold: self.threshold,
            cases: self.cases,
            failures: self.failures,
            seconds: start.elapsed().as_secs_f64(),
            detail,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let mut tally = Tally::new(opts.tolerance.unwrap_or(suite.default_threshold()));
    let seed = opts.seed.wrapping_add(suite.number() as u64);
    match suite {
        Suite::HermitianOptimum => hermitian_optimum(&mut tally, seed, opts),
        Suite::OptimalHamiltonian => optimal_hamiltonian_suite(&mut tally, seed, opts),
        Suite::MetricAxioms => metric_axioms(&mut tally, seed),
        Suite::EigenstateNorms => eigenstate_norms(&mut tally, seed),
        Suite::SpinFlip => spin_flip(&mut tally, opts),
        Suite::HyperbolicConstraints => hyperbolic_constraints(&mut tally, seed),
        Suite::EquivalenceMap => equivalence_map(&mut tally, seed),
        Suite::Propagators => propagators(&mut tally, seed),
        Suite::Reachability => reachability(&mut tally, seed, opts),
        Suite::LaurentSeries => laurent_series(&mut tally, opts),
        Suite::NormConservation => norm_conservation(&mut tally, seed),
    }
    tally.finish(suite, start)
}

pub fn run_suites(suites: &[Suite], opts: &VerifyOptions) -> Vec<SuiteReport> {
    suites.iter().map(|&s| run_suite(s, opts)).collect()
}

fn hermitian_optimum(tally: &mut Tally, seed: u64, opts: &VerifyOptions) {
    let mut rng = sampling::rng(seed);
    let c = opts.constraint;
    let grid = GridSpec::uniform(ORACLE_GRID);
    let slack = grid.resolution_error(&c);
    for k in 0..200 {
        let target = sampling::target(&mut rng);
        let tau = optimal_time(&target, &c);
        match brute_force_optimal_time(&target, &c, &grid) {
            Ok(res) => {
                tally.record((res.time / tau - 1.0).abs());
                tally.check(res.time >= tau - slack, || {
                    format!("target {k}: oracle {} below closed form {tau}", res.time)
                });
            }
            Err(e) => tally.fail(format!("target {k}: {e}")),
        }
    }
}

fn optimal_hamiltonian_suite(tally: &mut Tally, seed: u64, opts: &VerifyOptions) {
    let mut rng = sampling::rng(seed);
    let c = opts.constraint;
    for k in 0..200 {
        let target = sampling::target(&mut rng);
        let r = optimal_hamiltonian(&target, &c, PhaseConvention::ZeroArgA).and_then(|p| {
            let u = propagator_oracle(&p.build()?, optimal_time(&target, &c), c.hbar);
            Ok(1.0 - target_fidelity(&target, &u.apply(&StateVector2::up())))
        });
        tally.record_result(&format!("target {k}"), r);
    }
}

fn metric_axioms(tally: &mut Tally, seed: u64) {
    let mut rng = sampling::rng(seed);
    for k in 0..500 {
        let c = sampling::constraint(&mut rng);
        let p = sampling::pt3(&mut rng, &c, 1.4);
        let r = MetricContext::for_pt3(&p).and_then(|m| Ok(verify_metric_axioms(&p.build()?, &m).worst()));
        tally.record_result(&format!("three-parameter spec {k}"), r);
    }
    for k in 0..500 {
        let c = sampling::constraint(&mut rng);
        let p = sampling::pt4(&mut rng, &c, false);
        let r = MetricContext::for_pt4(&p).and_then(|m| Ok(verify_metric_axioms(&p.build()?, &m).worst()));
        tally.record_result(&format!("four-parameter spec {k}"), r);
    }
}

fn eigenstate_norms(tally: &mut Tally, seed: u64) {
    let mut rng = sampling::rng(seed);
    for k in 0..100 {
        let c = sampling::constraint(&mut rng);
        let p = sampling::pt3(&mut rng, &c, 1.4);
        let r = (|| {
            let m = MetricContext::for_pt3(&p)?;
            let es = pt3_eigensystem(&p)?;
            let expect = (2.0 * es.alpha.cos()).sqrt();
            let mut worst = 0.0f64;
            for v in es.states {
                worst = worst.max((m.norm(&v)? - expect).abs());
            }
            Ok(worst)
        })();
        tally.record_result(&format!("spec {k}"), r);
    }
}

fn spin_flip(tally: &mut Tally, opts: &VerifyOptions) {
    let lo = -FRAC_PI_2 + 1e-3;
    let alphas: Vec<f64> = (0..50).map(|k| lo + (PI - 2e-3) * k as f64 / 49.0).collect();
    for theta in [FRAC_PI_2, 0.7, -2.1] {
        match flip_sweep(&alphas, theta, &opts.constraint) {
            Ok(rows) => {
                for row in rows {
                    tally.record(1.0 - row.fidelity);
                }
            }
            Err(e) => tally.fail(format!("theta {theta}: {e}")),
        }
    }
    // The shortest flip at unit gap and action.
    let unit = EnergyConstraint { omega: 1.0, hbar: 1.0 };
    let tau = spin_flip_time(lo, &unit);
    tally.check((tau - 2e-3).abs() < 1e-12, || {
        format!("flip time {tau} at alpha = -pi/2 + 1e-3")
    });
    match flip_sweep(&[lo], FRAC_PI_2, &unit) {
        Ok(rows) => tally.record(1.0 - rows[0].fidelity),
        Err(e) => tally.fail(format!("shortest flip: {e}")),
    }
}

fn hyperbolic_constraints(tally: &mut Tally, seed: u64) {
    let mut rng = sampling::rng(seed);
    for _ in 0..500 {
        let c = sampling::constraint(&mut rng);
        let p = sampling::pt3(&mut rng, &c, 1.5);
        let st = p.theta.sin();
        let rhs = 4.0 * p.s * p.s - 4.0 * p.r * p.r * st * st;
        tally.record((c.omega * c.omega - rhs).abs() / (4.0 * p.s * p.s).max(1.0));
    }
    for _ in 0..500 {
        let c = sampling::constraint(&mut rng);
        let p = sampling::pt4(&mut rng, &c, false);
        let (sg, cg) = p.gamma.sin_cos();
        let lead = 4.0 * p.z * p.z / (sg * sg);
        let rhs = lead - 4.0 * p.y * p.y / (cg * cg);
        tally.record((c.omega * c.omega - rhs).abs() / lead.max(1.0));
    }
    for _ in 0..200 {
        let c = sampling::constraint(&mut rng);
        let p = sampling::hermitian(&mut rng, &c);
        let rhs = (p.s - p.u).powi(2) + 4.0 * p.r * p.r;
        tally.record((c.omega * c.omega - rhs).abs() / rhs.max(1.0));
    }
}

fn equivalence_residual(h: &ComplexMatrix2, m: &MetricContext) -> Result<f64> {
    let eq = equivalent_hermitian(h, m)?;
    let scale = h.norm_max().max(1.0);
    Ok(eq.h.hermiticity_residual().max(spectral_distance(&eq.h, h)?) / scale)
}

fn equivalence_map(tally: &mut Tally, seed: u64) {
    let mut rng = sampling::rng(seed);
    for k in 0..100 {
        let c = sampling::constraint(&mut rng);
        let p = sampling::pt3(&mut rng, &c, 1.3);
        let r = MetricContext::for_pt3(&p).and_then(|m| equivalence_residual(&p.build()?, &m));
        tally.record_result(&format!("three-parameter spec {k}"), r);
    }
    for k in 0..100 {
        let c = sampling::constraint(&mut rng);
        let p = sampling::pt4(&mut rng, &c, true);
        let r = MetricContext::for_pt4(&p).and_then(|m| equivalence_residual(&p.build()?, &m));
        tally.record_result(&format!("four-parameter spec {k}"), r);
    }
}

fn relative_gap(closed: &StateVector2, oracle: &StateVector2) -> f64 {
    closed.max_abs_diff(oracle) / closed.norm().max(1.0)
}

fn propagators(tally: &mut Tally, seed: u64) {
    let mut rng = sampling::rng(seed);
    let up = StateVector2::up();
    for k in 0..500 {
        let c = sampling::constraint(&mut rng);
        let t: f64 = rng.gen_range(0.0..5.0);
        let r = match k % 3 {
            0 => {
                let p = sampling::hermitian(&mut rng, &c);
                evolve_hermitian(&p, t, &c).and_then(|psi| {
                    Ok(relative_gap(
                        &psi,
                        &propagator_oracle(&p.build()?, t, c.hbar).apply(&up),
                    ))
                })
            }
            1 => {
                let p = sampling::pt3(&mut rng, &c, 1.3);
                evolve_pt3(&p, t, &c).and_then(|psi| {
                    Ok(relative_gap(
                        &psi,
                        &propagator_oracle(&p.build()?, t, c.hbar).apply(&up),
                    ))
                })
            }
            _ => {
                let p = sampling::pt4(&mut rng, &c, false);
                evolve_pt4(&p, t, &c).and_then(|psi| {
                    Ok(relative_gap(
                        &psi,
                        &propagator_oracle(&p.build()?, t, c.hbar).apply(&up),
                    ))
                })
            }
        };
        tally.record_result(&format!("pair {k}"), r);
    }
}

fn reachability(tally: &mut Tally, seed: u64, opts: &VerifyOptions) {
    let mut rng = sampling::rng(seed);
    let c = opts.constraint;
    let norm_tol = opts.tolerance.unwrap_or(NORM_CONDITION_TOL);
    let replay_tol = opts.tolerance.unwrap_or(EVOLUTION_TOL);
    let mut targets = Vec::new();
    // Reachable by construction: forward images of (1, 0).
    for _ in 0..40 {
        let positive = rng.gen_bool(0.5);
        let p = sampling::pt4(&mut rng, &c, positive);
        let t_dimless: f64 = rng.gen_range(0.05..2.0);
        if let Ok(psi) = evolve_pt4(&p, 2.0 * c.hbar * t_dimless / c.omega, &c) {
            let (a, b) = (psi.get(0), psi.get(1));
            if let Ok(f) = FinalStateSpec::new(a.norm(), b.norm(), a.arg(), b.arg() - a.arg()) {
                targets.push((f, t_dimless));
            }
        }
    }
    for (xi, phase) in [(0.0, 0.0), (0.5, 0.3), (-0.7, 1.2)] {
        let u = crate::brachsolver::admissible_amplitude(xi);
        for t in SERIES_TIMES {
            targets.push((FinalStateSpec { u, v: u, phase, xi }, t));
        }
    }
    targets.push((
        FinalStateSpec {
            u: 1.0,
            v: 0.0,
            phase: 0.3,
            xi: 0.0,
        },
        0.8,
    ));
    targets.push((
        FinalStateSpec {
            u: 0.0,
            v: 1.0,
            phase: 0.0,
            xi: 0.4,
        },
        0.8,
    ));

    for (k, (f, t)) in targets.iter().enumerate() {
        match solve_reachability_auto(f, *t, &c) {
            Ok(sol) => {
                tally.record(sol.max_residual());
                let norm = sol.norm_condition.abs();
                tally.check(norm < norm_tol, || format!("target {k}: norm condition {norm:e}"));
                let replay = sol.replay_error(f, &c);
                tally.check(replay < replay_tol, || format!("target {k}: replay error {replay:e}"));
            }
            Err(e) => tally.fail(format!("target {k} at T = {t}: {e}")),
        }
    }
}

/// `log2(e₁ / e₂)` over one halving of `T`, or `None` when both errors sit
/// at the noise floor.
fn observed_order(e1: f64, e2: f64) -> Option<f64> {
    if e1.abs() < SERIES_NOISE_FLOOR && e2.abs() < SERIES_NOISE_FLOOR {
        None
    } else {
        Some((e1.abs() / e2.abs()).log2())
    }
}

fn laurent_series(tally: &mut Tally, opts: &VerifyOptions) {
    let c = opts.constraint;
    for (xi, phase) in [(0.0, 0.0), (0.5, 0.3), (-0.7, 1.2), (1.2, -0.4)] {
        let u = crate::brachsolver::admissible_amplitude(xi);
        let f = FinalStateSpec { u, v: u, phase, xi };
        let Ok(coeffs) = laurent_coefficients(&f) else {
            tally.fail(format!("xi = {xi}: no series"));
            continue;
        };
        let mut errors = Vec::new();
        for t in SERIES_TIMES {
            match solve_reachability_auto(&f, t, &c) {
                Ok(sol) => {
                    let v = sol.vars;
                    errors.push([
                        v.x * t - coeffs.x_m1,
                        v.y * t - coeffs.y_m1,
                        v.z * t - coeffs.z_m1,
                        v.gamma - coeffs.gamma0,
                    ]);
                }
                Err(e) => tally.fail(format!("xi = {xi}, T = {t}: {e}")),
            }
        }
        if errors.len() != SERIES_TIMES.len() {
            continue;
        }
        for q in 0..4 {
            for w in errors.windows(2) {
                match observed_order(w[0][q], w[1][q]) {
                    Some(order) => tally.record((2.0 - order).max(0.0)),
                    None => tally.record(0.0),
                }
            }
        }
    }
}

fn norm_drift(norms: impl Iterator<Item = f64>, first: f64) -> f64 {
    norms.map(|n| (n - first).abs()).fold(0.0, f64::max) / first.abs().max(1.0)
}

fn norm_conservation(tally: &mut Tally, seed: u64) {
    let mut rng = sampling::rng(seed);
    let times = |rng: &mut sampling::SpecRng| -> Vec<f64> { (0..50).map(|_| rng.gen_range(0.0..10.0)).collect() };
    for k in 0..60 {
        let c = sampling::constraint(&mut rng);
        let psi0 = sampling::unit_state(&mut rng);
        let ts = times(&mut rng);
        let r = (|| -> Result<f64> {
            let (h, metric, closed): (ComplexMatrix2, Option<MetricContext>, Vec<StateVector2>) = match k % 3 {
                0 => {
                    let p = sampling::hermitian(&mut rng, &c);
                    let closed = ts.iter().map(|&t| evolve_hermitian(&p, t, &c)).collect::<Result<_>>()?;
                    (p.build()?, None, closed)
                }
                1 => {
                    let p = sampling::pt3(&mut rng, &c, 1.3);
                    let closed = ts.iter().map(|&t| evolve_pt3(&p, t, &c)).collect::<Result<_>>()?;
                    (p.build()?, Some(MetricContext::for_pt3(&p)?), closed)
                }
                _ => {
                    let positive = rng.gen_bool(0.5);
                    let p = sampling::pt4(&mut rng, &c, positive);
                    let closed = ts.iter().map(|&t| evolve_pt4(&p, t, &c)).collect::<Result<_>>()?;
                    (p.build()?, Some(MetricContext::for_pt4(&p)?), closed)
                }
            };
            let norm_sq = |v: &StateVector2| match &metric {
                Some(m) => m.norm_sq(v),
                None => v.norm_sqr(),
            };
            // (1, 0) under the closed forms, and a random state under the propagator.
            let from_up = norm_drift(closed.iter().map(norm_sq), norm_sq(&StateVector2::up()));
            let evolved = ts
                .iter()
                .map(|&t| Ok(norm_sq(&propagator(&h, t, c.hbar)?.apply(&psi0))))
                .collect::<Result<Vec<_>>>()?;
            Ok(from_up.max(norm_drift(evolved.into_iter(), norm_sq(&psi0))))
        })();
        tally.record_result(&format!("spec {k}"), r);
    }
}
