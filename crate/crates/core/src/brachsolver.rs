//! PT-symmetric time evolution and the reachability problem.
//!
//! With `H = x·1 + (ω/2) σ·n` the initial state `(1, 0)` evolves in closed
//! form. Matching the evolved state to a target `κ·(u e^{iA}, v e^{i(A+ξ)})`
//! gives four real equations plus the hyperbolic gap constraint, in the
//! dimensionless unknowns `Y = 2y/ω`, `Z = 2z/(ω sin γ)`, `γ`, the shifted
//! phase `B = A + XT` and the overall scale `κ > 0`. The unknown scale is
//! what the CPT norm of `(1, 0)` fixes; it is solved for rather than
//! imposed. The system is solved by damped Newton iteration.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{Matrix5, Vector5};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::EnergyConstraint;
use crate::linalg2::{matrix_exp_oracle, ComplexMatrix2, StateVector2, C64};
use crate::ptcore::{MetricContext, PT3Params, PT4Params, GAMMA_TOL};

/// Max-abs residual at which a Newton solution is accepted.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Accepted deviation of the norm condition at a converged solution.
pub const NORM_CONDITION_TOL: f64 = 1e-8;

/// Component-wise tolerance when a solution is replayed by evolution.
pub const EVOLUTION_TOL: f64 = 1e-8;

pub const MAX_ITERATIONS: usize = 200;
const MAX_HALVINGS: usize = 30;
const POLISH_STEPS: usize = 3;

/// Below this `T` the small-time series seeds the solver.
pub const SERIES_SEED_MAX_T: f64 = 0.5;

/// `e^{−iHt/ħ}·(1, 0) = (e^{−itr cos θ/ħ} / cos α)·(cos(ωt/2ħ − α), −i sin(ωt/2ħ))`.
///
/// The closed form presumes `s > 0`, where the `α` eigenstate is the upper level.
pub fn evolve_pt3(p: &PT3Params, t: f64, c: &EnergyConstraint) -> Result<StateVector2> {
    let alpha = p.alpha()?;
    c.check_gap(p.gap()?)?;
    if !(p.s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "closed-form evolution needs s > 0, got {}",
            p.s
        )));
    }
    let phi = c.half_phase(t);
    let global = C64::new(0.0, -t * p.r * p.theta.cos() / c.hbar).exp() / alpha.cos();
    StateVector2::new(global * (phi - alpha).cos(), global * C64::new(0.0, -phi.sin()))
}

/// `(2α + π)ħ/ω`, the time for `(1, 0)` to reach `(0, 1)` up to phase.
pub fn spin_flip_time(alpha: f64, c: &EnergyConstraint) -> f64 {
    (2.0 * alpha + PI) * c.hbar / c.omega
}

/// One row of [`flip_sweep`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlipRow {
    pub alpha: f64,
    pub r: f64,
    pub s: f64,
    pub theta: f64,
    pub tau: f64,
    /// `|⟨(0,1)|ψ(τ)⟩| / ‖ψ(τ)‖`, with `ψ(τ)` from the series propagator.
    pub fidelity: f64,
    /// `max(|r|, |s|)`.
    pub max_element: f64,
    /// `|‖ψ(τ)‖_CPT − ‖(1,0)‖_CPT|`.
    pub norm_drift: f64,
}

/// For each `α`: `s = ω/(2 cos α)`, `r = s sin α / sin θ`, `τ = (2α + π)ħ/ω`,
/// and the flip fidelity obtained by evolving with the series exponential.
pub fn flip_sweep(alphas: &[f64], theta: f64, c: &EnergyConstraint) -> Result<Vec<FlipRow>> {
    alphas
        .iter()
        .map(|&alpha| {
            let p = PT3Params::from_alpha(alpha, theta, c.omega)?;
            let tau = spin_flip_time(alpha, c);
            let h = p.build()?;
            let u = matrix_exp_oracle(&h.scale(C64::new(0.0, -tau / c.hbar)));
            let psi = u.apply(&StateVector2::up());
            let metric = MetricContext::for_pt3(&p)?;
            let norm_drift = (metric.norm(&psi)? - metric.norm(&StateVector2::up())?).abs();
            Ok(FlipRow {
                alpha,
                r: p.r,
                s: p.s,
                theta,
                tau,
                fidelity: StateVector2::down().fidelity(&psi),
                max_element: p.r.abs().max(p.s.abs()),
                norm_drift,
            })
        })
        .collect()
}

/// `e^{−ixt/ħ}·(cos φ + (2y/ω) sin φ − i(2z/ω) sin φ, −(2y/ω) tan γ sin φ − i(2z/(ω tan γ)) sin φ)`
/// with `φ = ωt/2ħ`.
pub fn evolve_pt4(p: &PT4Params, t: f64, c: &EnergyConstraint) -> Result<StateVector2> {
    c.check_gap(p.gap()?)?;
    let phi = c.half_phase(t);
    let (sp, cp) = phi.sin_cos();
    let (y, z) = (2.0 * p.y / c.omega, 2.0 * p.z / c.omega);
    let tg = p.gamma.tan();
    let global = C64::new(0.0, -p.x * t / c.hbar).exp();
    StateVector2::new(
        global * C64::new(cp + y * sp, -z * sp),
        global * C64::new(-y * tg * sp, -z / tg * sp),
    )
}

/// Target `(u e^{iA}, v e^{i(A+ξ)})`, up to the scale fixed by the solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalStateSpec {
    pub u: f64,
    pub v: f64,
    /// Common phase `A`.
    pub phase: f64,
    /// Relative phase `ξ`.
    pub xi: f64,
}

impl FinalStateSpec {
    pub fn new(u: f64, v: f64, phase: f64, xi: f64) -> Result<Self> {
        if ![u, v, phase, xi].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("final state"));
        }
        if u == 0.0 && v == 0.0 {
            return Err(Error::NonAdmissibleTarget {
                reason: "u and v are both zero".into(),
            });
        }
        Ok(Self { u, v, phase, xi })
    }

    /// `κ·(u e^{iA}, v e^{i(A+ξ)})`.
    pub fn state(&self, kappa: f64) -> StateVector2 {
        StateVector2::raw([
            C64::from_polar(kappa * self.u, self.phase),
            C64::from_polar(kappa * self.v, self.phase + self.xi),
        ])
    }
}

/// Dimensionless unknowns: `X = 2x/ω`, `Y = 2y/ω`, `Z = 2z/(ω sin γ)`,
/// `T = ωt/2ħ`, `B = A + XT`, and the target scale `κ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessVars {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub gamma: f64,
    pub b: f64,
    pub t: f64,
    pub kappa: f64,
}

impl DimensionlessVars {
    fn unknowns(&self) -> Vector5<f64> {
        Vector5::new(self.y, self.z, self.gamma, self.b, self.kappa)
    }

    fn with_unknowns(&self, w: &Vector5<f64>, f: &FinalStateSpec) -> Self {
        Self {
            x: (w[3] - f.phase) / self.t,
            y: w[0],
            z: w[1],
            gamma: w[2],
            b: w[3],
            t: self.t,
            kappa: w[4],
        }
    }

    /// `Z² − Y² sec²γ − 1`.
    pub fn constraint_residual(&self) -> f64 {
        let sec = 1.0 / self.gamma.cos();
        self.z * self.z - self.y * self.y * sec * sec - 1.0
    }

    /// `κ²(u² + v² + 2uvY sin ξ / (Z cos γ)) − 1`: the CPT norm of `(1, 0)`
    /// against that of the scaled target.
    pub fn norm_condition(&self, f: &FinalStateSpec) -> f64 {
        let cross = 2.0 * f.u * f.v * self.y * f.xi.sin() / (self.z * self.gamma.cos());
        self.kappa * self.kappa * (f.u * f.u + f.v * f.v + cross) - 1.0
    }

    /// `(ω/2)·[[X + Z sin γ + iY, Z cos γ − iY tan γ], [Z cos γ − iY tan γ, X − Z sin γ − iY]]`.
    ///
    /// Written in `Z sin γ`, `Z cos γ` and `Y tan γ` so that it stays finite
    /// at the boundary solutions `γ = 0` and (for `Y = 0`) `γ = π/2`.
    pub fn hamiltonian(&self, c: &EnergyConstraint) -> Result<ComplexMatrix2> {
        let (sg, cg) = self.gamma.sin_cos();
        let ytan = if self.y == 0.0 { 0.0 } else { self.y * self.gamma.tan() };
        let diag = C64::new(self.z * sg, self.y);
        let off = C64::new(self.z * cg, -ytan);
        ComplexMatrix2::from_rows(self.x + diag, off, off, self.x - diag).map(|m| m.scale((c.omega / 2.0).into()))
    }

    /// `x = Xω/2`, `y = Yω/2`, `z = Zω sin γ / 2`.
    pub fn params(&self, c: &EnergyConstraint) -> PT4Params {
        let h = c.omega / 2.0;
        PT4Params::new(self.x * h, self.y * h, self.z * self.gamma.sin() * h, self.gamma)
    }

    /// Physical time `2ħT/ω`.
    pub fn time(&self, c: &EnergyConstraint) -> f64 {
        2.0 * c.hbar * self.t / c.omega
    }
}

/// The four matching equations followed by the gap constraint:
///
/// ```text
/// cos T + Y sin T − κu cos B
/// Y tan γ sin T + κv cos(B + ξ)
/// Z sin γ sin T + κu sin B
/// Z cos γ sin T + κv sin(B + ξ)
/// Z² − Y² sec²γ − 1
/// ```
pub fn reachability_residuals(vars: &DimensionlessVars, f: &FinalStateSpec) -> [f64; 5] {
    let (st, ct) = vars.t.sin_cos();
    let (sg, cg) = vars.gamma.sin_cos();
    let (sb, cb) = vars.b.sin_cos();
    let (sbx, cbx) = (vars.b + f.xi).sin_cos();
    let (ku, kv) = (vars.kappa * f.u, vars.kappa * f.v);
    let ytan = if vars.y == 0.0 { 0.0 } else { vars.y * sg / cg };
    [
        ct + vars.y * st - ku * cb,
        ytan * st + kv * cbx,
        vars.z * sg * st + ku * sb,
        vars.z * cg * st + kv * sbx,
        vars.constraint_residual(),
    ]
}

/// Jacobian of [`reachability_residuals`] with respect to `(Y, Z, γ, B, κ)`.
pub fn reachability_jacobian(vars: &DimensionlessVars, f: &FinalStateSpec) -> [[f64; 5]; 5] {
    let st = vars.t.sin();
    let (sg, cg) = vars.gamma.sin_cos();
    let (sb, cb) = vars.b.sin_cos();
    let (sbx, cbx) = (vars.b + f.xi).sin_cos();
    let (y, z, k) = (vars.y, vars.z, vars.kappa);
    let (tg, sec2) = (sg / cg, 1.0 / (cg * cg));
    [
        [st, 0.0, 0.0, k * f.u * sb, -f.u * cb],
        [tg * st, 0.0, y * sec2 * st, -k * f.v * sbx, f.v * cbx],
        [0.0, sg * st, z * cg * st, k * f.u * cb, f.u * sb],
        [0.0, cg * st, -z * sg * st, k * f.v * cbx, f.v * sbx],
        [-2.0 * y * sec2, 2.0 * z, -2.0 * y * y * sec2 * tg, 0.0, 0.0],
    ]
}

fn max_abs(r: &[f64; 5]) -> f64 {
    r.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn sum_sq(r: &[f64; 5]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// A converged solution of the reachability system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachabilitySolution {
    pub vars: DimensionlessVars,
    pub residuals: [f64; 5],
    pub norm_condition: f64,
    pub params: PT4Params,
    pub hamiltonian: ComplexMatrix2,
    /// Physical evolution time `2ħT/ω`.
    pub time: f64,
    pub iterations: usize,
}

impl ReachabilitySolution {
    fn assemble(vars: DimensionlessVars, f: &FinalStateSpec, c: &EnergyConstraint, iterations: usize) -> Result<Self> {
        let residuals = reachability_residuals(&vars, f);
        let norm_condition = vars.norm_condition(f);
        if !(norm_condition.abs() <= 1e-6) && vars.gamma.cos().abs() > GAMMA_TOL && vars.z != 0.0 {
            return Err(Error::NonAdmissibleTarget {
                reason: format!("norm condition off by {norm_condition:e} at the solution"),
            });
        }
        Ok(Self {
            vars,
            residuals,
            norm_condition,
            params: vars.params(c),
            hamiltonian: vars.hamiltonian(c)?,
            time: vars.time(c),
            iterations,
        })
    }

    pub fn max_residual(&self) -> f64 {
        max_abs(&self.residuals)
    }

    /// The target the solution reaches, `κ·(u e^{iA}, v e^{i(A+ξ)})`.
    pub fn target(&self, f: &FinalStateSpec) -> StateVector2 {
        f.state(self.vars.kappa)
    }

    /// Evolves `(1, 0)` under the recovered Hamiltonian with the series
    /// exponential; returns the component-wise error against the target.
    pub fn replay_error(&self, f: &FinalStateSpec, c: &EnergyConstraint) -> f64 {
        let u = matrix_exp_oracle(&self.hamiltonian.scale(C64::new(0.0, -self.time / c.hbar)));
        u.apply(&StateVector2::up()).max_abs_diff(&self.target(f))
    }
}

/// Damped Newton iteration from `seed`; `seed.t` is the fixed horizon `T`.
pub fn solve_reachability(
    f: &FinalStateSpec,
    seed: &DimensionlessVars,
    c: &EnergyConstraint,
) -> Result<ReachabilitySolution> {
    let t = seed.t;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter(format!("T must be positive, got {t}")));
    }
    if let Some(vars) = boundary_solution(f, t)? {
        return ReachabilitySolution::assemble(vars, f, c, 0);
    }
    let seed_vals = [seed.y, seed.z, seed.gamma, seed.b, seed.kappa];
    if !seed_vals.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("seed"));
    }

    let mut vars = seed.with_unknowns(&seed.unknowns(), f);
    let mut res = reachability_residuals(&vars, f);
    let mut merit = sum_sq(&res);
    let mut best = max_abs(&res);
    let fail = |iterations: usize, best: f64| Error::NoConvergence {
        iterations,
        best_residual: best,
    };

    for iteration in 0..=MAX_ITERATIONS {
        if max_abs(&res) < RESIDUAL_TOL {
            // A few undamped steps past acceptance; kept only while they help.
            for _ in 0..POLISH_STEPS {
                let jac = Matrix5::from_fn(|i, j| reachability_jacobian(&vars, f)[i][j]);
                let Some(step) = jac.lu().solve(&-Vector5::from_row_slice(&res)) else {
                    break;
                };
                let trial = vars.with_unknowns(&(vars.unknowns() + step), f);
                let trial_res = reachability_residuals(&trial, f);
                if !(sum_sq(&trial_res) < merit) {
                    break;
                }
                vars = trial;
                res = trial_res;
                merit = sum_sq(&res);
            }
            if vars.kappa < 0.0 {
                vars.kappa = -vars.kappa;
                vars.b += PI;
                vars.x = (vars.b - f.phase) / t;
            }
            return ReachabilitySolution::assemble(vars, f, c, iteration);
        }
        if iteration == MAX_ITERATIONS || !merit.is_finite() {
            break;
        }
        let jac = Matrix5::from_fn(|i, j| reachability_jacobian(&vars, f)[i][j]);
        let rhs = -Vector5::from_row_slice(&res);
        let Some(step) = jac.lu().solve(&rhs) else {
            return Err(fail(iteration, best));
        };
        let base = vars.unknowns();
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial = vars.with_unknowns(&(base + step * lambda), f);
            let trial_res = reachability_residuals(&trial, f);
            let trial_merit = sum_sq(&trial_res);
            if trial_merit.is_finite() && trial_merit < merit {
                vars = trial;
                res = trial_res;
                merit = trial_merit;
                best = best.min(max_abs(&res));
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(fail(iteration + 1, best));
        }
    }
    Err(fail(MAX_ITERATIONS, best))
}

/// Closed-form solutions for `v = 0` (stay in place) and `u = 0` (flip).
fn boundary_solution(f: &FinalStateSpec, t: f64) -> Result<Option<DimensionlessVars>> {
    let (st, ct) = t.sin_cos();
    if f.v == 0.0 {
        // Diagonal Hermitian H: (1, 0) only picks up the phase e^{−iT(X+1)}.
        let b = -t;
        let kappa = 1.0 / f.u.abs();
        let b = if f.u < 0.0 { b + PI } else { b };
        let x = (b - f.phase) / t;
        return Ok(Some(DimensionlessVars {
            x,
            y: 0.0,
            z: 1.0,
            gamma: FRAC_PI_2,
            b,
            t,
            kappa,
        }));
    }
    if f.u == 0.0 {
        if st.abs() < GAMMA_TOL {
            return Err(Error::NoConvergence {
                iterations: 0,
                best_residual: 1.0,
            });
        }
        // γ = 0: Y = −cot T, Z = |csc T|, and B + ξ = ∓π/2 picks the sign.
        let y = -ct / st;
        let z = 1.0 / st.abs();
        let sign = (st * f.v).signum();
        let b = -f.xi - sign * FRAC_PI_2;
        let x = (b - f.phase) / t;
        return Ok(Some(DimensionlessVars {
            x,
            y,
            z,
            gamma: 0.0,
            b,
            t,
            kappa: 1.0 / f.v.abs(),
        }));
    }
    Ok(None)
}

/// Seed from the leading small-`T` terms, rescaled so that `κ(u + v)/2`
/// matches the admissible amplitude `1/(2 cos γ₀)`.
pub fn series_seed(f: &FinalStateSpec, t: f64) -> DimensionlessVars {
    let g0 = FRAC_PI_4 - f.xi / 2.0;
    let mean = 0.5 * (f.u.abs() + f.v.abs());
    let kappa = 1.0 / (2.0 * g0.cos() * mean);
    let amp = kappa * f.u;
    DimensionlessVars {
        x: (g0 - f.phase) / t,
        y: -amp * g0.cos() / t,
        z: -amp / t,
        gamma: g0,
        b: g0,
        t,
        kappa,
    }
}

/// Seed at the Hermitian point `Y = 0`, `Z = 1` with `γ` given.
pub fn hermitian_seed(f: &FinalStateSpec, t: f64, gamma: f64) -> DimensionlessVars {
    let (st, ct) = t.sin_cos();
    let (re, im) = (ct, -gamma.sin() * st);
    let b = im.atan2(re);
    let kappa = re.hypot(im) / f.u.abs().max(f.v.abs());
    DimensionlessVars {
        x: (b - f.phase) / t,
        y: 0.0,
        z: 1.0,
        gamma,
        b,
        t,
        kappa,
    }
}

/// Tries the small-`T` series seed, then Hermitian seeds over several `γ`.
pub fn solve_reachability_auto(f: &FinalStateSpec, t: f64, c: &EnergyConstraint) -> Result<ReachabilitySolution> {
    let mut seeds = Vec::new();
    let series = series_seed(f, t);
    if t < SERIES_SEED_MAX_T {
        seeds.push(series);
    }
    for g in [FRAC_PI_4 - f.xi / 2.0, FRAC_PI_4, 1.2, 0.4, -FRAC_PI_4, 2.0] {
        seeds.push(hermitian_seed(f, t, g));
    }
    if t >= SERIES_SEED_MAX_T {
        seeds.push(series);
    }
    let mut last = Error::NoConvergence {
        iterations: 0,
        best_residual: f64::INFINITY,
    };
    for seed in &seeds {
        match solve_reachability(f, seed, c) {
            Ok(sol) => return Ok(sol),
            Err(Error::NoConvergence {
                iterations,
                best_residual,
            }) => {
                if let Error::NoConvergence {
                    best_residual: prev, ..
                } = last
                {
                    if best_residual < prev {
                        last = Error::NoConvergence {
                            iterations,
                            best_residual,
                        };
                    }
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Leading small-`T` behaviour for `u = v`: `X ≈ X₋₁/T`, `Y ≈ Y₋₁/T`,
/// `Z ≈ Z₋₁/T`, `γ ≈ γ₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentCoefficients {
    pub x_m1: f64,
    pub y_m1: f64,
    pub z_m1: f64,
    pub gamma0: f64,
    /// `γ₀` sits where `tan γ` or `cos γ` vanishes.
    pub degenerate_gamma: bool,
}

/// `X₋₁ = π/4 − ξ/2 − A`, `Y₋₁ = −u cos(π/4 − ξ/2)`, `Z₋₁ = −u`, `γ₀ = π/4 − ξ/2`.
pub fn laurent_coefficients(f: &FinalStateSpec) -> Result<LaurentCoefficients> {
    if (f.u - f.v).abs() > 1e-12 * f.u.abs().max(f.v.abs()) {
        return Err(Error::InvalidParameter(format!(
            "series needs u = v, got u = {}, v = {}",
            f.u, f.v
        )));
    }
    let g0 = FRAC_PI_4 - f.xi / 2.0;
    Ok(LaurentCoefficients {
        x_m1: g0 - f.phase,
        y_m1: -f.u * g0.cos(),
        z_m1: -f.u,
        gamma0: g0,
        degenerate_gamma: g0.tan().abs() < GAMMA_TOL || g0.cos().abs() < GAMMA_TOL,
    })
}

/// Amplitude `u = v` for which the small-`T` solution exists with `κ = 1`.
pub fn admissible_amplitude(xi: f64) -> f64 {
    1.0 / (2.0 * (FRAC_PI_4 - xi / 2.0).cos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg2::propagator_oracle;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn omega1() -> EnergyConstraint {
        EnergyConstraint::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn evolve_pt3_examples() {
        let c = omega1();
        let p = PT3Params::from_alpha(0.4, 1.0, 1.0).unwrap();
        assert!(evolve_pt3(&p, 0.0, &c).unwrap().max_abs_diff(&StateVector2::up()) < 1e-15);
        let flip = evolve_pt3(&p, spin_flip_time(0.4, &c), &c).unwrap();
        assert!(flip.get(0).norm() < 1e-14);
        let oracle = propagator_oracle(&p.build().unwrap(), 0.37, 1.0).apply(&StateVector2::up());
        assert!(evolve_pt3(&p, 0.37, &c).unwrap().max_abs_diff(&oracle) < 1e-10);
    }

    #[test]
    fn evolve_pt3_rejects_bad_inputs() {
        let c = omega1();
        assert!(matches!(
            evolve_pt3(&PT3Params::new(2.0, 1.0, FRAC_PI_2), 1.0, &c),
            Err(Error::BrokenPTSymmetry { .. })
        ));
        assert!(matches!(
            evolve_pt3(&PT3Params::new(0.0, 1.0, 0.0), 1.0, &c),
            Err(Error::ConstraintViolated { .. })
        ));
    }

    #[test]
    fn spin_flip_examples() {
        assert_abs_diff_eq!(spin_flip_time(0.0, &omega1()), PI);
        assert_abs_diff_eq!(spin_flip_time(-FRAC_PI_2 + 0.001, &omega1()), 0.002, epsilon = 1e-13);
        let c = EnergyConstraint::new(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(spin_flip_time(FRAC_PI_4, &c), 0.75 * PI, epsilon = 1e-15);
    }

    #[test]
    fn flip_sweep_rows() {
        let rows = flip_sweep(&[0.0, -1.57, 0.5], FRAC_PI_2, &omega1()).unwrap();
        assert_abs_diff_eq!(rows[0].s, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rows[0].tau, PI, epsilon = 1e-15);
        assert!((rows[1].s - 1.0 / (2.0 * 1.57f64.cos())).abs() < 1e-9);
        assert!(rows[1].s > 600.0 && rows[1].tau < 0.0016);
        for row in &rows {
            assert!(row.fidelity >= 1.0 - 1e-8, "{row:?}");
            assert!(row.norm_drift < 1e-9, "{row:?}");
        }
    }

    #[test]
    fn evolve_pt4_examples() {
        let p = PT4Params::new(0.3, 0.4, 1.1, 0.7);
        let c = EnergyConstraint::new(p.gap().unwrap(), 1.0).unwrap();
        assert!(evolve_pt4(&p, 0.0, &c).unwrap().max_abs_diff(&StateVector2::up()) < 1e-15);
        let oracle = propagator_oracle(&p.build().unwrap(), 1.1, 1.0).apply(&StateVector2::up());
        assert!(evolve_pt4(&p, 1.1, &c).unwrap().max_abs_diff(&oracle) < 1e-10);

        let herm = PT4Params::new(0.0, 0.0, 0.5, FRAC_PI_4);
        let c = EnergyConstraint::new(herm.gap().unwrap(), 1.0).unwrap();
        for t in [0.3, 1.7, 4.0] {
            assert_abs_diff_eq!(evolve_pt4(&herm, t, &c).unwrap().norm(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let f = FinalStateSpec::new(0.6, 0.9, 0.3, 0.7).unwrap();
        let vars = DimensionlessVars {
            x: 0.0,
            y: 0.4,
            z: 1.3,
            gamma: 0.6,
            b: 0.2,
            t: 0.8,
            kappa: 1.1,
        };
        let jac = reachability_jacobian(&vars, &f);
        let h = 1e-6;
        for j in 0..5 {
            let mut w = vars.unknowns();
            w[j] += h;
            let up = reachability_residuals(&vars.with_unknowns(&w, &f), &f);
            w[j] -= 2.0 * h;
            let down = reachability_residuals(&vars.with_unknowns(&w, &f), &f);
            for i in 0..5 {
                let fd = (up[i] - down[i]) / (2.0 * h);
                assert!((fd - jac[i][j]).abs() < 1e-8, "d r{i} / d w{j}: {fd} vs {}", jac[i][j]);
            }
        }
    }

    #[test]
    fn constraint_sensitivity() {
        let f = FinalStateSpec::new(0.6, 0.6, 0.0, 0.0).unwrap();
        let sol = solve_reachability_auto(&f, 0.3, &omega1()).unwrap();
        let mut vars = sol.vars;
        vars.z += 1e-4;
        let r = reachability_residuals(&vars, &f)[4];
        assert!((r / (2.0 * sol.vars.z * 1e-4) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn identity_target_residuals_vanish_with_t() {
        let f = FinalStateSpec::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let mut last = f64::INFINITY;
        for t in [0.1, 0.01, 0.001] {
            let vars = DimensionlessVars {
                x: 0.0,
                y: 0.0,
                z: 1.0,
                gamma: FRAC_PI_2 - 1e-6,
                b: 0.0,
                t,
                kappa: 1.0,
            };
            let r = max_abs(&reachability_residuals(&vars, &f));
            assert!(r < last);
            last = r;
        }
        assert!(last < 2e-3);
    }

    #[test]
    fn small_t_solution_near_series() {
        let u = FRAC_1_SQRT_2;
        let f = FinalStateSpec::new(u, u, 0.0, 0.0).unwrap();
        let c = omega1();
        let sol = solve_reachability_auto(&f, 0.01, &c).unwrap();
        assert!(sol.max_residual() < RESIDUAL_TOL);
        assert!(sol.norm_condition.abs() < NORM_CONDITION_TOL);
        assert!((sol.vars.gamma - FRAC_PI_4).abs() < 1e-3, "{:?}", sol.vars);
        assert!((sol.vars.z * 0.01 + u).abs() < 1e-3, "{:?}", sol.vars);
        assert!(sol.replay_error(&f, &c) < EVOLUTION_TOL);
    }

    #[test]
    fn boundary_targets() {
        let c = omega1();
        let stay = FinalStateSpec::new(1.0, 0.0, 0.4, 0.0).unwrap();
        let sol = solve_reachability_auto(&stay, 0.7, &c).unwrap();
        assert!(sol.max_residual() < RESIDUAL_TOL);
        assert!(sol.replay_error(&stay, &c) < EVOLUTION_TOL);

        let flip = FinalStateSpec::new(0.0, 1.0, 0.2, 0.5).unwrap();
        for t in [0.05, 1.0, 2.5] {
            let sol = solve_reachability_auto(&flip, t, &c).unwrap();
            assert!(sol.max_residual() < RESIDUAL_TOL, "{sol:?}");
            assert!(sol.replay_error(&flip, &c) < EVOLUTION_TOL, "{sol:?}");
        }
    }

    #[test]
    fn far_seed_fails_with_diagnostic() {
        let f = FinalStateSpec::new(0.6, 0.8, 0.0, 0.3).unwrap();
        let seed = DimensionlessVars {
            x: 0.0,
            y: 1e8,
            z: -1e-8,
            gamma: FRAC_PI_2 - 2.7e-8,
            b: 40.0,
            t: 0.2,
            kappa: 1e-9,
        };
        match solve_reachability(&f, &seed, &omega1()) {
            Err(Error::NoConvergence { best_residual, .. }) => assert!(best_residual > RESIDUAL_TOL),
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn laurent_examples() {
        let u = FRAC_1_SQRT_2;
        let l = laurent_coefficients(&FinalStateSpec::new(u, u, 0.0, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(l.x_m1, FRAC_PI_4);
        assert_abs_diff_eq!(l.y_m1, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(l.z_m1, -u);
        assert_abs_diff_eq!(l.gamma0, FRAC_PI_4);
        assert!(!l.degenerate_gamma);
        let d = laurent_coefficients(&FinalStateSpec::new(1.0, 1.0, 0.0, FRAC_PI_2).unwrap()).unwrap();
        assert_eq!(d.gamma0, 0.0);
        assert!(d.degenerate_gamma);
        assert_abs_diff_eq!(admissible_amplitude(0.0), u, epsilon = 1e-15);
    }
}
