//! The Hermitian brachistochrone for a two-level system.
//!
//! Under the constraint that the eigenvalue gap equals `ω`, the fastest
//! transfer of `(1, 0)` to `(a, b)` takes `τ = (2ħ/ω)·arcsin|b|`. The
//! grid optimizer in [`brute_force_optimal_time`] recovers that bound
//! without using it, by direct search over constrained Hamiltonians.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg2::{ComplexMatrix2, StateVector2, C64, I, ONE};
use crate::ptcore::MetricContext;

/// Allowed mismatch between a Hamiltonian's gap and `ω`, relative to `max(1, ω)`.
pub const GAP_TOL: f64 = 1e-9;

/// Allowed deviation of `|a|² + |b|²` from 1 in [`TargetState::new`].
pub const TARGET_NORM_TOL: f64 = 1e-12;

/// Allowed deviation of `⟨ψ|ψ⟩` from 1 for speed and distance inputs.
pub const STATE_NORM_TOL: f64 = 1e-9;

/// Fidelity at which the grid optimizer counts the target as reached.
pub const SATURATION_TOL: f64 = 1e-12;

/// Smallest accepted number of points per grid axis.
pub const MIN_GRID: usize = 100;

/// Fixed eigenvalue gap `ω` and the action unit `ħ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyConstraint {
    pub omega: f64,
    pub hbar: f64,
}

impl EnergyConstraint {
    pub fn new(omega: f64, hbar: f64) -> Result<Self> {
        if !(omega.is_finite() && hbar.is_finite() && omega > 0.0 && hbar > 0.0) {
            return Err(Error::InvalidConstraint { omega, hbar });
        }
        Ok(Self { omega, hbar })
    }

    /// `ω` with `ħ = 1`.
    pub fn with_omega(omega: f64) -> Result<Self> {
        Self::new(omega, 1.0)
    }

    pub fn check_gap(&self, gap: f64) -> Result<()> {
        if !((gap - self.omega).abs() <= GAP_TOL * self.omega.max(1.0)) {
            return Err(Error::ConstraintViolated {
                expected: self.omega,
                actual: gap,
            });
        }
        Ok(())
    }

    /// Dimensionless phase `ωt / 2ħ`.
    pub fn half_phase(&self, t: f64) -> f64 {
        self.omega * t / (2.0 * self.hbar)
    }
}

/// `H = [[s, r e^{−iθ}], [r e^{iθ}, u]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianParams {
    pub r: f64,
    pub s: f64,
    pub u: f64,
    pub theta: f64,
}

impl HermitianParams {
    pub fn new(r: f64, s: f64, u: f64, theta: f64) -> Self {
        Self { r, s, u, theta }
    }

    pub fn build(&self) -> Result<ComplexMatrix2> {
        build_hamiltonian(self)
    }

    /// `sqrt((s − u)² + 4r²)`.
    pub fn gap(&self) -> f64 {
        (self.s - self.u).hypot(2.0 * self.r)
    }
}

pub fn build_hamiltonian(p: &HermitianParams) -> Result<ComplexMatrix2> {
    let off = C64::from_polar(p.r, p.theta);
    ComplexMatrix2::from_rows(p.s.into(), off.conj(), off, p.u.into())
}

/// Final state `(a, b)` for a transfer starting at `(1, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetState {
    pub a: C64,
    pub b: C64,
}

impl TargetState {
    pub fn new(a: C64, b: C64) -> Result<Self> {
        let norm_sq = a.norm_sqr() + b.norm_sqr();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > TARGET_NORM_TOL {
            return Err(Error::InvalidTarget { norm_sq });
        }
        Ok(Self { a, b })
    }

    /// Rescales `(a, b)` to unit norm.
    pub fn normalized(a: C64, b: C64) -> Result<Self> {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidTarget { norm_sq: n * n });
        }
        Self::new(a / n, b / n)
    }

    pub fn state(&self) -> StateVector2 {
        StateVector2::raw([self.a, self.b])
    }
}

/// `e^{−iHt/ħ}·(1, 0)` in closed form:
/// `e^{−i(s+u)t/2ħ}·(cos φ − i((s−u)/ω) sin φ, −i(2r/ω) e^{iθ} sin φ)` with `φ = ωt/2ħ`.
pub fn evolve_hermitian(p: &HermitianParams, t: f64, c: &EnergyConstraint) -> Result<StateVector2> {
    c.check_gap(p.gap())?;
    let phi = c.half_phase(t);
    let (sp, cp) = phi.sin_cos();
    let global = C64::new(0.0, -(p.s + p.u) * t / (2.0 * c.hbar)).exp();
    let up = C64::new(cp, -(p.s - p.u) / c.omega * sp);
    let down = -I * C64::from_polar(2.0 * p.r / c.omega, p.theta) * sp;
    StateVector2::new(global * up, global * down)
}

/// `τ = (2ħ/ω)·arcsin|b|`.
pub fn optimal_time(target: &TargetState, c: &EnergyConstraint) -> f64 {
    2.0 * c.hbar / c.omega * target.b.norm().min(1.0).asin()
}

/// `2πħ/ω`, twice the orthogonal passage time that [`optimal_time`] gives
/// for `|b| = 1`. Kept for comparison only.
pub fn passage_time_doubled(c: &EnergyConstraint) -> f64 {
    2.0 * PI * c.hbar / c.omega
}

/// How to fix the free phase of the optimal Hamiltonian's trace.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub enum PhaseConvention {
    /// Treat `arg a` as 0: zero diagonal, target reached up to a global phase.
    #[default]
    ZeroArgA,
    /// Use this value for `arg a`; `ArgA(target.a.arg())` reaches the target exactly.
    ArgA(f64),
}

/// Hamiltonian that reaches `target` from `(1, 0)` in [`optimal_time`]:
/// `r = ω/2`, `s = u = −ω·arg(a) / (2 arcsin|b|)`, `θ = arg b − arg a + π/2`.
pub fn optimal_hamiltonian(
    target: &TargetState,
    c: &EnergyConstraint,
    convention: PhaseConvention,
) -> Result<HermitianParams> {
    let bn = target.b.norm();
    if bn <= 0.0 {
        return Err(Error::DegenerateTarget);
    }
    let arg_a = match convention {
        PhaseConvention::ZeroArgA => 0.0,
        PhaseConvention::ArgA(phi) => phi,
    };
    // arg a of the target itself sets the relative phase; the convention
    // only decides which global phase the diagonal reproduces.
    let theta = target.b.arg() - target.a.arg() + FRAC_PI_2;
    let diag = if arg_a == 0.0 {
        0.0
    } else {
        -c.omega * arg_a / (2.0 * bn.min(1.0).asin())
    };
    Ok(HermitianParams {
        r: c.omega / 2.0,
        s: diag,
        u: diag,
        theta,
    })
}

/// `|⟨target|ψ⟩|` for unit vectors.
pub fn target_fidelity(target: &TargetState, psi: &StateVector2) -> f64 {
    target.state().fidelity(psi)
}

/// Resolution of the grid optimizer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Points for the mixing angle `β` with `r = (ω/2) sin β`, `s − u = ω cos β`.
    pub n_mixing: usize,
    /// Points for the off-diagonal phase `θ ∈ [0, 2π)`.
    pub n_phase: usize,
    /// Time steps over `(0, πħ/ω]`.
    pub n_time: usize,
}

impl GridSpec {
    pub fn uniform(n: usize) -> Self {
        Self {
            n_mixing: n,
            n_phase: n,
            n_time: n,
        }
    }

    fn validate(&self) -> Result<()> {
        for n in [self.n_mixing, self.n_phase, self.n_time] {
            if n < MIN_GRID {
                return Err(Error::InvalidGrid(n));
            }
        }
        Ok(())
    }

    /// Upper bound on how far below the true first-passage time the search
    /// can stop: the angular slack of the saturation threshold, doubled to
    /// absorb rounding in the fidelity near 1.
    pub fn resolution_error(&self, c: &EnergyConstraint) -> f64 {
        (2.0 * (1.0 - 2.0 * SATURATION_TOL).acos() + BISECTION_WIDTH * PI) * c.hbar / c.omega
    }
}

const GOLDEN_WIDTH: f64 = 1e-11;
const BISECTION_STEPS: usize = 48;
const BISECTION_WIDTH: f64 = 1e-12;

/// Outcome of [`brute_force_optimal_time`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub time: f64,
    pub fidelity: f64,
    /// Hamiltonian (trace zero) that attains `fidelity` at `time`.
    pub hamiltonian: HermitianParams,
    pub evaluations: u64,
}

struct Search<'a> {
    a: C64,
    b: C64,
    grid: &'a GridSpec,
    /// `(β, cos β, sin β)` for each mixing-angle node.
    mixing: Vec<(f64, f64, f64)>,
    /// `(θ, e^{iθ})` for each phase node.
    phases: Vec<(f64, C64)>,
    evaluations: u64,
}

impl<'a> Search<'a> {
    fn new(target: &TargetState, grid: &'a GridSpec) -> Self {
        let hb = PI / grid.n_mixing as f64;
        let ht = 2.0 * PI / grid.n_phase as f64;
        let mixing = (0..grid.n_mixing)
            .map(|i| {
                let beta = (i as f64 + 0.5) * hb;
                (beta, beta.cos(), beta.sin())
            })
            .collect();
        let phases = (0..grid.n_phase)
            .map(|j| {
                let theta = j as f64 * ht;
                (theta, C64::from_polar(1.0, theta))
            })
            .collect();
        Self {
            a: target.a,
            b: target.b,
            grid,
            mixing,
            phases,
            evaluations: 0,
        }
    }

    /// `|⟨target|ψ(φ)⟩|` for the direction `(sin β cos θ, sin β sin θ, cos β)`.
    fn fidelity(&mut self, sp: f64, cp: f64, beta: f64, theta: f64) -> f64 {
        self.evaluations += 1;
        let (sb, cb) = beta.sin_cos();
        let up = C64::new(cp, -cb * sp);
        let down = C64::new(0.0, -sp) * C64::from_polar(sb, theta);
        (self.a.conj() * up + self.b.conj() * down).norm()
    }

    /// Best phase for a fixed mixing angle: grid scan over `θ`, then a
    /// golden-section refinement around the best node.
    fn best_phase(&mut self, sp: f64, cp: f64, beta: f64) -> (f64, f64) {
        let ht = 2.0 * PI / self.grid.n_phase as f64;
        let mut top = (f64::NEG_INFINITY, 0.0);
        for j in 0..self.phases.len() {
            let theta = self.phases[j].0;
            let f = self.fidelity(sp, cp, beta, theta);
            if f > top.0 {
                top = (f, theta);
            }
        }
        let (theta, f) = golden_max(|th| self.fidelity(sp, cp, beta, th), top.1 - ht, top.1 + ht);
        if f > top.0 {
            (f, theta)
        } else {
            top
        }
    }

    /// Grid maximum at phase `φ` over `(β, θ)`, refined by nested
    /// one-dimensional searches.
    ///
    /// On a fixed `β` the squared fidelity is `C + D cos(θ − θ*)` with
    /// `D ≤ 1/2`, so the nearest phase node falls short of the true maximum
    /// by at most `(1 − cos(Δθ/2))/2`. Every mixing node within that margin
    /// of the coarse best is re-ranked with its phase refined; the final
    /// search over `β` brackets the winner.
    fn best(&mut self, phi: f64) -> (f64, f64, f64) {
        let (sp, cp) = phi.sin_cos();
        let mut nodes: Vec<(f64, usize)> = Vec::with_capacity(self.mixing.len());
        for (i, &(_, cb, sb)) in self.mixing.iter().enumerate() {
            let fixed = self.a.conj() * C64::new(cp, -cb * sp);
            let turning = self.b.conj() * C64::new(0.0, -sp * sb);
            let node_max = self
                .phases
                .iter()
                .map(|&(_, rot)| (fixed + turning * rot).norm_sqr())
                .fold(f64::NEG_INFINITY, f64::max);
            nodes.push((node_max, i));
        }
        self.evaluations += (self.mixing.len() * self.phases.len()) as u64;
        let coarse_best = nodes.iter().map(|n| n.0).fold(f64::NEG_INFINITY, f64::max);
        let dtheta = 2.0 * PI / self.grid.n_phase as f64;
        let margin = 1.01 * (1.0 - (dtheta / 2.0).cos()) / 2.0 + 1e-15;
        nodes.retain(|n| n.0 >= coarse_best - margin);

        let mut top = (f64::NEG_INFINITY, 0.0, 0.0);
        for &(_, i) in &nodes {
            let beta = self.mixing[i].0;
            let (f, theta) = self.best_phase(sp, cp, beta);
            if f > top.0 {
                top = (f, beta, theta);
            }
        }
        let hb = PI / self.grid.n_mixing as f64;
        let lo = (top.1 - hb).max(0.0);
        let hi = (top.1 + hb).min(PI);
        let (beta, f) = golden_max(|b| self.best_phase(sp, cp, b).0, lo, hi);
        if f > top.0 {
            let (f, theta) = self.best_phase(sp, cp, beta);
            (f, beta, theta)
        } else {
            top
        }
    }
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
fn golden_max(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > GOLDEN_WIDTH {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 < f2 {
        (x2, f2)
    } else {
        (x1, f1)
    }
}

/// Earliest time at which some gap-`ω` Hamiltonian on the search grid
/// carries `(1, 0)` onto `target` up to a global phase.
///
/// Times are scanned upward over `(0, πħ/ω]`; within the first step that
/// reaches the target the crossing is located by bisection.
pub fn brute_force_optimal_time(target: &TargetState, c: &EnergyConstraint, grid: &GridSpec) -> Result<OracleResult> {
    grid.validate()?;
    let mut search = Search::new(target, grid);
    let reached = |f: f64| f >= 1.0 - SATURATION_TOL;
    let params = |beta: f64, theta: f64| {
        let half = c.omega * beta.cos() / 2.0;
        HermitianParams {
            r: c.omega / 2.0 * beta.sin(),
            s: half,
            u: -half,
            theta,
        }
    };

    let start = target.a.norm();
    if reached(start) {
        return Ok(OracleResult {
            time: 0.0,
            fidelity: start,
            hamiltonian: params(0.0, 0.0),
            evaluations: 0,
        });
    }

    let t_max = PI * c.hbar / c.omega;
    let dt = t_max / grid.n_time as f64;
    let mut lo = 0.0;
    let mut hit = None;
    for k in 1..=grid.n_time {
        let t = k as f64 * dt;
        let top = search.best(c.half_phase(t));
        if reached(top.0) {
            hit = Some((t, top));
            break;
        }
        lo = t;
    }
    let Some((mut hi, mut top)) = hit else {
        return Err(Error::NoConvergence {
            iterations: grid.n_time,
            best_residual: 1.0 - search.best(c.half_phase(t_max)).0,
        });
    };
    for _ in 0..BISECTION_STEPS {
        if hi - lo <= BISECTION_WIDTH * t_max {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let cand = search.best(c.half_phase(mid));
        if reached(cand.0) {
            hi = mid;
            top = cand;
        } else {
            lo = mid;
        }
    }
    Ok(OracleResult {
        time: hi,
        fidelity: top.0,
        hamiltonian: params(top.1, top.2),
        evaluations: search.evaluations,
    })
}

/// Inner product used by [`aa_speed`].
#[derive(Clone, Copy, Debug)]
pub enum Metric<'a> {
    Dirac,
    Cpt(&'a MetricContext),
}

impl Metric<'_> {
    pub fn inner(&self, phi: &StateVector2, psi: &StateVector2) -> C64 {
        match self {
            Metric::Dirac => phi.dirac(psi),
            Metric::Cpt(m) => m.inner(phi, psi),
        }
    }
}

/// `ΔH = sqrt(⟨ψ|H²|ψ⟩ − ⟨ψ|H|ψ⟩²)` under the chosen inner product.
pub fn aa_speed(h: &ComplexMatrix2, psi: &StateVector2, metric: Metric<'_>) -> Result<f64> {
    let norm_sq = metric.inner(psi, psi);
    if (norm_sq - ONE).norm() > STATE_NORM_TOL {
        return Err(Error::NonNormalizedState { norm_sq: norm_sq.re });
    }
    let h_psi = h.apply(psi);
    let mean = metric.inner(psi, &h_psi).re;
    let second = metric.inner(&h_psi, &h_psi).re;
    Ok((second - mean * mean).max(0.0).sqrt())
}

/// `δ = 2 arccos|⟨ψ₂|ψ₁⟩|` for unit vectors.
pub fn fubini_distance(psi1: &StateVector2, psi2: &StateVector2) -> Result<f64> {
    for v in [psi1, psi2] {
        let n = v.norm_sqr();
        if (n - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NonNormalizedState { norm_sq: n });
        }
    }
    Ok(2.0 * psi2.dirac(psi1).norm().min(1.0).acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg2::{eigensystem, propagator_oracle};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_6};

    fn unit() -> EnergyConstraint {
        EnergyConstraint::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn constraint_validation() {
        assert!(EnergyConstraint::new(0.0, 1.0).is_err());
        assert!(EnergyConstraint::new(1.0, -1.0).is_err());
        assert!(EnergyConstraint::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn build_examples() {
        assert_eq!(
            HermitianParams::new(0.0, 0.0, 0.0, 0.0).build().unwrap(),
            ComplexMatrix2::zero()
        );
        let h = HermitianParams::new(1.0, 2.0, 0.0, FRAC_PI_2).build().unwrap();
        let expect = ComplexMatrix2::from_rows(C64::new(2.0, 0.0), -I, I, C64::new(0.0, 0.0)).unwrap();
        assert!(h.max_abs_diff(&expect) < 1e-15);
        assert_eq!(h.hermiticity_residual(), 0.0);
        let p = HermitianParams::new(1.0, 1.0, -1.0, 0.3);
        assert_abs_diff_eq!(p.gap(), 2.0 * 2f64.sqrt(), epsilon = 1e-15);
        let es = eigensystem(&p.build().unwrap()).unwrap();
        assert_abs_diff_eq!((es.values[0] - es.values[1]).re, p.gap(), epsilon = 1e-12);
    }

    #[test]
    fn evolve_examples() {
        let c = EnergyConstraint::new(2.0, 1.0).unwrap();
        let p = HermitianParams::new(1.0, 0.0, 0.0, 0.0);
        let psi = evolve_hermitian(&p, 0.0, &c).unwrap();
        assert_eq!(psi, StateVector2::up());
        let psi = evolve_hermitian(&p, PI / 2.0, &c).unwrap();
        assert!(psi.max_abs_diff(&StateVector2::new(C64::new(0.0, 0.0), -I).unwrap()) < 1e-15);

        let p = HermitianParams::new(3f64.sqrt() / 2.0, 1.0, 0.0, 0.4);
        let psi = evolve_hermitian(&p, 0.7, &c).unwrap();
        let oracle = propagator_oracle(&p.build().unwrap(), 0.7, 1.0).apply(&StateVector2::up());
        assert!(psi.max_abs_diff(&oracle) < 1e-11);

        let off = HermitianParams::new(1.0, 1.0, 0.0, 0.0);
        assert!(matches!(
            evolve_hermitian(&off, 1.0, &c),
            Err(Error::ConstraintViolated { .. })
        ));
    }

    #[test]
    fn optimal_time_examples() {
        let zero = TargetState::new(ONE, C64::new(0.0, 0.0)).unwrap();
        assert_eq!(optimal_time(&zero, &unit()), 0.0);
        let flip = TargetState::new(C64::new(0.0, 0.0), ONE).unwrap();
        assert_abs_diff_eq!(optimal_time(&flip, &unit()), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(passage_time_doubled(&unit()), 2.0 * PI);
        let half = TargetState::new(C64::new(0.75f64.sqrt(), 0.0), C64::new(0.5, 0.0)).unwrap();
        let c = EnergyConstraint::new(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(optimal_time(&half, &c), FRAC_PI_6, epsilon = 1e-15);
    }

    #[test]
    fn optimal_hamiltonian_examples() {
        let c = EnergyConstraint::new(2.0, 1.0).unwrap();
        let flip = TargetState::new(C64::new(0.0, 0.0), ONE).unwrap();
        let p = optimal_hamiltonian(&flip, &c, PhaseConvention::ZeroArgA).unwrap();
        assert_eq!((p.s, p.u), (0.0, 0.0));
        let tau = optimal_time(&flip, &c);
        assert_abs_diff_eq!(tau, PI / 2.0, epsilon = 1e-15);
        let psi = evolve_hermitian(&p, tau, &c).unwrap();
        assert!(target_fidelity(&flip, &psi) > 1.0 - 1e-12);

        let c = unit();
        let even = TargetState::new(C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)).unwrap();
        let p = optimal_hamiltonian(&even, &c, PhaseConvention::ZeroArgA).unwrap();
        let psi = evolve_hermitian(&p, optimal_time(&even, &c), &c).unwrap();
        assert!(target_fidelity(&even, &psi) > 1.0 - 1e-12);

        let zero = TargetState::new(ONE, C64::new(0.0, 0.0)).unwrap();
        assert_eq!(
            optimal_hamiltonian(&zero, &c, PhaseConvention::ZeroArgA),
            Err(Error::DegenerateTarget)
        );
    }

    #[test]
    fn optimal_hamiltonian_with_phase_is_exact() {
        let c = EnergyConstraint::new(1.3, 0.8).unwrap();
        let target = TargetState::normalized(C64::from_polar(0.6, 2.2), C64::from_polar(0.8, -0.9)).unwrap();
        let p = optimal_hamiltonian(&target, &c, PhaseConvention::ArgA(target.a.arg())).unwrap();
        let tau = optimal_time(&target, &c);
        let psi = evolve_hermitian(&p, tau, &c).unwrap();
        assert!(psi.max_abs_diff(&target.state()) < 1e-12);
        // a = e^{−iτs/ħ}·sqrt(1 − |b|²)
        let a = C64::new(0.0, -tau * p.s / c.hbar).exp() * (1.0 - target.b.norm_sqr()).sqrt();
        assert!((psi.get(0) - a).norm() < 1e-12);
    }

    #[test]
    fn oracle_examples() {
        let grid = GridSpec::uniform(100);
        let c = EnergyConstraint::new(2.0, 1.0).unwrap();
        let flip = TargetState::new(C64::new(0.0, 0.0), ONE).unwrap();
        let res = brute_force_optimal_time(&flip, &c, &grid).unwrap();
        assert!((res.time / (PI / 2.0) - 1.0).abs() < 0.01);
        assert!(
            res.time >= PI / 2.0 - grid.resolution_error(&c),
            "{res:?} {}",
            grid.resolution_error(&c)
        );

        let zero = TargetState::new(ONE, C64::new(0.0, 0.0)).unwrap();
        assert_eq!(brute_force_optimal_time(&zero, &c, &grid).unwrap().time, 0.0);

        let t = TargetState::new(C64::new(0.8, 0.0), C64::new(0.0, 0.6)).unwrap();
        let res = brute_force_optimal_time(&t, &unit(), &grid).unwrap();
        let tau = 2.0 * 0.6f64.asin();
        assert!((res.time / tau - 1.0).abs() < 0.01, "{} vs {tau}", res.time);
        let psi = evolve_hermitian(&res.hamiltonian, res.time, &unit()).unwrap();
        assert!(target_fidelity(&t, &psi) >= 1.0 - 1e-6);

        assert_eq!(
            brute_force_optimal_time(&t, &unit(), &GridSpec::uniform(99)),
            Err(Error::InvalidGrid(99))
        );
    }

    #[test]
    fn speed_examples() {
        let p = HermitianParams::new(0.7, 0.4, -0.2, 1.1);
        let h = p.build().unwrap();
        let speed = aa_speed(&h, &StateVector2::up(), Metric::Dirac).unwrap();
        assert_abs_diff_eq!(speed, 0.7, epsilon = 1e-14);
        let es = eigensystem(&h).unwrap();
        let v = es.vectors[0].normalized().unwrap();
        assert!(aa_speed(&h, &v, Metric::Dirac).unwrap() < 1e-7);
        let bad = StateVector2::new(ONE, ONE).unwrap();
        assert!(matches!(
            aa_speed(&h, &bad, Metric::Dirac),
            Err(Error::NonNormalizedState { .. })
        ));
    }

    #[test]
    fn fubini_examples() {
        let (up, down) = (StateVector2::up(), StateVector2::down());
        assert_eq!(fubini_distance(&up, &up).unwrap(), 0.0);
        assert_abs_diff_eq!(fubini_distance(&up, &down).unwrap(), PI, epsilon = 1e-15);
        let v = StateVector2::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        assert_abs_diff_eq!(fubini_distance(&up, &v).unwrap(), 2.0 * 0.6f64.acos(), epsilon = 1e-15);
    }
}
