//! Deterministic random specs for the verification suites and tests.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hermitian::{EnergyConstraint, HermitianParams, TargetState};
use crate::linalg2::{StateVector2, C64};
use crate::ptcore::{PT3Params, PT4Params};

pub type SpecRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SpecRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the Bloch sphere: `|b|²` uniform in `[0, 1]`, phases uniform.
pub fn target(rng: &mut SpecRng) -> TargetState {
    let b2: f64 = rng.gen_range(1e-6..1.0);
    let a = C64::from_polar((1.0 - b2).sqrt(), rng.gen_range(-PI..PI));
    let b = C64::from_polar(b2.sqrt(), rng.gen_range(-PI..PI));
    TargetState::normalized(a, b).expect("nonzero by construction")
}

/// Unit vector with uniformly distributed components on the sphere.
pub fn unit_state(rng: &mut SpecRng) -> StateVector2 {
    target(rng).state()
}

pub fn constraint(rng: &mut SpecRng) -> EnergyConstraint {
    EnergyConstraint::new(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)).expect("positive")
}

/// Hermitian parameters whose gap is exactly `c.omega`.
pub fn hermitian(rng: &mut SpecRng, c: &EnergyConstraint) -> HermitianParams {
    let beta: f64 = rng.gen_range(0.0..PI);
    let mean: f64 = rng.gen_range(-1.0..1.0);
    let half = c.omega * beta.cos() / 2.0;
    HermitianParams::new(
        c.omega / 2.0 * beta.sin(),
        mean + half,
        mean - half,
        rng.gen_range(-PI..PI),
    )
}

/// Unbroken three-parameter spec with gap `c.omega` and `|α| ≤ alpha_max`.
pub fn pt3(rng: &mut SpecRng, c: &EnergyConstraint, alpha_max: f64) -> PT3Params {
    let alpha = rng.gen_range(-alpha_max..alpha_max);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let theta = sign * rng.gen_range(0.2..PI - 0.2);
    PT3Params::from_alpha(alpha, theta, c.omega).expect("sin θ bounded away from 0")
}

/// Unbroken four-parameter spec with gap `c.omega`. With `positive_metric`
/// the closed-form metric is positive definite (`z / sin γ > 0`).
pub fn pt4(rng: &mut SpecRng, c: &EnergyConstraint, positive_metric: bool) -> PT4Params {
    let quadrant = rng.gen_range(0..4) as f64;
    let gamma = quadrant * FRAC_PI_2 + rng.gen_range(0.15..FRAC_PI_2 - 0.15);
    let y: f64 = rng.gen_range(-1.0..1.0);
    let x: f64 = rng.gen_range(-1.0..1.0);
    let (sg, cg) = gamma.sin_cos();
    let zc = ((c.omega / 2.0).powi(2) + (y / cg).powi(2)).sqrt();
    let sign = if positive_metric || rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    };
    PT4Params::new(x, y, sign * zc * sg, gamma)
}
