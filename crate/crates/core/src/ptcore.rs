//! PT-symmetric two-level Hamiltonians and their dynamical metric.
//!
//! Two families are covered:
//!
//! * the three-parameter family `[[r e^{iθ}, s], [s, r e^{−iθ}]]` with
//!   parity `σx`, unbroken for `s² > r² sin²θ`;
//! * the four-parameter family built on the generalized parity
//!   `[[sin γ, cos γ], [cos γ, −sin γ]]`.
//!
//! For each, the C operator is known in closed form. The inner product is
//! `⟨φ|ψ⟩ = (C·P·φ*)ᵀ·ψ`; for the three-parameter eigenstates this gives
//! the norm `√(2 cos α)` with `sin α = (r/s) sin θ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{EnergyConstraint, HermitianParams};
use crate::linalg2::{eigensystem, hermitian_function, ComplexMatrix2, StateVector2, C64, I, ONE};

/// Relative tolerance on the discriminant that separates unbroken from
/// broken (or exceptional) parameter points.
pub const UNBROKEN_TOL: f64 = 1e-12;

/// `|tan γ|` and `|cos γ|` below this make the four-parameter family singular.
pub const GAMMA_TOL: f64 = 1e-12;

/// Threshold for [`AxiomReport::passes`].
pub const AXIOM_TOL: f64 = 1e-10;

/// `H = [[r e^{iθ}, s], [s, r e^{−iθ}]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PT3Params {
    pub r: f64,
    pub s: f64,
    pub theta: f64,
}

impl PT3Params {
    pub fn new(r: f64, s: f64, theta: f64) -> Self {
        Self { r, s, theta }
    }

    /// Parameters with gap `ω` and mixing angle `α`, for a chosen `θ`:
    /// `s = ω / (2 cos α)`, `r = s sin α / sin θ`.
    pub fn from_alpha(alpha: f64, theta: f64, omega: f64) -> Result<Self> {
        if !(alpha.abs() < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {alpha} outside (-pi/2, pi/2)"
            )));
        }
        if theta.sin().abs() < GAMMA_TOL {
            return Err(Error::InvalidParameter(format!(
                "sin(theta) vanishes for theta = {theta}"
            )));
        }
        let s = omega / (2.0 * alpha.cos());
        Ok(Self {
            r: s * alpha.sin() / theta.sin(),
            s,
            theta,
        })
    }

    pub fn build(&self) -> Result<ComplexMatrix2> {
        ComplexMatrix2::from_rows(
            C64::from_polar(self.r, self.theta),
            self.s.into(),
            self.s.into(),
            C64::from_polar(self.r, -self.theta),
        )
    }

    /// `s² − r² sin²θ`.
    pub fn discriminant(&self) -> f64 {
        let rs = self.r * self.theta.sin();
        self.s * self.s - rs * rs
    }

    pub fn is_unbroken(&self) -> bool {
        self.discriminant() > UNBROKEN_TOL * self.s * self.s
    }

    fn require_unbroken(&self) -> Result<()> {
        if self.is_unbroken() {
            Ok(())
        } else {
            Err(Error::BrokenPTSymmetry {
                discriminant: self.discriminant(),
            })
        }
    }

    /// `α = arcsin((r/s) sin θ)` on the principal branch, in `(−π/2, π/2)`.
    pub fn alpha(&self) -> Result<f64> {
        self.require_unbroken()?;
        Ok((self.r * self.theta.sin() / self.s).asin())
    }

    /// `E₊ − E₋ = 2 sqrt(s² − r² sin²θ)`.
    pub fn gap(&self) -> Result<f64> {
        self.require_unbroken()?;
        Ok(2.0 * self.discriminant().sqrt())
    }
}

/// `H = [[x + (z + iy), z/tan γ − iy tan γ], [z/tan γ − iy tan γ, x − (z + iy)]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PT4Params {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub gamma: f64,
}

impl PT4Params {
    pub fn new(x: f64, y: f64, z: f64, gamma: f64) -> Self {
        Self { x, y, z, gamma }
    }

    pub fn check_gamma(&self) -> Result<()> {
        if self.gamma.tan().abs() < GAMMA_TOL || self.gamma.cos().abs() < GAMMA_TOL {
            return Err(Error::DegenerateGamma { gamma: self.gamma });
        }
        Ok(())
    }

    fn off_diagonal(&self) -> C64 {
        C64::new(self.z / self.gamma.tan(), -self.y * self.gamma.tan())
    }

    pub fn build(&self) -> Result<ComplexMatrix2> {
        self.check_gamma()?;
        let d = C64::new(self.z, self.y);
        let w = self.off_diagonal();
        ComplexMatrix2::from_rows(self.x + d, w, w, self.x - d)
    }

    /// `4z² csc²γ − 4y² sec²γ`.
    pub fn gap_squared(&self) -> f64 {
        let zc = self.z / self.gamma.sin();
        let ys = self.y / self.gamma.cos();
        4.0 * (zc * zc - ys * ys)
    }

    pub fn is_unbroken(&self) -> bool {
        let zc = self.z / self.gamma.sin();
        self.check_gamma().is_ok() && self.gap_squared() > 4.0 * UNBROKEN_TOL * zc * zc
    }

    pub fn gap(&self) -> Result<f64> {
        self.check_gamma()?;
        if !self.is_unbroken() {
            return Err(Error::BrokenPTSymmetry {
                discriminant: self.gap_squared(),
            });
        }
        Ok(self.gap_squared().sqrt())
    }

    /// `2z / (ω sin γ)`: the squared CPT norm of `(1, 0)`. Positive exactly
    /// when the closed-form C operator induces a positive-definite metric.
    pub fn initial_norm_sq(&self) -> Result<f64> {
        Ok(2.0 * self.z / (self.gap()? * self.gamma.sin()))
    }
}

/// The Hamiltonian families handled by the toolkit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum HamiltonianSpec {
    Hermitian(HermitianParams),
    Pt3(PT3Params),
    Pt4(PT4Params),
}

impl HamiltonianSpec {
    pub fn matrix(&self) -> Result<ComplexMatrix2> {
        match self {
            Self::Hermitian(p) => p.build(),
            Self::Pt3(p) => p.build(),
            Self::Pt4(p) => p.build(),
        }
    }

    pub fn gap(&self) -> Result<f64> {
        match self {
            Self::Hermitian(p) => Ok(p.gap()),
            Self::Pt3(p) => p.gap(),
            Self::Pt4(p) => p.gap(),
        }
    }
}

/// Eigen-energies and the unnormalized eigenstates
/// `(e^{iα/2}, e^{−iα/2})`, `(i e^{−iα/2}, −i e^{iα/2})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pt3Eigensystem {
    /// `[E₊, E₋]`, `E± = r cos θ ± sqrt(s² − r² sin²θ)`.
    pub energies: [f64; 2],
    /// `states[k]` belongs to `energies[k]`.
    pub states: [StateVector2; 2],
    pub alpha: f64,
}

pub fn pt3_eigensystem(p: &PT3Params) -> Result<Pt3Eigensystem> {
    let alpha = p.alpha()?;
    let root = p.discriminant().sqrt();
    let mid = p.r * p.theta.cos();
    let half = C64::new(0.0, alpha / 2.0).exp();
    let first = StateVector2::new(half, half.conj())?;
    let second = StateVector2::new(I * half.conj(), -I * half)?;
    // The first vector has eigenvalue r cos θ + s cos α, which is the upper
    // level only for s > 0.
    let states = if p.s > 0.0 { [first, second] } else { [second, first] };
    Ok(Pt3Eigensystem {
        energies: [mid + root, mid - root],
        states,
        alpha,
    })
}

/// `C = (1/cos α)·[[i sin α, 1], [1, −i sin α]]`.
pub fn c_operator_pt3(p: &PT3Params) -> Result<ComplexMatrix2> {
    let alpha = p.alpha()?;
    let (sa, ca) = alpha.sin_cos();
    ComplexMatrix2::from_rows(C64::new(0.0, sa), ONE, ONE, C64::new(0.0, -sa)).map(|m| m.scale((1.0 / ca).into()))
}

/// The standard parity `σx`.
pub fn parity_standard() -> ComplexMatrix2 {
    ComplexMatrix2::pauli_x()
}

/// `P = [[sin γ, cos γ], [cos γ, −sin γ]]`.
pub fn parity_general(gamma: f64) -> ComplexMatrix2 {
    let (s, c) = gamma.sin_cos();
    ComplexMatrix2::raw([[s.into(), c.into()], [c.into(), (-s).into()]])
}

/// `C = (2/ω)·[[z + iy, z/tan γ − iy tan γ], [z/tan γ − iy tan γ, −z − iy]]`,
/// i.e. the Pauli direction `σ·n` of `H = x·1 + (ω/2) σ·n`.
pub fn c_operator_pt4(p: &PT4Params, c: &EnergyConstraint) -> Result<ComplexMatrix2> {
    let gap = p.gap()?;
    c.check_gap(gap)?;
    let d = C64::new(p.z, p.y);
    let w = p.off_diagonal();
    ComplexMatrix2::from_rows(d, w, w, -d).map(|m| m.scale((2.0 / c.omega).into()))
}

/// Parity, C operator and the Hamiltonian they were derived from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricContext {
    pub parity: ComplexMatrix2,
    pub c_op: ComplexMatrix2,
    pub source: HamiltonianSpec,
}

impl MetricContext {
    pub fn new(parity: ComplexMatrix2, c_op: ComplexMatrix2, source: HamiltonianSpec) -> Self {
        Self { parity, c_op, source }
    }

    pub fn for_pt3(p: &PT3Params) -> Result<Self> {
        Ok(Self::new(
            parity_standard(),
            c_operator_pt3(p)?,
            HamiltonianSpec::Pt3(*p),
        ))
    }

    /// Uses the family's own gap as `ω`.
    pub fn for_pt4(p: &PT4Params) -> Result<Self> {
        let c = EnergyConstraint::new(p.gap()?, 1.0)?;
        Ok(Self::new(
            parity_general(p.gamma),
            c_operator_pt4(p, &c)?,
            HamiltonianSpec::Pt4(*p),
        ))
    }

    /// Gram matrix `G` with `⟨φ|ψ⟩ = φ†·G·ψ`; equals `(C P)ᵀ`.
    pub fn gram(&self) -> ComplexMatrix2 {
        (self.c_op * self.parity).transpose()
    }

    /// The PT action `ψ ↦ P·ψ*`.
    pub fn pt_apply(&self, psi: &StateVector2) -> StateVector2 {
        self.parity.apply(&psi.conj())
    }

    pub fn inner(&self, phi: &StateVector2, psi: &StateVector2) -> C64 {
        let cpt_phi = self.c_op.apply(&self.pt_apply(phi));
        cpt_phi.get(0) * psi.get(0) + cpt_phi.get(1) * psi.get(1)
    }

    /// `⟨ψ|ψ⟩` (real part; the imaginary part vanishes for a valid metric).
    pub fn norm_sq(&self, psi: &StateVector2) -> f64 {
        self.inner(psi, psi).re
    }

    pub fn norm(&self, psi: &StateVector2) -> Result<f64> {
        let n2 = self.norm_sq(psi);
        if !(n2 > 0.0) {
            return Err(Error::NotPositive { eigenvalue: n2 });
        }
        Ok(n2.sqrt())
    }

    /// `2 arccos(|⟨φ|ψ⟩| / (‖φ‖‖ψ‖))` in the CPT geometry.
    pub fn separation(&self, phi: &StateVector2, psi: &StateVector2) -> Result<f64> {
        let overlap = self.inner(psi, phi).norm() / (self.norm(phi)? * self.norm(psi)?);
        Ok(2.0 * overlap.min(1.0).acos())
    }
}

/// `⟨φ|ψ⟩_CPT = (C·P·φ*)ᵀ·ψ`.
pub fn cpt_inner_product(phi: &StateVector2, psi: &StateVector2, m: &MetricContext) -> C64 {
    m.inner(phi, psi)
}

/// Max-abs residuals of `C² = 1`, `[C, H] = 0` and `[C, PT] = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub c_squared: f64,
    pub commutes_with_h: f64,
    pub commutes_with_pt: f64,
}

impl AxiomReport {
    pub fn worst(&self) -> f64 {
        self.c_squared.max(self.commutes_with_h).max(self.commutes_with_pt)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.worst() < tol
    }
}

pub fn verify_metric_axioms(h: &ComplexMatrix2, m: &MetricContext) -> AxiomReport {
    let c = &m.c_op;
    let c_squared = (*c * *c).max_abs_diff(&ComplexMatrix2::identity());
    let commutes_with_h = c.commutator(h).norm_max();
    // PT is antilinear: C·P·ψ* = P·(C·ψ)* for all ψ iff C·P = P·C*.
    let mut commutes_with_pt = 0.0f64;
    for e in [StateVector2::up(), StateVector2::down()] {
        let lhs = c.apply(&m.pt_apply(&e));
        let rhs = m.pt_apply(&c.apply(&e));
        commutes_with_pt = commutes_with_pt.max(lhs.max_abs_diff(&rhs));
    }
    AxiomReport {
        c_squared,
        commutes_with_h,
        commutes_with_pt,
    }
}

/// `Q = log(CP)` and the isospectral Hermitian `h = e^{−Q/2}·H·e^{Q/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalentHermitian {
    pub q: ComplexMatrix2,
    pub h: ComplexMatrix2,
}

pub fn equivalent_hermitian(h: &ComplexMatrix2, m: &MetricContext) -> Result<EquivalentHermitian> {
    let cp = m.c_op * m.parity;
    let (q, spectrum) = hermitian_function(&cp, |l| l.ln())?;
    let lowest = spectrum[1];
    if !(lowest > 0.0) {
        return Err(Error::NotPositive { eigenvalue: lowest });
    }
    let (exp_minus_half, _) = hermitian_function(&cp, |l| l.powf(-0.5))?;
    let (exp_plus_half, _) = hermitian_function(&cp, |l| l.sqrt())?;
    Ok(EquivalentHermitian {
        q,
        h: exp_minus_half * *h * exp_plus_half,
    })
}

/// Sorted real parts of the eigenvalues, for isospectrality checks.
pub fn spectrum(m: &ComplexMatrix2) -> Result<[C64; 2]> {
    Ok(eigensystem(m)?.values)
}

/// Spectral distance between two matrices: eigenvalues paired in the
/// descending-real-part order used by [`eigensystem`].
pub fn spectral_distance(a: &ComplexMatrix2, b: &ComplexMatrix2) -> Result<f64> {
    let (sa, sb) = (spectrum(a)?, spectrum(b)?);
    Ok((sa[0] - sb[0]).norm().max((sa[1] - sb[1]).norm()))
}
