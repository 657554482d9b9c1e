//! Dense 2×2 complex linear algebra.
//!
//! Everything in the toolkit is a two-level system, so matrices and vectors
//! are fixed-size value types. Closed forms go through the Pauli
//! decomposition `M = c0·1 + halfgap·(σ·n)`, where `n` is a *complex* unit
//! vector in the bilinear sense (`n·n = 1`, no conjugation). That is the
//! normalization that keeps `exp(iφ σ·n) = cos φ·1 + i sin φ·σ·n` valid for
//! non-Hermitian generators.
//!
//! [`matrix_exp_oracle`] is a scaling-and-squaring Taylor exponential that
//! shares no code with the closed forms; tests use it as the reference.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative threshold on `|halfgap| / ‖M‖∞` below which a matrix is treated
/// as sitting on an exceptional point.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Tolerance on `|n·n − 1|` accepted by [`exp_i_phi_sigma_n`].
pub const UNIT_DIRECTION_TOL: f64 = 1e-10;

/// Minimum `|det V|` of the normalized eigenvector matrix. Below this the
/// eigenbasis is numerically dependent, i.e. the matrix is too close to an
/// exceptional point to be diagonalized reliably.
pub const EIGENBASIS_INDEPENDENCE_TOL: f64 = 1e-8;

const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

fn all_finite(z: &[C64]) -> bool {
    z.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Dense 2×2 complex matrix, row-major.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix2 {
    entries: [[C64; 2]; 2],
}

impl fmt::Debug for ComplexMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.entries;
        write!(f, "[[{}, {}], [{}, {}]]", e[0][0], e[0][1], e[1][0], e[1][1])
    }
}

impl ComplexMatrix2 {
    /// Builds a matrix, rejecting NaN or infinite entries.
    pub fn new(entries: [[C64; 2]; 2]) -> Result<Self> {
        if !all_finite(&[entries[0][0], entries[0][1], entries[1][0], entries[1][1]]) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { entries })
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) const fn raw(entries: [[C64; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn from_rows(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        Self::new([[a, b], [c, d]])
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::from_rows(a.into(), b.into(), c.into(), d.into())
    }

    pub const fn identity() -> Self {
        Self::raw([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn zero() -> Self {
        Self::raw([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn pauli_x() -> Self {
        Self::raw([[ZERO, ONE], [ONE, ZERO]])
    }

    pub const fn pauli_y() -> Self {
        Self::raw([[ZERO, C64::new(0.0, -1.0)], [I, ZERO]])
    }

    pub const fn pauli_z() -> Self {
        Self::raw([[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]])
    }

    pub fn diag(a: C64, b: C64) -> Result<Self> {
        Self::from_rows(a, ZERO, ZERO, b)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row][col]
    }

    pub fn entries(&self) -> [[C64; 2]; 2] {
        self.entries
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.flat())
    }

    fn flat(&self) -> [C64; 4] {
        let e = &self.entries;
        [e[0][0], e[0][1], e[1][0], e[1][1]]
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let e = &self.entries;
        Self::raw([[f(e[0][0]), f(e[0][1])], [f(e[1][0]), f(e[1][1])]])
    }

    pub fn adjoint(&self) -> Self {
        let e = &self.entries;
        Self::raw([[e[0][0].conj(), e[1][0].conj()], [e[0][1].conj(), e[1][1].conj()]])
    }

    pub fn transpose(&self) -> Self {
        let e = &self.entries;
        Self::raw([[e[0][0], e[1][0]], [e[0][1], e[1][1]]])
    }

    /// Entrywise complex conjugate (the time-reversal action on matrices).
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn scale(&self, k: C64) -> Self {
        self.map(|z| z * k)
    }

    pub fn trace(&self) -> C64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn det(&self) -> C64 {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.flat().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Induced ∞-norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        self.entries
            .iter()
            .map(|row| row[0].norm() + row[1].norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).norm_max()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn apply(&self, v: &StateVector2) -> StateVector2 {
        let e = &self.entries;
        let [x, y] = v.components;
        StateVector2::raw([e[0][0] * x + e[0][1] * y, e[1][0] * x + e[1][1] * y])
    }

    /// `‖M − M†‖` as a max-abs entry residual.
    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }
}

impl Add for ComplexMatrix2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        Self::raw([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for ComplexMatrix2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        Self::raw([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

impl Neg for ComplexMatrix2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl Mul for ComplexMatrix2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        Self::raw([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Mul<C64> for ComplexMatrix2 {
    type Output = Self;
    fn mul(self, k: C64) -> Self {
        self.scale(k)
    }
}

impl Mul<f64> for ComplexMatrix2 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.scale(k.into())
    }
}

/// Two-component complex state vector.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVector2 {
    components: [C64; 2],
}

impl fmt::Debug for StateVector2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.components[0], self.components[1])
    }
}

impl StateVector2 {
    pub fn new(first: C64, second: C64) -> Result<Self> {
        if !all_finite(&[first, second]) {
            return Err(Error::NonFinite("state components"));
        }
        Ok(Self {
            components: [first, second],
        })
    }

    pub(crate) const fn raw(components: [C64; 2]) -> Self {
        Self { components }
    }

    /// The spin-up state `(1, 0)`.
    pub const fn up() -> Self {
        Self::raw([ONE, ZERO])
    }

    /// The spin-down state `(0, 1)`.
    pub const fn down() -> Self {
        Self::raw([ZERO, ONE])
    }

    #[inline]
    pub fn get(&self, i: usize) -> C64 {
        self.components[i]
    }

    pub fn components(&self) -> [C64; 2] {
        self.components
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.components)
    }

    /// Dirac inner product `⟨self|other⟩` (antilinear in `self`).
    pub fn dirac(&self, other: &Self) -> C64 {
        self.components[0].conj() * other.components[0] + self.components[1].conj() * other.components[1]
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components[0].norm_sqr() + self.components[1].norm_sqr()
    }

    pub fn scale(&self, k: C64) -> Self {
        Self::raw([self.components[0] * k, self.components[1] * k])
    }

    pub fn conj(&self) -> Self {
        Self::raw([self.components[0].conj(), self.components[1].conj()])
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NonNormalizedState { norm_sq: n * n });
        }
        Ok(self.scale((1.0 / n).into()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.components[0] - other.components[0])
            .norm()
            .max((self.components[1] - other.components[1]).norm())
    }

    /// Phase-insensitive overlap `|⟨self|other⟩| / (‖self‖‖other‖)` in `[0, 1]`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            return 0.0;
        }
        (self.dirac(other).norm() / denom).min(1.0)
    }
}

/// `M = c0·1 + halfgap·(σ·n)` with `n·n = 1` (bilinear).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliDecomposition {
    pub c0: C64,
    pub n: [C64; 3],
    pub halfgap: C64,
}

impl PauliDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix2 {
        ComplexMatrix2::identity().scale(self.c0) + sigma_dot(&self.n).scale(self.halfgap)
    }

    /// `n₁² + n₂² + n₃²` without conjugation.
    pub fn bilinear_norm(&self) -> C64 {
        bilinear_dot(&self.n, &self.n)
    }
}

pub fn bilinear_dot(a: &[C64; 3], b: &[C64; 3]) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `σ·n = n₁σx + n₂σy + n₃σz`.
pub fn sigma_dot(n: &[C64; 3]) -> ComplexMatrix2 {
    ComplexMatrix2::raw([[n[2], n[0] - I * n[1]], [n[0] + I * n[1], -n[2]]])
}

/// Splits `M` into identity and Pauli parts.
///
/// `halfgap = sqrt(tr(M)²/4 − det M)` on the principal branch, so the
/// eigenvalues are `c0 ± halfgap`. Fails with [`Error::DegenerateMatrix`]
/// when `|halfgap| <= DEGENERACY_TOL·‖M‖∞`, which covers both a vanishing
/// traceless part and a nilpotent one (an exceptional point).
pub fn pauli_decompose(m: &ComplexMatrix2) -> Result<PauliDecomposition> {
    if !m.is_finite() {
        return Err(Error::NonFinite("pauli_decompose input"));
    }
    let c0 = m.trace() * 0.5;
    let traceless = *m - ComplexMatrix2::identity().scale(c0);
    // det of the traceless part is −halfgap²; computing it from K avoids
    // cancellation between tr²/4 and det M when c0 is large.
    let halfgap = (-traceless.det()).sqrt();
    let scale = m.norm_max();
    if halfgap.norm() <= DEGENERACY_TOL * scale {
        return Err(Error::DegenerateMatrix {
            halfgap: halfgap.norm(),
            scale,
        });
    }
    let k01 = traceless.get(0, 1);
    let k10 = traceless.get(1, 0);
    let n = [
        (k01 + k10) * 0.5 / halfgap,
        (k10 - k01) * 0.5 / (I * halfgap),
        traceless.get(0, 0) / halfgap,
    ];
    Ok(PauliDecomposition { c0, n, halfgap })
}

/// `exp(iφ σ·n) = cos φ·1 + i sin φ·(σ·n)` for a bilinear unit vector `n`.
pub fn exp_i_phi_sigma_n(phi: C64, n: &[C64; 3]) -> Result<ComplexMatrix2> {
    let residual = (bilinear_dot(n, n) - ONE).norm();
    if !(residual <= UNIT_DIRECTION_TOL) {
        return Err(Error::NonUnitDirection { residual });
    }
    Ok(ComplexMatrix2::identity().scale(phi.cos()) + sigma_dot(n).scale(I * phi.sin()))
}

/// `exp(M)` through the Pauli decomposition.
///
/// At an exceptional point the traceless part `K` satisfies `K² = 0`, so the
/// series terminates: `exp(M) = e^{c0}(1 + K)`.
pub fn closed_form_exp(m: &ComplexMatrix2) -> Result<ComplexMatrix2> {
    match pauli_decompose(m) {
        Ok(d) => {
            // exp(h σ·n) = exp(i·(−ih) σ·n)
            let rot = exp_i_phi_sigma_n(-I * d.halfgap, &d.n)?;
            Ok(rot.scale(d.c0.exp()))
        }
        Err(Error::DegenerateMatrix { .. }) => {
            let c0 = m.trace() * 0.5;
            let k = *m - ComplexMatrix2::identity().scale(c0);
            Ok((ComplexMatrix2::identity() + k).scale(c0.exp()))
        }
        Err(e) => Err(e),
    }
}

/// `e^{−iHt/ħ}` via [`closed_form_exp`].
pub fn propagator(h: &ComplexMatrix2, t: f64, hbar: f64) -> Result<ComplexMatrix2> {
    closed_form_exp(&h.scale(C64::new(0.0, -t / hbar)))
}

/// `e^{−iHt/ħ}` via [`matrix_exp_oracle`].
pub fn propagator_oracle(h: &ComplexMatrix2, t: f64, hbar: f64) -> ComplexMatrix2 {
    matrix_exp_oracle(&h.scale(C64::new(0.0, -t / hbar)))
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
///
/// Independent of the Pauli machinery above. The argument is scaled by
/// `2^-s` until its ∞-norm is at most 1/4, the series is summed until the
/// next term drops below one ulp of the partial sum, and the result is
/// squared `s` times.
pub fn matrix_exp_oracle(m: &ComplexMatrix2) -> ComplexMatrix2 {
    let norm = m.norm_inf();
    let mut squarings = 0u32;
    if norm > 0.25 {
        squarings = (norm / 0.25).log2().ceil() as u32;
    }
    let a = m.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));

    let mut sum = ComplexMatrix2::identity();
    let mut term = ComplexMatrix2::identity();
    for k in 1..=40 {
        term = (term * a).scale(C64::new(1.0 / k as f64, 0.0));
        sum = sum + term;
        if term.norm_max() <= f64::EPSILON * 0.125 * sum.norm_max() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Eigenvalues and unit-norm eigenvectors, ordered by descending real part
/// (ties broken by descending imaginary part).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigensystem {
    pub values: [C64; 2],
    pub vectors: [StateVector2; 2],
}

fn null_vector(m: &ComplexMatrix2, lambda: C64) -> Option<StateVector2> {
    // Rows of (M − λ) are orthogonal (bilinearly) to the eigenvector; take
    // whichever candidate is better conditioned.
    let from_row0 = StateVector2::raw([m.get(0, 1), lambda - m.get(0, 0)]);
    let from_row1 = StateVector2::raw([lambda - m.get(1, 1), m.get(1, 0)]);
    let v = if from_row0.norm() >= from_row1.norm() {
        from_row0
    } else {
        from_row1
    };
    v.normalized().ok()
}

pub fn eigensystem(m: &ComplexMatrix2) -> Result<Eigensystem> {
    if !m.is_finite() {
        return Err(Error::NonFinite("eigensystem input"));
    }
    let d = match pauli_decompose(m) {
        Ok(d) => d,
        Err(Error::DegenerateMatrix { .. }) => {
            let c0 = m.trace() * 0.5;
            let k = *m - ComplexMatrix2::identity().scale(c0);
            if k.norm_max() <= DEGENERACY_TOL * m.norm_max().max(f64::MIN_POSITIVE) {
                // scalar matrix: every vector is an eigenvector
                return Ok(Eigensystem {
                    values: [c0, c0],
                    vectors: [StateVector2::up(), StateVector2::down()],
                });
            }
            return Err(Error::DefectiveMatrix {
                reason: "coincident eigenvalues with nonzero nilpotent part",
            });
        }
        Err(e) => return Err(e),
    };
    let mut values = [d.c0 + d.halfgap, d.c0 - d.halfgap];
    let ordered = |a: C64, b: C64| a.re > b.re || (a.re == b.re && a.im >= b.im);
    if !ordered(values[0], values[1]) {
        values.swap(0, 1);
    }
    let v0 = null_vector(m, values[0]);
    let v1 = null_vector(m, values[1]);
    let (v0, v1) = match (v0, v1) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::DefectiveMatrix {
                reason: "eigenvector could not be normalized",
            })
        }
    };
    let independence = (v0.get(0) * v1.get(1) - v0.get(1) * v1.get(0)).norm();
    if independence < EIGENBASIS_INDEPENDENCE_TOL {
        return Err(Error::DefectiveMatrix {
            reason: "eigenvectors are numerically parallel",
        });
    }
    let scale = m.norm_max().max(1.0);
    for (v, lambda) in [(v0, values[0]), (v1, values[1])] {
        let r = m.apply(&v).max_abs_diff(&v.scale(lambda));
        if r > EIGEN_RESIDUAL_TOL * scale {
            return Err(Error::DefectiveMatrix {
                reason: "eigenvector residual above tolerance",
            });
        }
    }
    Ok(Eigensystem {
        values,
        vectors: [v0, v1],
    })
}

/// Applies a real function to a Hermitian matrix through its spectrum:
/// `f(M) = ½(f(λ₊)+f(λ₋))·1 + ½(f(λ₊)−f(λ₋))·(σ·n)`, with `n` real and
/// `λ± = c0 ± |h|`. Returns the spectrum alongside the result.
pub fn hermitian_function(m: &ComplexMatrix2, f: impl Fn(f64) -> f64) -> Result<(ComplexMatrix2, [f64; 2])> {
    let scale = m.norm_max().max(1.0);
    if m.hermiticity_residual() > 1e-10 * scale {
        return Err(Error::InvalidParameter(format!(
            "matrix is not Hermitian (residual {:e})",
            m.hermiticity_residual()
        )));
    }
    let c0 = 0.5 * (m.get(0, 0).re + m.get(1, 1).re);
    let nz = 0.5 * (m.get(0, 0).re - m.get(1, 1).re);
    let off = 0.5 * (m.get(0, 1).conj() + m.get(1, 0));
    let (nx, ny) = (off.re, off.im);
    let h = (nx * nx + ny * ny + nz * nz).sqrt();
    let spectrum = [c0 + h, c0 - h];
    if h <= DEGENERACY_TOL * scale {
        return Ok((ComplexMatrix2::identity().scale(f(c0).into()), spectrum));
    }
    let (fp, fm) = (f(spectrum[0]), f(spectrum[1]));
    let n = [C64::new(nx / h, 0.0), C64::new(ny / h, 0.0), C64::new(nz / h, 0.0)];
    let out =
        ComplexMatrix2::identity().scale((0.5 * (fp + fm)).into()) + sigma_dot(&n).scale((0.5 * (fp - fm)).into());
    Ok((out, spectrum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, amp: f64) -> ComplexMatrix2 {
        let mut z = || c(rng.gen_range(-amp..amp), rng.gen_range(-amp..amp));
        ComplexMatrix2::from_rows(z(), z(), z(), z()).unwrap()
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(ComplexMatrix2::from_real(f64::NAN, 0.0, 0.0, 0.0).is_err());
        assert!(StateVector2::new(c(f64::INFINITY, 0.0), ZERO).is_err());
    }

    #[test]
    fn identity_is_degenerate() {
        let err = pauli_decompose(&ComplexMatrix2::identity()).unwrap_err();
        assert!(matches!(err, Error::DegenerateMatrix { .. }));
    }

    #[test]
    fn decompose_hermitian_sigma_x() {
        // r=1, s=u=0, θ=0 gives σx
        let d = pauli_decompose(&ComplexMatrix2::pauli_x()).unwrap();
        assert_abs_diff_eq!(d.c0.norm(), 0.0);
        assert_abs_diff_eq!(d.halfgap.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.n[0].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.n[1].norm() + d.n[2].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn decompose_pt_matrix_complex_direction() {
        // [[i, 2], [2, −i]]: ω = 2√3, n = (2/ω)(2, 0, i)
        let m = ComplexMatrix2::from_rows(I, c(2.0, 0.0), c(2.0, 0.0), -I).unwrap();
        let d = pauli_decompose(&m).unwrap();
        let omega = 2.0 * 3f64.sqrt();
        assert_abs_diff_eq!((d.halfgap - c(omega / 2.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
        let expect = [c(4.0 / omega, 0.0), ZERO, c(0.0, 2.0 / omega)];
        for (got, want) in d.n.iter().zip(expect) {
            assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-14);
        }
        assert!(d.reconstruct().max_abs_diff(&m) < 1e-12);
        assert_abs_diff_eq!((d.bilinear_norm() - ONE).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn exp_identity_special_cases() {
        let n = [ONE, ZERO, ZERO];
        let e0 = exp_i_phi_sigma_n(ZERO, &n).unwrap();
        assert!(e0.max_abs_diff(&ComplexMatrix2::identity()) < 1e-15);
        let e1 = exp_i_phi_sigma_n(c(FRAC_PI_2, 0.0), &n).unwrap();
        assert!(e1.max_abs_diff(&ComplexMatrix2::pauli_x().scale(I)) < 1e-15);
        let err = exp_i_phi_sigma_n(ONE, &[ONE, ONE, ZERO]).unwrap_err();
        assert!(matches!(err, Error::NonUnitDirection { .. }));
    }

    #[test]
    fn exp_identity_matches_series_for_complex_direction() {
        let omega = 2.0 * 3f64.sqrt();
        let n = [c(4.0 / omega, 0.0), ZERO, c(0.0, 2.0 / omega)];
        let phi = 0.3;
        let closed = exp_i_phi_sigma_n(c(phi, 0.0), &n).unwrap();
        let series = matrix_exp_oracle(&sigma_dot(&n).scale(c(0.0, phi)));
        assert!(closed.max_abs_diff(&series) < 1e-12);
    }

    #[test]
    fn oracle_trivial_cases() {
        assert!(matrix_exp_oracle(&ComplexMatrix2::zero()).max_abs_diff(&ComplexMatrix2::identity()) < 1e-16);
        let (a, b) = (c(0.3, -1.2), c(-2.0, 0.5));
        let e = matrix_exp_oracle(&ComplexMatrix2::diag(a, b).unwrap());
        assert!(e.max_abs_diff(&ComplexMatrix2::diag(a.exp(), b.exp()).unwrap()) < 1e-14);
    }

    #[test]
    fn oracle_matches_pt_propagator_closed_form() {
        // H = [[r e^{iθ}, s], [s, r e^{−iθ}]], s=1, r=0.5, θ=0.2, t=ħ=1
        let (r, s, th) = (0.5, 1.0, 0.2);
        let h =
            ComplexMatrix2::from_rows(C64::from_polar(r, th), c(s, 0.0), c(s, 0.0), C64::from_polar(r, -th)).unwrap();
        let oracle = propagator_oracle(&h, 1.0, 1.0);
        let d = pauli_decompose(&h).unwrap();
        let closed = exp_i_phi_sigma_n(-d.halfgap, &d.n)
            .unwrap()
            .scale(c(0.0, -r * th.cos()).exp());
        assert!(closed.max_abs_diff(&oracle) < 1e-11);
    }

    #[test]
    fn oracle_satisfies_defining_ode() {
        // d/dt exp(tM) at t=1 equals M·exp(M); sixth-order central stencil.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &amp in &[0.5, 5.0, 30.0] {
            for _ in 0..20 {
                let m = random_matrix(&mut rng, amp);
                // keep the growth rate bounded so that ‖M‖ up to ~100 is exercised
                let m = m - ComplexMatrix2::identity().scale(c(amp, 0.0));
                let h = 0.03 / m.norm_inf();
                let e = |k: f64| matrix_exp_oracle(&m.scale(c(1.0 + k * h, 0.0)));
                let weights = [
                    (-3.0, -1.0),
                    (-2.0, 9.0),
                    (-1.0, -45.0),
                    (1.0, 45.0),
                    (2.0, -9.0),
                    (3.0, 1.0),
                ];
                let deriv = weights
                    .iter()
                    .fold(ComplexMatrix2::zero(), |acc, &(k, w)| acc + e(k).scale(c(w, 0.0)))
                    .scale(c(1.0 / (60.0 * h), 0.0));
                let exact = m * e(0.0);
                let rel = deriv.max_abs_diff(&exact) / exact.norm_max();
                assert!(rel < 1e-10, "amp {amp}: relative ODE residual {rel:e}");
            }
        }
    }

    #[test]
    fn oracle_agrees_with_closed_form_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let m = random_matrix(&mut rng, 5.0);
            let a = matrix_exp_oracle(&m);
            let b = closed_form_exp(&m).unwrap();
            let rel = a.max_abs_diff(&b) / a.norm_max().max(1.0);
            assert!(rel < 1e-10, "{m:?}: {rel:e}");
        }
    }

    #[test]
    fn exp_inverse_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let m = random_matrix(&mut rng, 2.0);
            let Ok(d) = pauli_decompose(&m) else { continue };
            // keep the direction in a regime where cos/sin of complex φ stay O(1)
            if d.n.iter().any(|z| z.im.abs() > 1.0) {
                continue;
            }
            let phi: f64 = rng.gen_range(-10.0..10.0);
            let p = exp_i_phi_sigma_n(c(phi, 0.0), &d.n).unwrap();
            let q = exp_i_phi_sigma_n(c(-phi, 0.0), &d.n).unwrap();
            assert!((p * q).max_abs_diff(&ComplexMatrix2::identity()) < 1e-11);
        }
    }

    #[test]
    fn eigensystem_sigma_z() {
        let es = eigensystem(&ComplexMatrix2::pauli_z()).unwrap();
        assert_abs_diff_eq!((es.values[0] - ONE).norm(), 0.0);
        assert_abs_diff_eq!((es.values[1] + ONE).norm(), 0.0);
        assert!(es.vectors[0].fidelity(&StateVector2::up()) > 1.0 - 1e-15);
        assert!(es.vectors[1].fidelity(&StateVector2::down()) > 1.0 - 1e-15);
    }

    #[test]
    fn eigensystem_pt_family_values() {
        let (r, s, th) = (0.5, 1.0, PI / 6.0);
        let h =
            ComplexMatrix2::from_rows(C64::from_polar(r, th), c(s, 0.0), c(s, 0.0), C64::from_polar(r, -th)).unwrap();
        let es = eigensystem(&h).unwrap();
        let root = (s * s - r * r * th.sin().powi(2)).sqrt();
        assert_abs_diff_eq!(es.values[0].re, r * th.cos() + root, epsilon = 1e-14);
        assert_abs_diff_eq!(es.values[1].re, r * th.cos() - root, epsilon = 1e-14);
        assert!(es.values[0].im.abs() < 1e-14 && es.values[1].im.abs() < 1e-14);
    }

    #[test]
    fn eigensystem_exceptional_point_is_defective() {
        // s = r sinθ with θ = π/2, r = s = 1: H = [[i, 1], [1, −i]], H² = 0.
        let h = ComplexMatrix2::from_rows(
            C64::from_polar(1.0, FRAC_PI_2),
            ONE,
            ONE,
            C64::from_polar(1.0, -FRAC_PI_2),
        )
        .unwrap();
        assert!((h * h).norm_max() < 1e-15);
        let err = eigensystem(&h).unwrap_err();
        assert!(matches!(err, Error::DefectiveMatrix { .. }));
    }

    #[test]
    fn eigensystem_scalar_matrix() {
        let m = ComplexMatrix2::identity().scale(c(2.0, 1.0));
        let es = eigensystem(&m).unwrap();
        assert_eq!(es.values, [c(2.0, 1.0), c(2.0, 1.0)]);
    }

    #[test]
    fn hermitian_function_log_exp_roundtrip() {
        let m = ComplexMatrix2::from_rows(c(2.0, 0.0), c(0.5, -0.3), c(0.5, 0.3), c(1.0, 0.0)).unwrap();
        let (log_m, spec) = hermitian_function(&m, f64::ln).unwrap();
        assert!(spec.iter().all(|&l| l > 0.0));
        assert!(matrix_exp_oracle(&log_m).max_abs_diff(&m) < 1e-13);
        assert!(hermitian_function(&(m * I), f64::ln).is_err());
    }
}
