use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix2, Matrix3};
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2×2 complex matrix: a density operator, observable or gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitOperator(pub Matrix2<Complex64>);

impl QubitOperator {
    pub fn new(m00: Complex64, m01: Complex64, m10: Complex64, m11: Complex64) -> Self {
        Self(Matrix2::new(m00, m01, m10, m11))
    }

    pub fn zero() -> Self {
        Self(Matrix2::zeros())
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn sigma_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma_y() -> Self {
        Self::new(ZERO, -I, I, ZERO)
    }

    pub fn sigma_z() -> Self {
        Self::new(ONE, ZERO, ZERO, -ONE)
    }

    pub fn paulis() -> [Self; 3] {
        [Self::sigma_x(), Self::sigma_y(), Self::sigma_z()]
    }

    /// `|0⟩⟨0|`, the north pole of the Bloch sphere.
    pub fn ground() -> Self {
        Self::new(ONE, ZERO, ZERO, ZERO)
    }

    /// `|1⟩⟨1|`.
    pub fn excited() -> Self {
        Self::new(ZERO, ZERO, ZERO, ONE)
    }

    pub fn maximally_mixed() -> Self {
        Self::identity() * 0.5
    }

    /// `(trace·I + r·σ) / 2`.
    pub fn from_bloch(trace: f64, r: [f64; 3]) -> Self {
        let [x, y, z] = r;
        Self::new(
            Complex64::new((trace + z) / 2.0, 0.0),
            Complex64::new(x / 2.0, -y / 2.0),
            Complex64::new(x / 2.0, y / 2.0),
            Complex64::new((trace - z) / 2.0, 0.0),
        )
    }

    /// Pure state on the Bloch sphere along the unit vector `n`.
    pub fn pure_along(n: [f64; 3]) -> Self {
        Self::from_bloch(1.0, n)
    }

    /// `(tr ρ, [tr σ_x ρ, tr σ_y ρ, tr σ_z ρ])`, real parts; exact for
    /// Hermitian operators.
    pub fn bloch(&self) -> (f64, [f64; 3]) {
        let m = &self.0;
        let p = (m[(0, 0)] + m[(1, 1)]).re;
        let z = (m[(0, 0)] - m[(1, 1)]).re;
        let x = (m[(1, 0)] + m[(0, 1)]).re;
        let y = (m[(1, 0)] - m[(0, 1)]).im;
        (p, [x, y, z])
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (*self - self.dagger()).max_abs() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (*self * self.dagger() - Self::identity()).max_abs() <= tol
    }

    /// Eigenvalues of a Hermitian operator, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let (p, [x, y, z]) = self.bloch();
        let r = (x * x + y * y + z * z).sqrt();
        [(p - r) / 2.0, (p + r) / 2.0]
    }

    /// `½ Σ|eigenvalues(self − other)|` for Hermitian operators.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let [lo, hi] = (*self - *other).hermitian_eigenvalues();
        0.5 * (lo.abs() + hi.abs())
    }

    /// `U ρ U†`.
    pub fn conjugated_by(&self, u: &Self) -> Self {
        *u * *self * u.dagger()
    }

    /// `tr(A† B)`.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        (self.dagger() * *other).trace()
    }

    /// Adjoint-action rotation of a unitary: `R_lk = ½ tr(σ_l U σ_k U†)`.
    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        let paulis = Self::paulis();
        Matrix3::from_fn(|l, k| {
            0.5 * paulis[l]
                .overlap(&paulis[k].conjugated_by(self))
                .re
        })
    }

    /// `exp(−i (ω·σ) t / 2)`.
    pub fn precession(omega: [f64; 3], t: f64) -> Self {
        let norm = (omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2]).sqrt();
        if norm == 0.0 {
            return Self::identity();
        }
        let theta = norm * t / 2.0;
        let (s, c) = theta.sin_cos();
        let [nx, ny, nz] = omega.map(|w| w / norm);
        Self::new(
            Complex64::new(c, -s * nz),
            Complex64::new(-s * ny, -s * nx),
            Complex64::new(s * ny, -s * nx),
            Complex64::new(c, s * nz),
        )
    }

    pub(crate) fn require_hermitian(&self, what: &str) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::InvalidOperator(format!("{what} has non-finite entries")));
        }
        if !self.is_hermitian(1e-10 * self.max_abs().max(1.0)) {
            return Err(Error::InvalidOperator(format!("{what} is not Hermitian")));
        }
        Ok(())
    }

    pub(crate) fn require_unitary(&self, what: &str) -> Result<()> {
        if !self.is_finite() || !self.is_unitary(1e-10) {
            return Err(Error::InvalidOperator(format!("{what} is not unitary")));
        }
        Ok(())
    }
}

impl Add for QubitOperator {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for QubitOperator {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Neg for QubitOperator {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Mul for QubitOperator {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl Mul<f64> for QubitOperator {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0.map(|c| c * rhs))
    }
}

impl Mul<Complex64> for QubitOperator {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        Self(self.0 * rhs)
    }
}

impl std::iter::Sum for QubitOperator {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let [x, y, z] = QubitOperator::paulis();
        assert_eq!(x * y, z * I);
        assert_eq!(x * x, QubitOperator::identity());
        assert_eq!(y.conjugated_by(&x), -y);
        assert!(x.is_unitary(0.0) && y.is_hermitian(0.0));
    }

    #[test]
    fn bloch_round_trip() {
        let rho = QubitOperator::from_bloch(0.7, [0.1, -0.3, 0.25]);
        let (p, r) = rho.bloch();
        assert!((p - 0.7).abs() < 1e-15);
        assert!((r[0] - 0.1).abs() < 1e-15 && (r[1] + 0.3).abs() < 1e-15);
        assert!((r[2] - 0.25).abs() < 1e-15);
        assert_eq!(QubitOperator::from_bloch(0.0, [2.0, 0.0, 0.0]), QubitOperator::sigma_x());
        assert_eq!(QubitOperator::from_bloch(0.0, [0.0, 2.0, 0.0]), QubitOperator::sigma_y());
    }

    #[test]
    fn precession_matches_rotation() {
        // exp(−iπσ_x/2) = −iσ_x
        let u = QubitOperator::precession([1.0, 0.0, 0.0], std::f64::consts::PI);
        assert!((u - QubitOperator::sigma_x() * (-I)).max_abs() < 1e-15);
        let r = u.rotation_matrix();
        assert!((r - Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, -1.0, -1.0))).amax() < 1e-15);
        // Bloch vector precesses as dr/dt = ω × r.
        let omega = [0.3, 0.0, -0.8];
        let t = 0.01;
        let rho = QubitOperator::pure_along([0.0, 1.0, 0.0]);
        let (_, r1) = rho.conjugated_by(&QubitOperator::precession(omega, t)).bloch();
        // ω × ŷ
        let cross = [-omega[2], 0.0, omega[0]];
        for c in 0..3 {
            let want = [0.0, 1.0, 0.0][c] + t * cross[c];
            assert!((r1[c] - want).abs() < 1e-4);
        }
    }

    #[test]
    fn distances_and_spectra() {
        let a = QubitOperator::ground();
        let b = QubitOperator::excited();
        assert!((a.trace_distance(&b) - 1.0).abs() < 1e-15);
        assert!((a.trace_distance(&QubitOperator::maximally_mixed()) - 0.5).abs() < 1e-15);
        assert_eq!(QubitOperator::maximally_mixed().hermitian_eigenvalues(), [0.5, 0.5]);
    }
}
