//! Complex 3-vectors and 3×3 tensors.
//!
//! Field–dipole contractions are bilinear: `a.dot(&b)` is `Σ aᵢ bᵢ` with no
//! implicit conjugation. Callers conjugate explicitly, so `E*·d` reads as
//! `e.conj().dot(&d)`.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A complex vector in real space. Houses waveguide fields and transition
/// dipoles alike.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PolarizationVector(pub [Complex64; 3]);

impl PolarizationVector {
    pub const fn new(x: Complex64, y: Complex64, z: Complex64) -> Self {
        Self([x, y, z])
    }

    pub const fn zero() -> Self {
        Self([ZERO; 3])
    }

    pub const fn real(x: f64, y: f64, z: f64) -> Self {
        Self([
            Complex64::new(x, 0.0),
            Complex64::new(y, 0.0),
            Complex64::new(z, 0.0),
        ])
    }

    /// Embeds an in-plane vector with zero third component.
    pub const fn planar(x: Complex64, y: Complex64) -> Self {
        Self([x, y, ZERO])
    }

    /// The elliptical field `(cos θ, i sin θ, 0)`.
    pub fn elliptical(theta: f64) -> Self {
        Self::planar(
            Complex64::new(theta.cos(), 0.0),
            Complex64::new(0.0, theta.sin()),
        )
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|c| c.conj()))
    }

    /// Bilinear contraction `Σ aᵢ bᵢ`.
    pub fn dot(&self, other: &Self) -> Complex64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(ZERO, |acc, (a, b)| acc + a * b)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == ZERO)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            *self
        } else {
            *self * Complex64::new(1.0 / n, 0.0)
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for PolarizationVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for PolarizationVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl AddAssign for PolarizationVector {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for PolarizationVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for PolarizationVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|c| -c))
    }
}

impl Mul<Complex64> for PolarizationVector {
    type Output = Self;
    fn mul(self, rhs: Complex64) -> Self {
        Self(self.0.map(|c| c * rhs))
    }
}

impl Mul<PolarizationVector> for Complex64 {
    type Output = PolarizationVector;
    fn mul(self, rhs: PolarizationVector) -> PolarizationVector {
        rhs * self
    }
}

/// Complex 3×3 tensor, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tensor3(pub [[Complex64; 3]; 3]);

impl Tensor3 {
    pub const fn zero() -> Self {
        Self([[ZERO; 3]; 3])
    }

    pub fn scaled_identity(s: Complex64) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            t.0[i][i] = s;
        }
        t
    }

    /// Outer product `uᵢ vⱼ` (no conjugation).
    pub fn outer(u: &PolarizationVector, v: &PolarizationVector) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| u.0[i] * v.0[j])))
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|row| row.map(|c| c.conj())))
    }

    pub fn adjoint(&self) -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[j][i].conj())
        }))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.map(|row| row.map(|c| c * s)))
    }

    /// `Σᵢⱼ lᵢ Tᵢⱼ rⱼ`, both vectors taken as given.
    pub fn sandwich(&self, left: &PolarizationVector, right: &PolarizationVector) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..3 {
            for j in 0..3 {
                acc += left.0[i] * self.0[i][j] * right.0[j];
            }
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for Tensor3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[i][j] + rhs.0[i][j])
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dot_is_bilinear_without_conjugation() {
        let a = PolarizationVector::planar(c(0.0, 1.0), c(0.0, 0.0));
        assert_eq!(a.dot(&a), c(-1.0, 0.0));
        assert_eq!(a.conj().dot(&a), c(1.0, 0.0));
    }

    #[test]
    fn norm_of_complex_vector() {
        let v = PolarizationVector::planar(c(2.0, 0.0), c(0.0, 1.0));
        assert!((v.norm() - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(PolarizationVector::zero().norm(), 0.0);
    }

    #[test]
    fn non_finite_detected() {
        let v = PolarizationVector::real(f64::NAN, 0.0, 0.0);
        assert!(!v.is_finite());
        assert!(PolarizationVector::real(1.0, 2.0, 3.0).is_finite());
    }

    #[test]
    fn outer_sandwich_factorizes() {
        let u = PolarizationVector::planar(c(1.0, 2.0), c(-0.5, 0.3));
        let v = PolarizationVector::planar(c(0.2, -1.0), c(0.7, 0.1));
        let l = PolarizationVector::real(0.3, -0.4, 2.0);
        let r = PolarizationVector::new(c(0.0, 1.0), c(1.0, 1.0), c(-1.0, 0.0));
        let t = Tensor3::outer(&u, &v);
        let lhs = t.sandwich(&l, &r);
        let rhs = l.dot(&u) * v.dot(&r);
        assert!((lhs - rhs).norm() < 1e-14);
    }
}
