//! Truncated Fock-space operators.
//!
//! The working basis is the orthonormal number basis `e_n`. The ladder basis
//! `psi_n = (a^dagger)^n psi_0`, with squared norm `n!`, is available as a
//! [`BasisConvention`] on [`FockState`]; conversion multiplies coefficient
//! `n` by `sqrt(n!)`.
//!
//! Truncating to `dim` modes breaks the commutation relations only at the top
//! mode: `[a, a^dagger] = diag(1, ..., 1, -(dim - 1))`. Identity checks go
//! through [`truncation_safe_projection`] to drop a guard band of top modes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CcrError, Result};
use crate::matrix::{vec_norm, ComplexMatrix, I, ZERO};

/// Largest `n` whose factorial fits in a `u64`.
pub const EXACT_FACTORIAL_MAX: u64 = 20;

pub fn factorial_exact(n: u64) -> Option<u64> {
    (n <= EXACT_FACTORIAL_MAX).then(|| (1..=n).product())
}

pub fn ln_factorial(n: u64) -> f64 {
    match factorial_exact(n) {
        Some(f) => (f as f64).ln(),
        None => (2..=n).map(|k| (k as f64).ln()).sum(),
    }
}

/// `sqrt(n!)`, exact integer factorial up to 20 and log-space beyond.
pub fn sqrt_factorial(n: u64) -> f64 {
    match factorial_exact(n) {
        Some(f) => (f as f64).sqrt(),
        None => (0.5 * ln_factorial(n)).exp(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisConvention {
    /// Orthonormal `e_n`.
    Normalized,
    /// `psi_n = (a^dagger)^n psi_0`, `(psi_n, psi_n) = n!`.
    Unnormalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockState {
    coeffs: Vec<Complex64>,
    convention: BasisConvention,
}

impl FockState {
    pub fn new(coeffs: Vec<Complex64>, convention: BasisConvention) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(CcrError::InvalidInput("fock state needs at least one mode".into()));
        }
        if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CcrError::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self { coeffs, convention })
    }

    pub fn normalized(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(coeffs, BasisConvention::Normalized)
    }

    /// Basis vector `n` padded to `len` modes.
    pub fn basis(n: usize, len: usize, convention: BasisConvention) -> Result<Self> {
        if n >= len {
            return Err(CcrError::SupportViolation {
                top: n,
                required: n + 1,
                dim: len,
            });
        }
        let mut coeffs = vec![ZERO; len];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Self::new(coeffs, convention)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn convention(&self) -> BasisConvention {
        self.convention
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest mode with a nonzero coefficient.
    pub fn top_mode(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|z| *z != ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.top_mode().is_none()
    }

    pub fn to_convention(&self, target: BasisConvention) -> Self {
        use BasisConvention::*;
        let coeffs = match (self.convention, target) {
            (Normalized, Normalized) | (Unnormalized, Unnormalized) => self.coeffs.clone(),
            (Unnormalized, Normalized) => self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * sqrt_factorial(n as u64))
                .collect(),
            (Normalized, Unnormalized) => self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c / sqrt_factorial(n as u64))
                .collect(),
        };
        Self {
            coeffs,
            convention: target,
        }
    }

    /// Coefficients in the orthonormal basis, padded or cut to `dim`.
    /// Fails if nonzero support lies at or beyond `dim`.
    pub fn to_vector(&self, dim: usize) -> Result<Vec<Complex64>> {
        let normalized = self.to_convention(BasisConvention::Normalized);
        if let Some(top) = self.top_mode() {
            if top >= dim {
                return Err(CcrError::SupportViolation {
                    top,
                    required: top + 1,
                    dim,
                });
            }
        }
        let mut v = normalized.coeffs;
        v.resize(dim, ZERO);
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        inner_product(self, self).re.sqrt()
    }
}

/// Hermitian inner product, antilinear in the first argument. Mixed
/// conventions are converted to the orthonormal basis first.
pub fn inner_product(x: &FockState, y: &FockState) -> Complex64 {
    let (xs, ys) = if x.convention == y.convention && x.convention == BasisConvention::Normalized {
        (x.coeffs.clone(), y.coeffs.clone())
    } else {
        (
            x.to_convention(BasisConvention::Normalized).coeffs,
            y.to_convention(BasisConvention::Normalized).coeffs,
        )
    };
    xs.iter().zip(ys.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// `a e_n = sqrt(n) e_{n-1}`.
pub fn build_annihilator(dim: usize) -> Result<ComplexMatrix> {
    ComplexMatrix::from_fn(dim, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

pub fn build_creator(dim: usize) -> Result<ComplexMatrix> {
    Ok(build_annihilator(dim)?.adjoint())
}

/// `q = (a + a^dagger) / sqrt(2)`.
pub fn build_position(dim: usize) -> Result<ComplexMatrix> {
    let a = build_annihilator(dim)?;
    Ok((&a + &a.adjoint()).scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)))
}

/// `p = (a - a^dagger) / (i sqrt(2))`.
pub fn build_momentum(dim: usize) -> Result<ComplexMatrix> {
    let a = build_annihilator(dim)?;
    Ok((&a - &a.adjoint()).scale(-I * std::f64::consts::FRAC_1_SQRT_2))
}

pub fn build_number(dim: usize) -> Result<ComplexMatrix> {
    let a = build_annihilator(dim)?;
    Ok(&a.adjoint() * &a)
}

/// `q^2 + p^2` from the truncated matrices (equals `a a^dagger + a^dagger a`).
pub fn build_oscillator(dim: usize) -> Result<ComplexMatrix> {
    let q = build_position(dim)?;
    let p = build_momentum(dim)?;
    Ok(&(&q * &q) + &(&p * &p))
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim() != b.dim() {
        return Err(CcrError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(&(a * b) - &(b * a))
}

/// Leading `(dim - guard)` block, where truncated identities hold exactly.
pub fn truncation_safe_projection(m: &ComplexMatrix, guard: usize) -> Result<ComplexMatrix> {
    if guard >= m.dim() {
        return Err(CcrError::GuardTooLarge { guard, dim: m.dim() });
    }
    m.leading_block(m.dim() - guard)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: FockState,
}

/// Eigenpairs of `a^dagger a`, ascending.
pub fn number_eigenpairs(dim: usize) -> Result<Vec<Eigenpair>> {
    let (values, vectors) = build_number(dim)?.hermitian_eigen()?;
    values
        .into_iter()
        .zip(vectors)
        .map(|(value, v)| {
            Ok(Eigenpair {
                value,
                vector: FockState::normalized(v)?,
            })
        })
        .collect()
}

pub fn number_spectrum(dim: usize) -> Result<Vec<f64>> {
    build_number(dim)?.eigvalsh()
}

pub fn oscillator_spectrum(dim: usize) -> Result<Vec<f64>> {
    if dim < 2 {
        return Err(CcrError::InvalidDimension {
            dim,
            reason: "oscillator spectrum needs at least 2 modes",
        });
    }
    build_oscillator(dim)?.eigvalsh()
}

/// `||A v - lambda v||` for an eigenpair candidate.
pub fn eigen_residual(m: &ComplexMatrix, pair: &Eigenpair) -> Result<f64> {
    let v = pair.vector.to_vector(m.dim())?;
    let mv = m.apply(&v);
    let r: Vec<Complex64> = mv.iter().zip(&v).map(|(a, b)| a - b * pair.value).collect();
    Ok(vec_norm(&r))
}
