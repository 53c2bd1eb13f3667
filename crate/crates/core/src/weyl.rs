//! Matrix exponentials and the Weyl form of the commutation relations.
//!
//! With `U_t = exp(i t p)` and `V_s = exp(i s q)` the relation under test is
//! `U_t V_s = e^{i s t} V_s U_t`. All residuals are measured on a test vector
//! kept below a guard band of top modes, since truncation corrupts the top
//! of the spectrum by construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CcrError, Result};
use crate::fock::{build_momentum, build_position, FockState};
use crate::matrix::{vec_norm, vec_sub, ComplexMatrix, I};

/// Default tolerance for exponential-based checks.
pub const EXP_TOL: f64 = 1e-8;

/// Scaled operand norm targeted before the Taylor approximant.
const SCALED_NORM: f64 = 0.5;
const TAYLOR_MAX_TERMS: usize = 40;

/// Scaling and squaring with a truncated Taylor approximant.
///
/// The operand is halved until its 1-norm is at most 0.5; the Taylor series
/// is summed until the next term falls below one ulp of the running sum.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_finite() {
        return Err(CcrError::InvalidInput("expm of non-finite matrix".into()));
    }
    let n = a.dim();
    let norm = a.norm_one();
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let b = a.scale(Complex64::new(2f64.powi(-squarings), 0.0));

    let mut sum = ComplexMatrix::identity(n)?;
    let mut term = ComplexMatrix::identity(n)?;
    for k in 1..=TAYLOR_MAX_TERMS {
        term = (&term * &b).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = &sum + &term;
        if term.norm_one() <= f64::EPSILON * 1e-3 * sum.norm_one() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if !sum.is_finite() {
        return Err(CcrError::NumericOverflow { k: squarings as usize });
    }
    Ok(sum)
}

/// `exp(A) v` without forming `exp(A)`: the operand is split into `s` steps
/// with `||A|| / s <= 1` and each step is a Taylor series on the vector.
pub fn expm_action(a: &ComplexMatrix, v: &[Complex64]) -> Result<Vec<Complex64>> {
    if !a.is_finite() {
        return Err(CcrError::InvalidInput("expm of non-finite matrix".into()));
    }
    let steps = a.norm_one().ceil().max(1.0) as usize;
    let b = a.scale(Complex64::new(1.0 / steps as f64, 0.0));
    let mut out = v.to_vec();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for k in 1..=TAYLOR_MAX_TERMS * 2 {
            term = b.apply(&term).into_iter().map(|z| z / k as f64).collect();
            acc.iter_mut().zip(&term).for_each(|(s, t)| *s += t);
            if vec_norm(&term) <= f64::EPSILON * 1e-3 * vec_norm(&acc) {
                break;
            }
        }
        out = acc;
    }
    Ok(out)
}

/// Largest entry of `|U U^dagger - I|`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let prod = u * &u.adjoint();
    (&prod - &ComplexMatrix::identity(u.dim()).expect("dim >= 1")).max_abs()
}

/// `U_t = exp(i t p)`.
pub fn translation(t: f64, dim: usize) -> Result<ComplexMatrix> {
    expm(&build_momentum(dim)?.scale(I * t))
}

/// `V_s = exp(i s q)`.
pub fn boost(s: f64, dim: usize) -> Result<ComplexMatrix> {
    expm(&build_position(dim)?.scale(I * s))
}

pub fn default_guard(dim: usize) -> usize {
    dim / 4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylResidualRecord {
    pub t: f64,
    pub s: f64,
    pub dim: usize,
    pub guard: usize,
    pub residual: f64,
    pub test_vector_support: usize,
}

impl WeylResidualRecord {
    pub const CSV_HEADER: &'static str = "t,s,dim,guard,support,residual";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:e}",
            self.t, self.s, self.dim, self.guard, self.test_vector_support, self.residual
        )
    }
}

/// Test vector in the orthonormal basis, checked to sit below the guard band.
fn guarded_vector(xi: &FockState, dim: usize, guard: usize) -> Result<(Vec<Complex64>, usize, f64)> {
    if guard >= dim {
        return Err(CcrError::GuardTooLarge { guard, dim });
    }
    let top = xi
        .top_mode()
        .ok_or_else(|| CcrError::InvalidInput("zero test vector".into()))?;
    if top + guard >= dim {
        return Err(CcrError::SupportViolation {
            top,
            required: top + guard + 1,
            dim,
        });
    }
    let v = xi.to_vector(dim)?;
    let norm = vec_norm(&v);
    Ok((v, top, norm))
}

/// Which scalar phase multiplies `V_s U_t` in the relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// `e^{+i s t}`, the correct phase for `[p, q] = -i`.
    Positive,
    /// `e^{-i s t}`.
    Negative,
}

pub fn weyl_residual_with_phase(
    t: f64,
    s: f64,
    dim: usize,
    guard: usize,
    xi: &FockState,
    phase: PhaseConvention,
) -> Result<WeylResidualRecord> {
    let (v, top, norm) = guarded_vector(xi, dim, guard)?;
    let u = translation(t, dim)?;
    let vs = boost(s, dim)?;
    let uv = u.apply(&vs.apply(&v));
    let vu = vs.apply(&u.apply(&v));
    let sign = match phase {
        PhaseConvention::Positive => 1.0,
        PhaseConvention::Negative => -1.0,
    };
    let phase = (I * (sign * s * t)).exp();
    let diff: Vec<Complex64> = uv.iter().zip(&vu).map(|(a, b)| a - phase * b).collect();
    Ok(WeylResidualRecord {
        t,
        s,
        dim,
        guard,
        residual: vec_norm(&diff) / norm,
        test_vector_support: top,
    })
}

/// `||(U_t V_s - e^{i s t} V_s U_t) xi|| / ||xi||`.
pub fn weyl_residual(t: f64, s: f64, dim: usize, guard: usize, xi: &FockState) -> Result<WeylResidualRecord> {
    weyl_residual_with_phase(t, s, dim, guard, xi, PhaseConvention::Positive)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseTest {
    pub positive: f64,
    pub negative: f64,
}

impl PhaseTest {
    /// The convention whose residual vanishes, if exactly one does.
    pub fn vanishing(&self, tol: f64) -> Option<PhaseConvention> {
        match (self.positive < tol, self.negative < tol) {
            (true, false) => Some(PhaseConvention::Positive),
            (false, true) => Some(PhaseConvention::Negative),
            _ => None,
        }
    }
}

pub fn phase_convention_test(t: f64, s: f64, dim: usize, guard: usize, xi: &FockState) -> Result<PhaseTest> {
    Ok(PhaseTest {
        positive: weyl_residual_with_phase(t, s, dim, guard, xi, PhaseConvention::Positive)?.residual,
        negative: weyl_residual_with_phase(t, s, dim, guard, xi, PhaseConvention::Negative)?.residual,
    })
}

fn apply_power(m: &ComplexMatrix, v: &[Complex64], n: u32) -> Vec<Complex64> {
    (0..n).fold(v.to_vec(), |acc, _| m.apply(&acc))
}

/// `||(V_{-t} p^n V_t - (p + t I)^n) xi|| / ||xi||`, `V_t = exp(i t q)`.
/// The test vector must sit below `n` plus the default guard band.
pub fn shift_identity_residual(t: f64, n: u32, dim: usize, xi: &FockState) -> Result<f64> {
    if n == 0 {
        return Err(CcrError::InvalidInput("power n must be positive".into()));
    }
    let (v, _, norm) = guarded_vector(xi, dim, default_guard(dim) + n as usize)?;
    let p = build_momentum(dim)?;
    let forward = boost(t, dim)?;
    let backward = boost(-t, dim)?;
    let lhs = backward.apply(&apply_power(&p, &forward.apply(&v), n));
    let shifted = &p + &ComplexMatrix::identity(dim)?.scale(Complex64::new(t, 0.0));
    let rhs = apply_power(&shifted, &v, n);
    Ok(vec_norm(&vec_sub(&lhs, &rhs)) / norm)
}

/// `||(p V_t - V_t p - t V_t) xi|| / ||xi||`: the commutator of `p` with the
/// exponential of `q`, summed term by term from `[p, q^n] = -i n q^{n-1}`.
pub fn exp_commutator_residual(t: f64, dim: usize, xi: &FockState) -> Result<f64> {
    let (v, _, norm) = guarded_vector(xi, dim, default_guard(dim))?;
    let p = build_momentum(dim)?;
    let vt = boost(t, dim)?;
    let vtv = vt.apply(&v);
    let pv = p.apply(&vtv);
    let vp = vt.apply(&p.apply(&v));
    let diff: Vec<Complex64> = pv
        .iter()
        .zip(&vp)
        .zip(&vtv)
        .map(|((a, b), c)| a - b - c * t)
        .collect();
    Ok(vec_norm(&diff) / norm)
}

/// One residual record per dimension, each with the default guard band.
pub fn convergence_sweep(t: f64, s: f64, dims: &[usize], xi: &FockState) -> Result<Vec<WeylResidualRecord>> {
    if dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CcrError::InvalidInput("dimensions must be strictly ascending".into()));
    }
    dims.iter()
        .map(|&dim| weyl_residual(t, s, dim, default_guard(dim), xi))
        .collect()
}

/// `U_{t1} U_{t2} - U_{t1 + t2}` applied to `xi`, relative.
pub fn group_law_residual(t1: f64, t2: f64, dim: usize, xi: &FockState) -> Result<f64> {
    let (v, _, norm) = guarded_vector(xi, dim, default_guard(dim))?;
    let lhs = translation(t1, dim)?.apply(&translation(t2, dim)?.apply(&v));
    let rhs = translation(t1 + t2, dim)?.apply(&v);
    Ok(vec_norm(&vec_sub(&lhs, &rhs)) / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_number, BasisConvention};

    fn e(n: usize, dim: usize) -> FockState {
        FockState::basis(n, dim, BasisConvention::Normalized).unwrap()
    }

    #[test]
    fn expm_of_zero_and_diagonal() {
        let z = ComplexMatrix::zeros(5).unwrap();
        assert_eq!(expm(&z).unwrap(), ComplexMatrix::identity(5).unwrap());
        let thetas = [0.3, -1.2, 2.5, 7.0];
        let d = ComplexMatrix::from_diagonal(&thetas.map(|th| I * th)).unwrap();
        let ed = expm(&d).unwrap();
        for (k, th) in thetas.iter().enumerate() {
            assert!((ed.get(k, k) - (I * *th).exp()).norm() < 1e-13);
        }
        assert!(ed.bandwidth() == 0);
    }

    #[test]
    fn expm_rejects_non_finite() {
        // ComplexMatrix never holds NaN, so build through scale overflow
        let big = ComplexMatrix::identity(2).unwrap().scale(Complex64::new(1e308, 0.0));
        let inf = big.scale(Complex64::new(10.0, 0.0));
        assert!(expm(&inf).is_err());
    }

    #[test]
    fn translation_unitary_and_inverse() {
        let dim = 64;
        let p = build_momentum(dim).unwrap();
        let u = expm(&p.scale(I * 0.7)).unwrap();
        let u_inv = expm(&p.scale(-I * 0.7)).unwrap();
        let prod = &u * &u_inv;
        assert!((&prod - &ComplexMatrix::identity(dim).unwrap()).max_abs() < 1e-11);
        assert!(unitarity_defect(&u) < 1e-11);
        assert!(unitarity_defect(&boost(1.3, dim).unwrap()) < 1e-11);
    }

    #[test]
    fn expm_matches_vector_route() {
        let dim = 48;
        let a = build_position(dim).unwrap().scale(I * 1.7);
        let v = e(3, dim).to_vector(dim).unwrap();
        let dense = expm(&a).unwrap().apply(&v);
        let action = expm_action(&a, &v).unwrap();
        assert!(vec_norm(&vec_sub(&dense, &action)) < 1e-12);
        // real diagonal growth
        let n = build_number(6).unwrap().scale(Complex64::new(0.5, 0.0));
        let en = expm(&n).unwrap();
        assert!((en.get(5, 5).re - 2.5f64.exp()).abs() < 1e-12 * 2.5f64.exp());
    }

    #[test]
    fn weyl_zero_parameters() {
        let r = weyl_residual(0.0, 0.8, 32, 8, &e(0, 32)).unwrap();
        assert!(r.residual < 1e-12);
        let r = weyl_residual(0.8, 0.0, 32, 8, &e(1, 32)).unwrap();
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn weyl_half_half_and_dimension_decrease() {
        let r64 = weyl_residual(0.5, 0.5, 64, 16, &e(0, 64)).unwrap();
        assert!(r64.residual < 1e-8);
        let r16 = weyl_residual(0.5, 0.5, 16, 4, &e(0, 16)).unwrap();
        assert!(r64.residual < r16.residual);
        assert_eq!(r64.test_vector_support, 0);
    }

    #[test]
    fn phase_sign_detects_printed_convention() {
        let pt = phase_convention_test(0.5, 0.5, 64, 16, &e(0, 64)).unwrap();
        assert_eq!(pt.vanishing(1e-8), Some(PhaseConvention::Positive));
        // |e^{ist} - e^{-ist}| = 2 sin(0.25)
        assert!((pt.negative - 2.0 * 0.25f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn support_violation() {
        assert!(matches!(
            weyl_residual(0.5, 0.5, 16, 4, &e(12, 16)),
            Err(CcrError::SupportViolation { .. })
        ));
        assert!(matches!(
            weyl_residual(0.5, 0.5, 16, 16, &e(0, 16)),
            Err(CcrError::GuardTooLarge { .. })
        ));
    }

    #[test]
    fn shift_identity() {
        for n in [1, 2, 5] {
            assert!(shift_identity_residual(0.0, n, 32, &e(0, 32)).unwrap() < 1e-12);
        }
        assert!(shift_identity_residual(1.0, 1, 64, &e(0, 64)).unwrap() < 1e-8);
        assert!(shift_identity_residual(0.5, 3, 128, &e(2, 128)).unwrap() < 1e-7);
    }

    #[test]
    fn exp_commutator() {
        assert_eq!(exp_commutator_residual(0.0, 32, &e(0, 32)).unwrap(), 0.0);
        assert!(exp_commutator_residual(0.5, 64, &e(0, 64)).unwrap() < 1e-8);
    }

    #[test]
    fn sweeps() {
        let recs = convergence_sweep(0.0, 0.5, &[16], &e(0, 16)).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].residual < 1e-12);
        let recs = convergence_sweep(1.0, 1.0, &[32, 64], &e(1, 32)).unwrap();
        // both sit at rounding level once the coherent tail is below 1e-16
        assert!(recs.iter().all(|r| r.residual < 1e-13));
        assert!(convergence_sweep(0.5, 0.5, &[32, 16], &e(0, 16)).is_err());
    }

    #[test]
    fn group_law() {
        assert!(group_law_residual(0.3, 0.6, 64, &e(1, 64)).unwrap() < 1e-10);
    }

    #[test]
    fn csv_row_format() {
        let r = WeylResidualRecord {
            t: 0.5,
            s: 0.25,
            dim: 16,
            guard: 4,
            residual: 1.5e-13,
            test_vector_support: 0,
        };
        assert_eq!(r.csv_row(), "0.5,0.25,16,4,0,1.5e-13");
    }
}
