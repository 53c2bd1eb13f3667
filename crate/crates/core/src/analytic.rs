//! Analytic-vector diagnostics.
//!
//! A vector `xi` is analytic for `A` when `sum_k t^k / k! ||A^k xi||` is
//! finite for every `t > 0`. At finite truncation the series is evaluated to
//! `k_max` terms and judged by a ratio test on the tail.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CcrError, Result};
use crate::fock::{ln_factorial, FockState};
use crate::matrix::{vec_norm, ComplexMatrix, ZERO};

pub const DEFAULT_K_MAX: usize = 60;
pub const CONVERGED_RATIO: f64 = 0.9;
pub const DIVERGING_RATIO: f64 = 1.1;
pub const RATIO_WINDOW: usize = 5;

/// `exp` of anything above this overflows an `f64`.
const LOG_OVERFLOW: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    Diverging,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Converged => "converged",
            Verdict::Diverging => "diverging",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub t: f64,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub ratios: Vec<f64>,
    pub verdict: Verdict,
    pub k_max: usize,
}

impl SeriesReport {
    /// True when some term vanished exactly, so the series is a finite sum.
    pub fn terminated(&self) -> bool {
        self.terms.contains(&0.0)
    }

    pub fn sum(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }
}

/// `ln ||A^k v||` for `k = 0..=k_max`, `-inf` once the iterate vanishes.
/// The iterate is renormalized every step so large norms never materialize.
fn log_norms_of_powers(a: &ComplexMatrix, v: &[Complex64], k_max: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(k_max + 1);
    let n0 = vec_norm(v);
    if n0 == 0.0 {
        out.resize(k_max + 1, f64::NEG_INFINITY);
        return Ok(out);
    }
    let mut w: Vec<Complex64> = v.iter().map(|z| z / n0).collect();
    let mut log_norm = n0.ln();
    out.push(log_norm);
    for k in 1..=k_max {
        if log_norm == f64::NEG_INFINITY {
            out.push(log_norm);
            continue;
        }
        w = a.apply(&w);
        let nrm = vec_norm(&w);
        if !nrm.is_finite() {
            return Err(CcrError::NumericOverflow { k });
        }
        if nrm == 0.0 {
            log_norm = f64::NEG_INFINITY;
        } else {
            log_norm += nrm.ln();
            w.iter_mut().for_each(|z| *z /= nrm);
        }
        out.push(log_norm);
    }
    Ok(out)
}

/// Checking `A^k` needs every mode reachable in `k` steps inside the matrix:
/// `top + bandwidth * k < dim`. Diagonal operators never spread support.
fn check_reach(a: &ComplexMatrix, xi: &FockState, k: usize) -> Result<Vec<Complex64>> {
    let v = xi.to_vector(a.dim())?;
    let top = xi.top_mode().unwrap_or(0);
    let required = top + a.bandwidth() * k + 1;
    if required > a.dim() {
        return Err(CcrError::SupportViolation {
            top,
            required,
            dim: a.dim(),
        });
    }
    Ok(v)
}

pub fn analytic_series(a: &ComplexMatrix, xi: &FockState, t: f64, k_max: usize) -> Result<SeriesReport> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(CcrError::InvalidInput(format!("series parameter t = {t} must be finite and >= 0")));
    }
    if k_max == 0 {
        return Err(CcrError::InvalidInput("k_max must be positive".into()));
    }
    if xi.is_zero() {
        return Err(CcrError::InvalidInput("zero vector has no analytic series".into()));
    }
    let v = check_reach(a, xi, k_max)?;
    let log_norms = log_norms_of_powers(a, &v, k_max)?;

    let mut terms = Vec::with_capacity(k_max + 1);
    for (k, &ln_norm) in log_norms.iter().enumerate() {
        let term = if k == 0 {
            ln_norm.exp()
        } else if t == 0.0 || ln_norm == f64::NEG_INFINITY {
            0.0
        } else {
            let ln_term = k as f64 * t.ln() - ln_factorial(k as u64) + ln_norm;
            if ln_term > LOG_OVERFLOW {
                return Err(CcrError::NumericOverflow { k });
            }
            ln_term.exp()
        };
        terms.push(term);
    }

    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    let ratios: Vec<f64> = terms
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();

    let terminated = terms.contains(&0.0);
    let verdict = if terminated {
        Verdict::Converged
    } else if ratios.len() < RATIO_WINDOW {
        Verdict::Inconclusive
    } else {
        let tail = &ratios[ratios.len() - RATIO_WINDOW..];
        if tail.iter().all(|&r| r < CONVERGED_RATIO) {
            Verdict::Converged
        } else if tail.iter().all(|&r| r > DIVERGING_RATIO) {
            Verdict::Diverging
        } else {
            Verdict::Inconclusive
        }
    };

    Ok(SeriesReport {
        t,
        terms,
        partial_sums,
        ratios,
        verdict,
        k_max,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorExp {
    pub state: FockState,
    pub report: SeriesReport,
    /// Geometric estimate of the omitted tail norm.
    pub tail_estimate: f64,
}

/// `sum_{k <= k_max} t^k / k! A^k xi`, refused unless the analytic series for
/// `|t|` has converged.
pub fn taylor_exp(a: &ComplexMatrix, t: f64, xi: &FockState, k_max: usize) -> Result<TaylorExp> {
    let report = analytic_series(a, xi, t.abs(), k_max)?;
    if report.verdict != Verdict::Converged {
        return Err(CcrError::NotConverged {
            verdict: report.verdict.to_string(),
        });
    }
    let mut v = xi.to_vector(a.dim())?;
    let mut acc = v.clone();
    for k in 1..=k_max {
        let scale = Complex64::new(t / k as f64, 0.0);
        v = a.apply(&v).into_iter().map(|z| z * scale).collect();
        acc.iter_mut().zip(&v).for_each(|(s, x)| *s += x);
    }
    let tail_estimate = if report.terminated() {
        0.0
    } else {
        let tail = &report.ratios[report.ratios.len() - RATIO_WINDOW..];
        let r = tail.iter().copied().fold(0.0, f64::max);
        report.terms[k_max] * r / (1.0 - r)
    };
    Ok(TaylorExp {
        state: FockState::normalized(acc)?,
        report,
        tail_estimate,
    })
}

/// `2^{k/2} sqrt((M + k)! / M!)`, a valid bound on `||q^k phi|| / ||phi||`
/// (and the same for `p`) when `phi` lives on modes `<= M`.
pub fn corrected_growth_bound(dim: usize, max_mode: usize, k: usize) -> Result<f64> {
    if max_mode + k >= dim {
        return Err(CcrError::SupportViolation {
            top: max_mode,
            required: max_mode + k + 1,
            dim,
        });
    }
    let ln_bound = 0.5 * k as f64 * std::f64::consts::LN_2
        + 0.5 * (ln_factorial((max_mode + k) as u64) - ln_factorial(max_mode as u64));
    Ok(ln_bound.exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthCheck {
    pub norm: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Compares `||op^k phi||` against [`corrected_growth_bound`] times `||phi||`.
pub fn check_growth_bound(op: &ComplexMatrix, phi: &FockState, k: usize) -> Result<GrowthCheck> {
    let top = phi
        .top_mode()
        .ok_or_else(|| CcrError::InvalidInput("zero vector".into()))?;
    let factor = corrected_growth_bound(op.dim(), top, k)?;
    let v = phi.to_vector(op.dim())?;
    let bound = factor * vec_norm(&v);
    let norm = log_norms_of_powers(op, &v, k)?[k].exp();
    Ok(GrowthCheck {
        norm,
        bound,
        holds: norm <= bound * (1.0 + 1e-12),
    })
}

/// Single-application bound for `psi = sum_{j=m}^{m+n} C_j psi_j` in the
/// unnormalized ladder basis, against `sqrt(2) C sqrt((m + n + 1)!)` with
/// `C = max |C_j|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBoundCheck {
    /// `||q psi|| / (C sqrt((m + n + 1)!))`.
    pub needed_constant: f64,
    pub stated_constant: f64,
    pub stated_holds: bool,
}

fn ladder_combination(dim: usize, first_mode: usize, coeffs: &[Complex64]) -> Result<(FockState, f64, usize)> {
    if coeffs.is_empty() || coeffs.iter().all(|c| *c == ZERO) {
        return Err(CcrError::InvalidInput("need at least one nonzero coefficient".into()));
    }
    let last = first_mode + coeffs.len() - 1;
    if last + 2 > dim {
        return Err(CcrError::SupportViolation {
            top: last,
            required: last + 2,
            dim,
        });
    }
    let mut full = vec![ZERO; dim];
    full[first_mode..=last].copy_from_slice(coeffs);
    let c_max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok((
        FockState::new(full, crate::fock::BasisConvention::Unnormalized)?,
        c_max,
        last,
    ))
}

pub fn single_step_constant(q: &ComplexMatrix, first_mode: usize, coeffs: &[Complex64]) -> Result<StepBoundCheck> {
    let (psi, c_max, last) = ladder_combination(q.dim(), first_mode, coeffs)?;
    let v = psi.to_vector(q.dim())?;
    let qpsi = vec_norm(&q.apply(&v));
    let scale = c_max * (0.5 * ln_factorial(last as u64 + 1)).exp();
    let needed = qpsi / scale;
    Ok(StepBoundCheck {
        needed_constant: needed,
        stated_constant: std::f64::consts::SQRT_2,
        stated_holds: needed <= std::f64::consts::SQRT_2 * (1.0 + 1e-12),
    })
}

/// First power `k >= 1` at which `||q^k psi||` exceeds the geometric bound
/// `C^k (2 (m + n + 1)!)^{k/2}`, or `None` if it holds up to `k_max`.
pub fn geometric_bound_breakdown(
    q: &ComplexMatrix,
    first_mode: usize,
    coeffs: &[Complex64],
    k_max: usize,
) -> Result<Option<usize>> {
    let (psi, c_max, last) = ladder_combination(q.dim(), first_mode, coeffs)?;
    let v = check_reach(q, &psi, k_max)?;
    let log_norms = log_norms_of_powers(q, &v, k_max)?;
    let ln_base = c_max.ln() + 0.5 * (std::f64::consts::LN_2 + ln_factorial(last as u64 + 1));
    Ok((1..=k_max).find(|&k| log_norms[k] > k as f64 * ln_base + 1e-12))
}
