//! Exact symbolic engine for the single-mode ladder algebra.
//!
//! Expressions over `a`, `ad`, `q`, `p`, `I` with coefficients in
//! `Q(i, sqrt 2)` are parsed, expanded into ladder words and rewritten to
//! creators-left normal form with the one rule `a ad -> ad a + 1`. Normal
//! forms are canonical, so identities are decided by map equality.

mod expr;
mod normal;
mod scalar;

pub use expr::{parse, random_expression, OperatorExpr, MAX_EXPONENT};
pub use normal::{normal_order, normal_order_with_stats, normal_order_word, Letter, NormalForm, RewriteStats};
pub use scalar::ExactScalar;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{CcrError, Result};
use crate::fock::EXACT_FACTORIAL_MAX;

pub const MAX_CONJUGATION_POWER: u32 = 6;
pub const MAX_SERIES_ORDER: u32 = 10;

pub fn vacuum_expectation(nf: &NormalForm) -> ExactScalar {
    nf.vacuum_expectation()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IdentityVerdict {
    Equal,
    /// `difference` is `lhs - rhs` in normal form.
    Unequal { difference: NormalForm },
}

impl IdentityVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Self::Equal)
    }
}

pub fn verify_identity(lhs: &OperatorExpr, rhs: &OperatorExpr) -> IdentityVerdict {
    let difference = normal_order(lhs).sub(&normal_order(rhs));
    if difference.is_zero() {
        IdentityVerdict::Equal
    } else {
        IdentityVerdict::Unequal { difference }
    }
}

/// Both sides of `[p, q^n] = -i n q^(n-1)`.
pub fn power_commutator_sides(n: u32) -> (OperatorExpr, OperatorExpr) {
    let lhs = OperatorExpr::commutator(OperatorExpr::P, OperatorExpr::Q.pow(n));
    let coeff = &ExactScalar::from_integer(-(n as i64)) * &ExactScalar::i();
    let rhs = OperatorExpr::Scalar(coeff).times(OperatorExpr::Q.pow(n.saturating_sub(1)));
    (lhs, rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderAction {
    None,
    A,
    Adag,
}

/// Squared norm of `op psi_n` with `psi_n = ad^n psi_0`, as
/// `<0| a^n op^dag op ad^n |0>`.
pub fn fock_norm_exact(n: u32, op: LadderAction) -> Result<BigRational> {
    if n as u64 > EXACT_FACTORIAL_MAX {
        return Err(CcrError::LimitsExceeded(format!(
            "n = {n} exceeds the exact range {EXACT_FACTORIAL_MAX}"
        )));
    }
    let middle = match op {
        LadderAction::None => vec![],
        LadderAction::A => vec![OperatorExpr::Adag, OperatorExpr::A],
        LadderAction::Adag => vec![OperatorExpr::A, OperatorExpr::Adag],
    };
    let mut factors = vec![OperatorExpr::A.pow(n)];
    factors.extend(middle);
    factors.push(OperatorExpr::Adag.pow(n));
    let value = normal_order(&OperatorExpr::Product(factors)).vacuum_expectation();
    value
        .as_rational()
        .cloned()
        .ok_or_else(|| CcrError::InvalidInput(format!("norm {value} is not rational")))
}

/// Coefficient of `t^k` on both sides of a formal power series identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub k: u32,
    pub lhs: NormalForm,
    pub rhs: NormalForm,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesComparison {
    pub order: u32,
    pub terms: Vec<SeriesTerm>,
}

impl SeriesComparison {
    pub fn all_equal(&self) -> bool {
        self.terms.iter().all(|t| t.equal)
    }

    fn from_sides(order: u32, sides: impl Iterator<Item = (NormalForm, NormalForm)>) -> Self {
        let terms = sides
            .enumerate()
            .map(|(k, (lhs, rhs))| SeriesTerm {
                k: k as u32,
                equal: lhs == rhs,
                lhs,
                rhs,
            })
            .collect();
        Self { order, terms }
    }
}

fn check_limits(name: &str, value: u32, max: u32) -> Result<()> {
    if value == 0 || value > max {
        return Err(CcrError::LimitsExceeded(format!("{name} = {value} must lie in 1..={max}")));
    }
    Ok(())
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, j| acc * (n - j) as i64 / (j + 1) as i64)
}

/// `e^{-itq} p^n e^{itq}` against `(p + t I)^n`, order by order in `t`.
/// Left coefficients are `ad_{-iq}^k(p^n)/k!`, right ones `C(n,k) p^(n-k)`.
pub fn conjugation_series(n: u32, order: u32) -> Result<SeriesComparison> {
    check_limits("n", n, MAX_CONJUGATION_POWER)?;
    check_limits("order", order, MAX_SERIES_ORDER)?;
    let generator = normal_order(&OperatorExpr::Scalar(-ExactScalar::i()).times(OperatorExpr::Q));
    let p = normal_order(&OperatorExpr::P);
    let mut lhs = normal_order(&OperatorExpr::P.pow(n));
    let mut rhs_power = NormalForm::identity();
    let mut p_powers = vec![NormalForm::identity()];
    for _ in 0..n {
        rhs_power = rhs_power.mul(&p);
        p_powers.push(rhs_power.clone());
    }
    let mut sides = Vec::with_capacity(order as usize + 1);
    for k in 0..=order {
        if k > 0 {
            lhs = generator.commutator(&lhs).scale(&ExactScalar::rational(1, k as i64));
        }
        let rhs = if k <= n {
            p_powers[(n - k) as usize].scale(&ExactScalar::from_integer(binomial(n, k)))
        } else {
            NormalForm::zero()
        };
        sides.push((lhs.clone(), rhs));
    }
    Ok(SeriesComparison::from_sides(order, sides.into_iter()))
}

/// `p e^{itq} - e^{itq} p` against `t e^{itq}`: coefficients
/// `[p, (iq)^k]/k!` and `(iq)^(k-1)/(k-1)!`.
pub fn exp_commutator_series(order: u32) -> Result<SeriesComparison> {
    check_limits("order", order, MAX_SERIES_ORDER)?;
    let iq = normal_order(&OperatorExpr::Scalar(ExactScalar::i()).times(OperatorExpr::Q));
    let p = normal_order(&OperatorExpr::P);
    // exp_terms[k] = (iq)^k / k!
    let mut exp_terms = vec![NormalForm::identity()];
    for k in 1..=order {
        let next = exp_terms[k as usize - 1].mul(&iq).scale(&ExactScalar::rational(1, k as i64));
        exp_terms.push(next);
    }
    let sides = (0..=order).map(|k| {
        let lhs = p.commutator(&exp_terms[k as usize]);
        let rhs = if k == 0 {
            NormalForm::zero()
        } else {
            exp_terms[k as usize - 1].clone()
        };
        (lhs, rhs)
    });
    Ok(SeriesComparison::from_sides(order, sides))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn canonical_relation_and_sign_flip() {
        let lhs = parse("[p,q]").unwrap();
        assert!(verify_identity(&lhs, &parse("\u{2212}i*I").unwrap()).is_equal());
        match verify_identity(&lhs, &parse("i*I").unwrap()) {
            IdentityVerdict::Unequal { difference } => {
                let expected = &ExactScalar::from_integer(-2) * &ExactScalar::i();
                assert_eq!(difference, NormalForm::scalar(expected));
            }
            IdentityVerdict::Equal => panic!("sign flip not detected"),
        }
    }

    #[test]
    fn power_commutator_small_cases() {
        assert!(verify_identity(&parse("[p,q^2]").unwrap(), &parse("-2*i*q").unwrap()).is_equal());
        for n in 0..=10 {
            let (lhs, rhs) = power_commutator_sides(n);
            assert!(verify_identity(&lhs, &rhs).is_equal(), "n = {n}");
        }
    }

    #[test]
    fn fock_norms() {
        assert_eq!(fock_norm_exact(4, LadderAction::None).unwrap(), rat(24));
        assert_eq!(fock_norm_exact(4, LadderAction::Adag).unwrap(), rat(120));
        assert_eq!(fock_norm_exact(4, LadderAction::A).unwrap(), rat(96));
        assert_eq!(fock_norm_exact(0, LadderAction::A).unwrap(), rat(0));
        assert!(fock_norm_exact(21, LadderAction::None).is_err());
        assert_eq!(fock_norm_exact(20, LadderAction::None).unwrap(), rat(2_432_902_008_176_640_000));
    }

    #[test]
    fn conjugation_first_power() {
        let s = conjugation_series(1, 4).unwrap();
        assert!(s.all_equal());
        assert_eq!(s.terms[0].lhs, normal_order(&OperatorExpr::P));
        assert_eq!(s.terms[1].lhs, NormalForm::identity());
        assert!(s.terms[2..].iter().all(|t| t.lhs.is_zero()));
    }

    #[test]
    fn conjugation_second_power() {
        let s = conjugation_series(2, 5).unwrap();
        assert_eq!(s.terms[1].lhs, normal_order(&parse("2*p").unwrap()));
        assert!(s.all_equal());
    }

    #[test]
    fn conjugation_terminates() {
        for n in 1..=6 {
            let s = conjugation_series(n, 10).unwrap();
            assert!(s.all_equal(), "n = {n}");
            assert!(s.terms[n as usize + 1..].iter().all(|t| t.lhs.is_zero()));
        }
        assert!(conjugation_series(7, 3).is_err());
        assert!(conjugation_series(2, 11).is_err());
        assert!(conjugation_series(0, 3).is_err());
    }

    #[test]
    fn exp_commutator_to_order_eight() {
        let s = exp_commutator_series(8).unwrap();
        assert_eq!(s.terms.len(), 9);
        assert!(s.all_equal());
    }
}
