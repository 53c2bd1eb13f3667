use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::expr::OperatorExpr;
use super::scalar::ExactScalar;
use crate::error::{CcrError, Result};
use crate::fock::{build_annihilator, build_creator};
use crate::matrix::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    /// Annihilator `a`.
    A,
    /// Creator `ad`.
    Ad,
}

/// Rewrite bookkeeping for the rule `a ad -> ad a + 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteStats {
    pub applications: u64,
}

/// Creators-left normal form: `(m, k) -> c` stands for `c ad^m a^k`. Zero
/// coefficients are never stored, so equality of maps is equality of
/// operators.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<TermRepr>", into = "Vec<TermRepr>")]
pub struct NormalForm {
    terms: BTreeMap<(u32, u32), ExactScalar>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    m: u32,
    k: u32,
    coeff: ExactScalar,
}

impl TryFrom<Vec<TermRepr>> for NormalForm {
    type Error = CcrError;
    fn try_from(list: Vec<TermRepr>) -> Result<Self> {
        let mut nf = NormalForm::zero();
        for t in list {
            if nf.terms.contains_key(&(t.m, t.k)) {
                return Err(CcrError::InvalidInput(format!("duplicate term ({}, {})", t.m, t.k)));
            }
            nf.accumulate(t.m, t.k, &t.coeff);
        }
        Ok(nf)
    }
}

impl From<NormalForm> for Vec<TermRepr> {
    fn from(nf: NormalForm) -> Self {
        nf.terms
            .into_iter()
            .map(|((m, k), coeff)| TermRepr { m, k, coeff })
            .collect()
    }
}

impl NormalForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::monomial(0, 0, ExactScalar::one())
    }

    pub fn scalar(c: ExactScalar) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(m: u32, k: u32, c: ExactScalar) -> Self {
        let mut nf = Self::zero();
        nf.accumulate(m, k, &c);
        nf
    }

    /// Builds from arbitrary `(m, k, c)` triples, merging repeats.
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, ExactScalar)>) -> Self {
        let mut nf = Self::zero();
        for (m, k, c) in terms {
            nf.accumulate(m, k, &c);
        }
        nf
    }

    fn accumulate(&mut self, m: u32, k: u32, c: &ExactScalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((m, k)).or_insert_with(ExactScalar::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&(m, k));
        }
    }

    pub fn coeff(&self, m: u32, k: u32) -> ExactScalar {
        self.terms.get(&(m, k)).cloned().unwrap_or_else(ExactScalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &ExactScalar)> {
        self.terms.iter().map(|(&(m, k), c)| (m, k, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Longest word `m + k` among the terms.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(m, k)| m + k).max().unwrap_or(0)
    }

    /// Coefficient of the identity, i.e. `<0| X |0>`.
    pub fn vacuum_expectation(&self) -> ExactScalar {
        self.coeff(0, 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, k, c) in other.terms() {
            out.accumulate(m, k, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&ExactScalar::from_integer(-1))
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        Self::from_terms(self.terms().map(|(m, k, x)| (m, k, x * c)))
    }

    /// `(m, k, c) -> (k, m, conj c)`.
    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms().map(|(m, k, c)| (k, m, c.conj())))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_with_stats(other, &mut RewriteStats::default())
    }

    /// Product, normal ordered by appending creators one at a time.
    pub fn mul_with_stats(&self, other: &Self, stats: &mut RewriteStats) -> Self {
        let max_m = other.terms.keys().map(|(m, _)| *m).max().unwrap_or(0);
        let mut with_creators = vec![self.clone()];
        for _ in 0..max_m {
            let next = with_creators.last().unwrap().times_creator(stats);
            with_creators.push(next);
        }
        let mut out = Self::zero();
        for (m2, k2, c2) in other.terms() {
            for (m, k, c) in with_creators[m2 as usize].terms() {
                out.accumulate(m, k + k2, &(c * c2));
            }
        }
        out
    }

    fn times_creator(&self, stats: &mut RewriteStats) -> Self {
        let mut out = Self::zero();
        for (m, k, c) in self.terms() {
            let mut word = vec![Letter::Ad; m as usize];
            word.extend(std::iter::repeat_n(Letter::A, k as usize));
            word.push(Letter::Ad);
            let (nf, applications) = normal_order_word(&word);
            stats.applications += applications;
            for (m2, k2, c2) in nf.terms() {
                out.accumulate(m2, k2, &(c * c2));
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// `sum c ad^m a^k` on the truncated Fock space.
    pub fn to_matrix(&self, dim: usize) -> Result<ComplexMatrix> {
        let a = build_annihilator(dim)?;
        let ad = build_creator(dim)?;
        let mut out = ComplexMatrix::zeros(dim)?;
        for (m, k, c) in self.terms() {
            let term = &ad.powi(m) * &a.powi(k);
            out = &out + &term.scale(c.to_complex());
        }
        Ok(out)
    }
}

fn is_normal(word: &[Letter]) -> bool {
    word.windows(2).all(|w| !(w[0] == Letter::A && w[1] == Letter::Ad))
}

/// Normal orders a single word by rewriting the leftmost `a ad` pair,
/// longest words first so that equal words merge before being rewritten.
/// Returns the normal form and the number of rule applications.
pub fn normal_order_word(word: &[Letter]) -> (NormalForm, u64) {
    let mut pending: BTreeMap<(Reverse<usize>, Vec<Letter>), ExactScalar> = BTreeMap::new();
    let mut out = NormalForm::zero();
    let mut applications = 0;
    let push = |pending: &mut BTreeMap<_, ExactScalar>, out: &mut NormalForm, w: Vec<Letter>, c: ExactScalar| {
        if is_normal(&w) {
            let m = w.iter().filter(|l| **l == Letter::Ad).count() as u32;
            out.accumulate(m, w.len() as u32 - m, &c);
        } else {
            let entry = pending.entry((Reverse(w.len()), w)).or_insert_with(ExactScalar::zero);
            *entry = &*entry + &c;
        }
    };
    push(&mut pending, &mut out, word.to_vec(), ExactScalar::one());
    while let Some(((_, w), c)) = pending.pop_first() {
        if c.is_zero() {
            continue;
        }
        let j = w
            .windows(2)
            .position(|p| p[0] == Letter::A && p[1] == Letter::Ad)
            .expect("pending words are not normal");
        let mut swapped = w.clone();
        swapped.swap(j, j + 1);
        let mut contracted = w[..j].to_vec();
        contracted.extend_from_slice(&w[j + 2..]);
        applications += 1;
        push(&mut pending, &mut out, swapped, c.clone());
        push(&mut pending, &mut out, contracted, c);
    }
    (out, applications)
}

fn ladder_forms() -> (NormalForm, NormalForm, NormalForm, NormalForm) {
    let a = NormalForm::monomial(0, 1, ExactScalar::one());
    let ad = NormalForm::monomial(1, 0, ExactScalar::one());
    let half_sqrt2 = &ExactScalar::rational(1, 2) * &ExactScalar::sqrt2();
    // q = (a + ad)/sqrt2, p = (a - ad)/(i sqrt2) = -i sqrt2/2 (a - ad)
    let q = a.add(&ad).scale(&half_sqrt2);
    let p = a.sub(&ad).scale(&(&half_sqrt2 * &(-ExactScalar::i())));
    (a, ad, q, p)
}

/// Expands `q` and `p` into ladders and normal orders with `a ad -> ad a + 1`.
pub fn normal_order(e: &OperatorExpr) -> NormalForm {
    normal_order_with_stats(e).0
}

pub fn normal_order_with_stats(e: &OperatorExpr) -> (NormalForm, RewriteStats) {
    let letters = ladder_forms();
    let mut stats = RewriteStats::default();
    let nf = eval(e, &letters, &mut stats);
    (nf, stats)
}

fn eval(
    e: &OperatorExpr,
    letters: &(NormalForm, NormalForm, NormalForm, NormalForm),
    stats: &mut RewriteStats,
) -> NormalForm {
    match e {
        OperatorExpr::A => letters.0.clone(),
        OperatorExpr::Adag => letters.1.clone(),
        OperatorExpr::Q => letters.2.clone(),
        OperatorExpr::P => letters.3.clone(),
        OperatorExpr::Id => NormalForm::identity(),
        OperatorExpr::Scalar(c) => NormalForm::scalar(c.clone()),
        OperatorExpr::Sum(xs) => xs
            .iter()
            .fold(NormalForm::zero(), |acc, x| acc.add(&eval(x, letters, stats))),
        OperatorExpr::Product(xs) => xs.iter().fold(NormalForm::identity(), |acc, x| {
            let rhs = eval(x, letters, stats);
            acc.mul_with_stats(&rhs, stats)
        }),
        OperatorExpr::Neg(x) => eval(x, letters, stats).neg(),
        OperatorExpr::Power(x, n) => {
            let base = eval(x, letters, stats);
            (0..*n).fold(NormalForm::identity(), |acc, _| acc.mul_with_stats(&base, stats))
        }
        OperatorExpr::Commutator(x, y) => {
            let (x, y) = (eval(x, letters, stats), eval(y, letters, stats));
            let xy = x.mul_with_stats(&y, stats);
            xy.sub(&y.mul_with_stats(&x, stats))
        }
    }
}

/// Renders as a parseable expression, e.g. `(2)*ad^2*a + (-1*i)`.
impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(m, k, c)| {
                let mut s = format!("({c})");
                for (letter, power) in [("ad", m), ("a", k)] {
                    match power {
                        0 => {}
                        1 => s.push_str(&format!("*{letter}")),
                        n => s.push_str(&format!("*{letter}^{n}")),
                    }
                }
                s
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::expr::parse;

    fn nf(text: &str) -> NormalForm {
        normal_order(&parse(text).unwrap())
    }

    fn int(n: i64) -> ExactScalar {
        ExactScalar::from_integer(n)
    }

    #[test]
    fn single_rewrite() {
        assert_eq!(nf("a*ad"), NormalForm::from_terms([(1, 1, int(1)), (0, 0, int(1))]));
        let (_, applications) = normal_order_word(&[Letter::A, Letter::Ad]);
        assert_eq!(applications, 1);
    }

    #[test]
    fn canonical_commutator() {
        assert_eq!(nf("[p,q]"), NormalForm::scalar(-ExactScalar::i()));
        assert_eq!(nf("[a,ad]"), NormalForm::identity());
    }

    #[test]
    fn double_ladder() {
        assert_eq!(
            nf("a*a*ad*ad"),
            NormalForm::from_terms([(2, 2, int(1)), (1, 1, int(4)), (0, 0, int(2))])
        );
    }

    #[test]
    fn zero_is_canonical() {
        assert!(nf("a*ad - ad*a - I").is_zero());
        assert!(nf("0").is_zero());
        assert_eq!(nf("0").to_string(), "0");
    }

    #[test]
    fn vacuum_values() {
        assert_eq!(nf("a^3 * ad^3").vacuum_expectation(), int(6));
        assert_eq!(nf("ad*a").vacuum_expectation(), int(0));
    }

    #[test]
    fn render_reparses() {
        let x = nf("(q + 2*i*p)^3 - sqrt2*a*ad/3");
        assert_eq!(nf(&x.to_string()), x);
    }

    #[test]
    fn json_shape() {
        let x = nf("a*ad");
        let json = serde_json::to_value(&x).unwrap();
        assert_eq!(
            json,
            serde_json::json!([
                {"m": 0, "k": 0, "coeff": {"r0": "1", "r1": "0", "r2": "0", "r3": "0"}},
                {"m": 1, "k": 1, "coeff": {"r0": "1", "r1": "0", "r2": "0", "r3": "0"}}
            ])
        );
        assert_eq!(serde_json::from_value::<NormalForm>(json).unwrap(), x);
        let dup = serde_json::json!([
            {"m": 0, "k": 0, "coeff": {"r0": "1", "r1": "0", "r2": "0", "r3": "0"}},
            {"m": 0, "k": 0, "coeff": {"r0": "2", "r1": "0", "r2": "0", "r3": "0"}}
        ]);
        assert!(serde_json::from_value::<NormalForm>(dup).is_err());
    }

    #[test]
    fn matrix_of_number_operator() {
        let m = nf("ad*a").to_matrix(6).unwrap();
        for n in 0..6 {
            assert!((m.get(n, n).re - n as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn termination_bound_on_words() {
        for bits in 0u32..(1 << 8) {
            for len in 1..=8usize {
                let word: Vec<Letter> = (0..len)
                    .map(|j| if bits >> j & 1 == 1 { Letter::Ad } else { Letter::A })
                    .collect();
                let (_, applications) = normal_order_word(&word);
                assert!(applications <= (len * len) as u64, "{word:?}: {applications}");
            }
        }
    }
}
