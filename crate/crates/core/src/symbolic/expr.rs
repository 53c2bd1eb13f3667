use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::scalar::ExactScalar;
use crate::error::{CcrError, Result};
use crate::fock::{build_annihilator, build_creator, build_momentum, build_position};
use crate::matrix::ComplexMatrix;
use crate::rng::SplitMix64;

pub const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum OperatorExpr {
    A,
    Adag,
    Q,
    P,
    Id,
    Scalar(ExactScalar),
    Sum(Vec<OperatorExpr>),
    Product(Vec<OperatorExpr>),
    Neg(Box<OperatorExpr>),
    Power(Box<OperatorExpr>, u32),
    Commutator(Box<OperatorExpr>, Box<OperatorExpr>),
}

impl OperatorExpr {
    pub fn scalar(c: ExactScalar) -> Self {
        Self::Scalar(c)
    }

    pub fn pow(self, n: u32) -> Self {
        Self::Power(Box::new(self), n)
    }

    pub fn commutator(x: Self, y: Self) -> Self {
        Self::Commutator(Box::new(x), Box::new(y))
    }

    pub fn times(self, rhs: Self) -> Self {
        Self::Product(vec![self, rhs])
    }

    pub fn plus(self, rhs: Self) -> Self {
        Self::Sum(vec![self, rhs])
    }

    /// Number of ladder-type letters in the longest word of the expansion.
    pub fn word_length(&self) -> usize {
        match self {
            Self::A | Self::Adag | Self::Q | Self::P => 1,
            Self::Id | Self::Scalar(_) => 0,
            Self::Sum(xs) => xs.iter().map(Self::word_length).max().unwrap_or(0),
            Self::Product(xs) => xs.iter().map(Self::word_length).sum(),
            Self::Neg(x) => x.word_length(),
            Self::Power(x, n) => x.word_length() * *n as usize,
            Self::Commutator(x, y) => x.word_length() + y.word_length(),
        }
    }

    /// Formal adjoint: `a <-> ad`, scalars conjugated, products reversed.
    pub fn adjoint(&self) -> Self {
        match self {
            Self::A => Self::Adag,
            Self::Adag => Self::A,
            Self::Q | Self::P | Self::Id => self.clone(),
            Self::Scalar(c) => Self::Scalar(c.conj()),
            Self::Sum(xs) => Self::Sum(xs.iter().map(Self::adjoint).collect()),
            Self::Product(xs) => Self::Product(xs.iter().rev().map(Self::adjoint).collect()),
            Self::Neg(x) => Self::Neg(Box::new(x.adjoint())),
            Self::Power(x, n) => Self::Power(Box::new(x.adjoint()), *n),
            Self::Commutator(x, y) => Self::commutator(y.adjoint(), x.adjoint()),
        }
    }

    /// Value of an expression without operator letters.
    pub fn as_constant(&self) -> Option<ExactScalar> {
        match self {
            Self::A | Self::Adag | Self::Q | Self::P => None,
            Self::Id => Some(ExactScalar::one()),
            Self::Scalar(c) => Some(c.clone()),
            Self::Sum(xs) => xs
                .iter()
                .try_fold(ExactScalar::zero(), |acc, x| Some(&acc + &x.as_constant()?)),
            Self::Product(xs) => xs
                .iter()
                .try_fold(ExactScalar::one(), |acc, x| Some(&acc * &x.as_constant()?)),
            Self::Neg(x) => Some(-x.as_constant()?),
            Self::Power(x, n) => {
                let c = x.as_constant()?;
                Some((0..*n).fold(ExactScalar::one(), |acc, _| &acc * &c))
            }
            Self::Commutator(x, y) => {
                x.as_constant()?;
                y.as_constant()?;
                Some(ExactScalar::zero())
            }
        }
    }

    /// Truncated Fock-space matrix, evaluated in floating point.
    pub fn fock_matrix(&self, dim: usize) -> Result<ComplexMatrix> {
        let basis = FockLetters {
            a: build_annihilator(dim)?,
            ad: build_creator(dim)?,
            q: build_position(dim)?,
            p: build_momentum(dim)?,
            id: ComplexMatrix::identity(dim)?,
        };
        Ok(self.eval_matrix(&basis))
    }

    fn eval_matrix(&self, b: &FockLetters) -> ComplexMatrix {
        match self {
            Self::A => b.a.clone(),
            Self::Adag => b.ad.clone(),
            Self::Q => b.q.clone(),
            Self::P => b.p.clone(),
            Self::Id => b.id.clone(),
            Self::Scalar(c) => b.id.scale(c.to_complex()),
            Self::Sum(xs) => xs
                .iter()
                .fold(b.id.scale(Complex64::new(0.0, 0.0)), |acc, x| &acc + &x.eval_matrix(b)),
            Self::Product(xs) => xs.iter().fold(b.id.clone(), |acc, x| &acc * &x.eval_matrix(b)),
            Self::Neg(x) => -&x.eval_matrix(b),
            Self::Power(x, n) => x.eval_matrix(b).powi(*n),
            Self::Commutator(x, y) => {
                let (x, y) = (x.eval_matrix(b), y.eval_matrix(b));
                &(&x * &y) - &(&y * &x)
            }
        }
    }
}

struct FockLetters {
    a: ComplexMatrix,
    ad: ComplexMatrix,
    q: ComplexMatrix,
    p: ComplexMatrix,
    id: ComplexMatrix,
}

fn needs_parens(e: &OperatorExpr) -> bool {
    matches!(e, OperatorExpr::Sum(_) | OperatorExpr::Neg(_) | OperatorExpr::Scalar(_) | OperatorExpr::Product(_) | OperatorExpr::Power(..))
}

/// Renders in the grammar accepted by [`parse`].
impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::A => f.write_str("a"),
            Self::Adag => f.write_str("ad"),
            Self::Q => f.write_str("q"),
            Self::P => f.write_str("p"),
            Self::Id => f.write_str("I"),
            Self::Scalar(c) => write!(f, "({c})"),
            Self::Sum(xs) if xs.is_empty() => f.write_str("0"),
            Self::Sum(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(" + "))
            }
            Self::Product(xs) if xs.is_empty() => f.write_str("I"),
            Self::Product(xs) => {
                let parts: Vec<String> = xs
                    .iter()
                    .map(|x| match x {
                        Self::Neg(_) => format!("({x})"),
                        _ => x.to_string(),
                    })
                    .collect();
                write!(f, "{}", parts.join("*"))
            }
            Self::Neg(x) => write!(f, "-({x})"),
            Self::Power(x, n) if needs_parens(x) => write!(f, "({x})^{n}"),
            Self::Power(x, n) => write!(f, "{x}^{n}"),
            Self::Commutator(x, y) => write!(f, "[{x}, {y}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            c if c.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(chars[start..i].iter().collect())));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            other => {
                return Err(CcrError::Syntax {
                    pos: start,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(CcrError::Syntax {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn sum(&mut self) -> Result<OperatorExpr> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    terms.push(match self.term()? {
                        OperatorExpr::Scalar(c) => OperatorExpr::Scalar(-c),
                        other => OperatorExpr::Neg(Box::new(other)),
                    });
                }
                _ => break,
            }
        }
        if terms.len() == 1 {
            return Ok(terms.pop().unwrap());
        }
        let constants: Option<Vec<ExactScalar>> = terms
            .iter()
            .map(|t| match t {
                OperatorExpr::Scalar(c) => Some(c.clone()),
                _ => None,
            })
            .collect();
        Ok(match constants {
            Some(cs) => OperatorExpr::Scalar(cs.iter().fold(ExactScalar::zero(), |acc, c| &acc + c)),
            None => OperatorExpr::Sum(terms),
        })
    }

    fn term(&mut self) -> Result<OperatorExpr> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    factors.push(self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.here();
                    let divisor = self.unary()?;
                    let inv = divisor
                        .as_constant()
                        .and_then(|c| c.inverse())
                        .ok_or_else(|| CcrError::Syntax {
                            pos: at,
                            msg: "divisor must be a nonzero scalar".into(),
                        })?;
                    factors.push(OperatorExpr::Scalar(inv));
                }
                _ => break,
            }
        }
        Ok(fold_constants(factors))
    }

    fn unary(&mut self) -> Result<OperatorExpr> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(match inner {
                OperatorExpr::Scalar(c) => OperatorExpr::Scalar(-c),
                other => OperatorExpr::Neg(Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<OperatorExpr> {
        let base = self.primary()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Int(digits)) => {
                self.pos += 1;
                let n: u32 = digits
                    .parse()
                    .ok()
                    .filter(|n| *n <= MAX_EXPONENT)
                    .ok_or_else(|| CcrError::Syntax {
                        pos: at,
                        msg: format!("exponent must be an integer in 0..={MAX_EXPONENT}"),
                    })?;
                Ok(base.pow(n))
            }
            _ => self.err("expected a nonnegative integer exponent"),
        }
    }

    fn primary(&mut self) -> Result<OperatorExpr> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Int(digits)) => {
                self.pos += 1;
                let n = digits.parse::<num_bigint::BigInt>().map_err(|_| CcrError::Syntax {
                    pos: at,
                    msg: "bad integer".into(),
                })?;
                Ok(OperatorExpr::Scalar(ExactScalar::from_rational(BigRational::from_integer(n))))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(match name.as_str() {
                    "a" => OperatorExpr::A,
                    "ad" => OperatorExpr::Adag,
                    "q" => OperatorExpr::Q,
                    "p" => OperatorExpr::P,
                    "I" => OperatorExpr::Id,
                    "i" => OperatorExpr::Scalar(ExactScalar::i()),
                    "sqrt2" => OperatorExpr::Scalar(ExactScalar::sqrt2()),
                    _ => return Err(CcrError::UnknownIdentifier { pos: at, name }),
                })
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                let x = self.sum()?;
                self.expect(Tok::Comma, "`,` in commutator")?;
                let y = self.sum()?;
                self.expect(Tok::RBracket, "`]`")?;
                Ok(OperatorExpr::commutator(x, y))
            }
            Some(_) => self.err("expected an operand"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Merges adjacent scalar factors so `1/sqrt2` parses to a single scalar.
fn fold_constants(factors: Vec<OperatorExpr>) -> OperatorExpr {
    let mut out: Vec<OperatorExpr> = Vec::with_capacity(factors.len());
    for f in factors {
        match (out.last_mut(), f) {
            (Some(OperatorExpr::Scalar(prev)), OperatorExpr::Scalar(c)) => *prev = &*prev * &c,
            (_, f) => out.push(f),
        }
    }
    if out.len() == 1 {
        out.pop().unwrap()
    } else {
        OperatorExpr::Product(out)
    }
}

/// Parses the operator grammar: `a ad q p I i sqrt2`, integers, `+ - * / ^`,
/// parentheses and `[X, Y]`. Positions in errors are character offsets.
pub fn parse(text: &str) -> Result<OperatorExpr> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
    };
    let e = parser.sum()?;
    if parser.pos != parser.toks.len() {
        return parser.err("unexpected trailing input");
    }
    Ok(e)
}

/// Random expression with word length at most `max_len`, for property checks.
pub fn random_expression(rng: &mut SplitMix64, max_len: usize) -> OperatorExpr {
    random_node(rng, max_len, 0)
}

fn random_scalar(rng: &mut SplitMix64) -> ExactScalar {
    match rng.below(6) {
        0 => ExactScalar::one(),
        1 => ExactScalar::from_integer(-2),
        2 => ExactScalar::i(),
        3 => ExactScalar::sqrt2(),
        4 => ExactScalar::rational(1, 3),
        _ => &ExactScalar::rational(-1, 2) * &ExactScalar::i(),
    }
}

fn random_leaf(rng: &mut SplitMix64, budget: usize) -> OperatorExpr {
    if budget == 0 {
        return if rng.below(2) == 0 {
            OperatorExpr::Id
        } else {
            OperatorExpr::Scalar(random_scalar(rng))
        };
    }
    match rng.below(5) {
        0 => OperatorExpr::A,
        1 => OperatorExpr::Adag,
        2 => OperatorExpr::Q,
        3 => OperatorExpr::P,
        _ => OperatorExpr::Scalar(random_scalar(rng)),
    }
}

fn random_node(rng: &mut SplitMix64, budget: usize, depth: usize) -> OperatorExpr {
    if budget <= 1 || depth >= 4 {
        return random_leaf(rng, budget.min(1));
    }
    match rng.below(6) {
        0 => random_leaf(rng, 1),
        1 => OperatorExpr::Sum(vec![random_node(rng, budget, depth + 1), random_node(rng, budget, depth + 1)]),
        2 | 3 => {
            let left = 1 + rng.below(budget as u64 - 1) as usize;
            OperatorExpr::Product(vec![
                random_node(rng, left, depth + 1),
                random_node(rng, budget - left, depth + 1),
            ])
        }
        4 => {
            let n = 2 + rng.below(budget as u64 - 1) as u32;
            let base_budget = (budget / n as usize).max(1);
            random_node(rng, base_budget, depth + 1).pow(n)
        }
        _ => {
            let left = 1 + rng.below(budget as u64 - 1) as usize;
            OperatorExpr::commutator(random_node(rng, left, depth + 1), random_node(rng, budget - left, depth + 1))
        }
    }
}
