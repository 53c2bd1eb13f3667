use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CcrError, Result};

/// Exact element `r0 + r1 i + r2 sqrt2 + r3 i sqrt2` of `Q(i, sqrt 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ScalarRepr", into = "ScalarRepr")]
pub struct ExactScalar {
    pub r0: BigRational,
    pub r1: BigRational,
    pub r2: BigRational,
    pub r3: BigRational,
}

/// Gaussian rational `re + im i`, the building block of the ring.
type Gauss = (BigRational, BigRational);

fn gmul(x: &Gauss, y: &Gauss) -> Gauss {
    (&x.0 * &y.0 - &x.1 * &y.1, &x.0 * &y.1 + &x.1 * &y.0)
}

fn gadd(x: &Gauss, y: &Gauss) -> Gauss {
    (&x.0 + &y.0, &x.1 + &y.1)
}

fn gscale(x: &Gauss, c: &BigRational) -> Gauss {
    (&x.0 * c, &x.1 * c)
}

impl ExactScalar {
    pub fn new(r0: BigRational, r1: BigRational, r2: BigRational, r3: BigRational) -> Self {
        Self { r0, r1, r2, r3 }
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn i() -> Self {
        let z = BigRational::zero();
        Self::new(z.clone(), BigRational::one(), z.clone(), z)
    }

    pub fn sqrt2() -> Self {
        let z = BigRational::zero();
        Self::new(z.clone(), z.clone(), BigRational::one(), z)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        let z = BigRational::zero();
        Self::new(r, z.clone(), z.clone(), z)
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        self.r0.is_zero() && self.r1.is_zero() && self.r2.is_zero() && self.r3.is_zero()
    }

    /// The rational value, if the `i` and `sqrt2` parts vanish.
    pub fn as_rational(&self) -> Option<&BigRational> {
        (self.r1.is_zero() && self.r2.is_zero() && self.r3.is_zero()).then_some(&self.r0)
    }

    /// Complex conjugate (`i -> -i`, `sqrt2` fixed).
    pub fn conj(&self) -> Self {
        Self::new(self.r0.clone(), -&self.r1, self.r2.clone(), -&self.r3)
    }

    fn split(&self) -> (Gauss, Gauss) {
        ((self.r0.clone(), self.r1.clone()), (self.r2.clone(), self.r3.clone()))
    }

    fn join(u: Gauss, v: Gauss) -> Self {
        Self::new(u.0, u.1, v.0, v.1)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // (u + v s)^-1 = (u - v s) / (u^2 - 2 v^2), then invert the Gaussian rational.
        let (u, v) = self.split();
        let two = BigRational::from_integer(BigInt::from(2));
        let uu = gmul(&u, &u);
        let vv = gscale(&gmul(&v, &v), &two);
        let w = (&uu.0 - &vv.0, &uu.1 - &vv.1);
        let modulus = &w.0 * &w.0 + &w.1 * &w.1;
        let w_inv = (&w.0 / &modulus, -&w.1 / &modulus);
        let neg_v = (-&v.0, -&v.1);
        Some(Self::join(gmul(&u, &w_inv), gmul(&neg_v, &w_inv)))
    }

    pub fn to_complex(&self) -> Complex64 {
        let f = |r: &BigRational| r.to_f64().unwrap_or(f64::NAN);
        let s = std::f64::consts::SQRT_2;
        Complex64::new(f(&self.r0) + s * f(&self.r2), f(&self.r1) + s * f(&self.r3))
    }

    fn parts(&self) -> [(&BigRational, &'static str); 4] {
        [(&self.r0, ""), (&self.r1, "*i"), (&self.r2, "*sqrt2"), (&self.r3, "*i*sqrt2")]
    }
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.r0 + &rhs.r0, &self.r1 + &rhs.r1, &self.r2 + &rhs.r2, &self.r3 + &rhs.r3)
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.r0 - &rhs.r0, &self.r1 - &rhs.r1, &self.r2 - &rhs.r2, &self.r3 - &rhs.r3)
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        let (u1, v1) = self.split();
        let (u2, v2) = rhs.split();
        let two = BigRational::from_integer(BigInt::from(2));
        let u = gadd(&gmul(&u1, &u2), &gscale(&gmul(&v1, &v2), &two));
        let v = gadd(&gmul(&u1, &v2), &gmul(&v1, &u2));
        ExactScalar::join(u, v)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-&self.r0, -&self.r1, -&self.r2, -&self.r3)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders in the expression grammar, e.g. `1/2 - 3*i*sqrt2`.
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (r, suffix) in self.parts() {
            if r.is_zero() {
                continue;
            }
            if out.is_empty() {
                if r.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if r.is_negative() { " - " } else { " + " });
            }
            out.push_str(&fmt_rational(&r.abs()));
            out.push_str(suffix);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    r0: String,
    r1: String,
    r2: String,
    r3: String,
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || CcrError::InvalidInput(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str(s.trim()).map_err(|_| bad())?)),
    }
}

impl TryFrom<ScalarRepr> for ExactScalar {
    type Error = CcrError;
    fn try_from(r: ScalarRepr) -> Result<Self> {
        Ok(Self::new(
            parse_rational(&r.r0)?,
            parse_rational(&r.r1)?,
            parse_rational(&r.r2)?,
            parse_rational(&r.r3)?,
        ))
    }
}

impl From<ExactScalar> for ScalarRepr {
    fn from(s: ExactScalar) -> Self {
        Self {
            r0: fmt_rational(&s.r0),
            r1: fmt_rational(&s.r1),
            r2: fmt_rational(&s.r2),
            r3: fmt_rational(&s.r3),
        }
    }
}
