use super::{Rational, Scalar};
use crate::error::{EvoderError, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Element of ℚ(i): `re + im·i` with exact rational components.
///
/// Equality is componentwise; all arithmetic is exact. Values are immutable
/// and reduced by construction (the rational components are always stored in
/// lowest terms with positive denominators).
///
/// Serializes as its canonical text form (`"1/2-2/3i"`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    re: Rational,
    im: Rational,
}

impl Serialize for GaussianRational {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        s.serialize_str(&super::text::format_gaussian(self))
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        super::text::parse_gaussian_text(&text)
            .map_err(|reason| D::Error::custom(format!("scalar {text:?}: {reason}")))
    }
}

/// Binary field operations accepted by [`gr_arith`] and [`qe_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn from_rational(re: Rational) -> Self {
        Self {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(v)))
    }

    /// The imaginary unit i.
    pub fn i() -> Self {
        Self {
            re: Rational::zero(),
            im: Rational::one(),
        }
    }

    /// `a + b·i` from small integers.
    pub fn from_parts(a: i64, b: i64) -> Self {
        Self {
            re: Rational::from_integer(BigInt::from(a)),
            im: Rational::from_integer(BigInt::from(b)),
        }
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// |z|² = re² + im², a nonnegative rational.
    pub fn norm(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        rhs.inv()
            .map(|r| self.mul(&r))
            .ok_or(EvoderError::DivisionByZero)
    }
}

impl Scalar for GaussianRational {
    fn zero() -> Self {
        Self {
            re: Rational::zero(),
            im: Rational::zero(),
        }
    }

    fn one() -> Self {
        Self {
            re: Rational::one(),
            im: Rational::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, rhs: &Self) -> Self {
        Self {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        Self {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        Self {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }

    fn neg(&self) -> Self {
        Self {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    fn inv(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            return None;
        }
        let n = self.norm();
        Some(Self {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    fn from_i64(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::text::format_gaussian(self))
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::text::format_gaussian(self))
    }
}

/// Exact field arithmetic on ℚ(i). Division by zero is an error.
pub fn gr_arith(
    lhs: &GaussianRational,
    rhs: &GaussianRational,
    op: ArithOp,
) -> Result<GaussianRational> {
    match op {
        ArithOp::Add => Ok(lhs.add(rhs)),
        ArithOp::Sub => Ok(lhs.sub(rhs)),
        ArithOp::Mul => Ok(lhs.mul(rhs)),
        ArithOp::Div => lhs.checked_div(rhs),
    }
}

/// Floor square root of a nonnegative integer, `None` if not a perfect square.
fn int_sqrt_exact(v: &BigInt) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let r = v.sqrt();
    if &(&r * &r) == v {
        Some(r)
    } else {
        None
    }
}

/// Exact square root of a nonnegative rational, `None` if it is not a square
/// in ℚ. The input is reduced, so it is a square iff numerator and
/// denominator are both perfect squares.
fn rational_sqrt(v: &Rational) -> Option<Rational> {
    if v.is_negative() {
        return None;
    }
    let n = int_sqrt_exact(v.numer())?;
    let d = int_sqrt_exact(v.denom())?;
    Some(Rational::new(n, d))
}

/// Exact square root in ℚ(i), when it exists.
///
/// Solves (a+bi)² = m by case analysis. Writing m = x + yi:
/// - y = 0, x ≥ 0: root is (√x, 0) when x is a rational square;
/// - y = 0, x < 0: root is (0, √(−x)) when −x is a rational square;
/// - y ≠ 0: a² − b² = x and 2ab = y force a² = (x + √(x²+y²))/2, so the
///   norm x²+y² must be a rational square t², then (x+t)/2 must be a
///   rational square a², and b = y/(2a).
///
/// The returned root is canonical: its real part is positive, or zero with a
/// positive imaginary part (gr_sqrt(0) = 0). The other square root is its
/// negation.
pub fn gr_sqrt(m: &GaussianRational) -> Option<GaussianRational> {
    if Scalar::is_zero(m) {
        return Some(GaussianRational::zero());
    }
    let x = m.re();
    let y = m.im();
    if y.is_zero() {
        return if x.is_negative() {
            rational_sqrt(&-x.clone()).map(|r| GaussianRational::new(Rational::zero(), r))
        } else {
            rational_sqrt(x).map(GaussianRational::from_rational)
        };
    }
    let t = rational_sqrt(&m.norm())?;
    let a2 = (x + &t) / Rational::from_integer(BigInt::from(2));
    let a = rational_sqrt(&a2)?;
    if a.is_zero() {
        // Only possible when y = 0, handled above.
        return None;
    }
    let b = y / (&a * Rational::from_integer(BigInt::from(2)));
    Some(GaussianRational::new(a, b))
}
