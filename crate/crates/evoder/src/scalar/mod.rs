//! Exact scalar arithmetic: rationals, Gaussian rationals, and the quadratic
//! extension obtained by adjoining one square root.

mod gaussian;
mod quadext;
pub mod text;

pub use gaussian::{gr_arith, gr_sqrt, ArithOp, GaussianRational};
pub use quadext::{qe_arith, QuadExtScalar};
pub use text::{format_gaussian, format_rational, parse_gaussian, parse_gaussian_at};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational number. Stored reduced with a positive denominator; zero is 0/1.
pub type Rational = BigRational;

/// Build a rational from an integer.
pub fn rat(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// Build a rational from a numerator/denominator pair; reduces automatically.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// 2^k as an exact rational, for the doubling chains in closed-form families.
pub fn pow2(k: u32) -> Rational {
    BigRational::from_integer(BigInt::from(1) << k)
}

/// Field operations shared by the exact scalar types, letting the algebra,
/// solver and verification layers run over either the Gaussian rationals or
/// the quadratic extension.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug + std::fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` iff the value is zero.
    fn inv(&self) -> Option<Self>;
    fn from_i64(v: i64) -> Self;

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }
}
