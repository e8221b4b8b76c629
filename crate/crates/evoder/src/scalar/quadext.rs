use super::gaussian::{gr_sqrt, ArithOp, GaussianRational};
use super::Scalar;
use crate::error::{EvoderError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Element of a quadratic extension ℚ(i)[√r]: `base + radical_coeff·√radicand`.
///
/// The constructor collapses into ℚ(i) whenever it can: if the radicand is a
/// perfect square in ℚ(i) the radical part is folded into the base, and if
/// the radical coefficient is zero the radicand is dropped. A value is
/// *degenerate* when its radical part vanished; degenerate values mix freely
/// with any radicand. Two non-degenerate values only combine when their
/// radicands agree — otherwise the result would leave the quadratic
/// extension, which is reported as [`EvoderError::RadicandMismatch`].
///
/// Serializes as `{base, radical_coeff, radicand}` with each component in
/// canonical scalar text form.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadExtScalar {
    base: GaussianRational,
    radical_coeff: GaussianRational,
    radicand: GaussianRational,
}

impl QuadExtScalar {
    /// Builds `base + coeff·√radicand`, collapsing square radicands and zero
    /// coefficients into plain ℚ(i) values.
    pub fn new(
        base: GaussianRational,
        radical_coeff: GaussianRational,
        radicand: GaussianRational,
    ) -> Self {
        if radical_coeff.is_zero() || radicand.is_zero() {
            return Self {
                base,
                radical_coeff: GaussianRational::zero(),
                radicand: GaussianRational::zero(),
            };
        }
        if let Some(root) = gr_sqrt(&radicand) {
            return Self {
                base: base.add(&radical_coeff.mul(&root)),
                radical_coeff: GaussianRational::zero(),
                radicand: GaussianRational::zero(),
            };
        }
        Self {
            base,
            radical_coeff,
            radicand,
        }
    }

    pub fn from_gaussian(base: GaussianRational) -> Self {
        Self {
            base,
            radical_coeff: GaussianRational::zero(),
            radicand: GaussianRational::zero(),
        }
    }

    /// `√radicand` itself (collapses if the radicand is a ℚ(i)-square).
    pub fn sqrt_of(radicand: GaussianRational) -> Self {
        Self::new(GaussianRational::zero(), GaussianRational::one(), radicand)
    }

    pub fn base(&self) -> &GaussianRational {
        &self.base
    }

    pub fn radical_coeff(&self) -> &GaussianRational {
        &self.radical_coeff
    }

    pub fn radicand(&self) -> &GaussianRational {
        &self.radicand
    }

    /// True when the radical part vanished and the value lies in ℚ(i).
    pub fn is_degenerate(&self) -> bool {
        self.radical_coeff.is_zero()
    }

    /// The ℚ(i) value, if the radical part vanished.
    pub fn as_gaussian(&self) -> Option<&GaussianRational> {
        if self.is_degenerate() {
            Some(&self.base)
        } else {
            None
        }
    }

    /// The common radicand for a binary operation. Degenerate operands adopt
    /// the other side's radicand; two live radicals must agree.
    fn join_radicand(&self, rhs: &Self) -> Result<GaussianRational> {
        match (self.is_degenerate(), rhs.is_degenerate()) {
            (true, _) => Ok(rhs.radicand.clone()),
            (false, true) => Ok(self.radicand.clone()),
            (false, false) => {
                if self.radicand == rhs.radicand {
                    Ok(self.radicand.clone())
                } else {
                    Err(EvoderError::RadicandMismatch {
                        left: self.radicand.to_string(),
                        right: rhs.radicand.to_string(),
                    })
                }
            }
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        let r = self.join_radicand(rhs)?;
        Ok(Self::new(
            self.base.add(&rhs.base),
            self.radical_coeff.add(&rhs.radical_coeff),
            r,
        ))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        let r = self.join_radicand(rhs)?;
        Ok(Self::new(
            self.base.sub(&rhs.base),
            self.radical_coeff.sub(&rhs.radical_coeff),
            r,
        ))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let r = self.join_radicand(rhs)?;
        // (a + b√r)(c + d√r) = ac + bd·r + (ad + bc)√r
        let base = self
            .base
            .mul(&rhs.base)
            .add(&self.radical_coeff.mul(&rhs.radical_coeff).mul(&r));
        let coeff = self
            .base
            .mul(&rhs.radical_coeff)
            .add(&self.radical_coeff.mul(&rhs.base));
        Ok(Self::new(base, coeff, r))
    }

    /// Conjugate over ℚ(i): `a + b√r ↦ a − b√r`.
    pub fn radical_conj(&self) -> Self {
        Self {
            base: self.base.clone(),
            radical_coeff: self.radical_coeff.neg(),
            radicand: self.radicand.clone(),
        }
    }

    pub fn checked_inv(&self) -> Result<Self> {
        if Scalar::is_zero(self) {
            return Err(EvoderError::DivisionByZero);
        }
        if self.is_degenerate() {
            // base ≠ 0 here, so inversion in ℚ(i) cannot fail.
            let inv = self.base.inv().ok_or(EvoderError::DivisionByZero)?;
            return Ok(Self::from_gaussian(inv));
        }
        // 1/(a + b√r) = (a − b√r)/(a² − b²·r). The denominator is nonzero:
        // a² = b²·r with b ≠ 0 would make r a square in ℚ(i), which the
        // constructor collapses away.
        let denom = self.base.mul(&self.base).sub(
            &self
                .radical_coeff
                .mul(&self.radical_coeff)
                .mul(&self.radicand),
        );
        let denom_inv = denom.inv().ok_or(EvoderError::DivisionByZero)?;
        let conj = self.radical_conj();
        Ok(Self::new(
            conj.base.mul(&denom_inv),
            conj.radical_coeff.mul(&denom_inv),
            self.radicand.clone(),
        ))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        self.checked_mul(&rhs.checked_inv()?)
    }
}

impl Scalar for QuadExtScalar {
    fn zero() -> Self {
        Self::from_gaussian(GaussianRational::zero())
    }

    fn one() -> Self {
        Self::from_gaussian(GaussianRational::one())
    }

    fn is_zero(&self) -> bool {
        self.base.is_zero() && self.radical_coeff.is_zero()
    }

    fn add(&self, rhs: &Self) -> Self {
        self.checked_add(rhs).expect("radicand mismatch in add")
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.checked_sub(rhs).expect("radicand mismatch in sub")
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.checked_mul(rhs).expect("radicand mismatch in mul")
    }

    fn neg(&self) -> Self {
        Self {
            base: self.base.neg(),
            radical_coeff: self.radical_coeff.neg(),
            radicand: self.radicand.clone(),
        }
    }

    fn inv(&self) -> Option<Self> {
        self.checked_inv().ok()
    }

    fn from_i64(v: i64) -> Self {
        Self::from_gaussian(GaussianRational::from_int(v))
    }
}

fn fmt_quadext(v: &QuadExtScalar, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v.is_degenerate() {
        return write!(f, "{}", v.base);
    }
    if v.base.is_zero() {
        write!(f, "({})*sqrt({})", v.radical_coeff, v.radicand)
    } else {
        write!(f, "{} + ({})*sqrt({})", v.base, v.radical_coeff, v.radicand)
    }
}

impl fmt::Display for QuadExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_quadext(self, f)
    }
}

impl fmt::Debug for QuadExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_quadext(self, f)
    }
}

/// Exact field arithmetic on the quadratic extension. Division by zero and
/// mixing two different live radicands are errors.
pub fn qe_arith(lhs: &QuadExtScalar, rhs: &QuadExtScalar, op: ArithOp) -> Result<QuadExtScalar> {
    match op {
        ArithOp::Add => lhs.checked_add(rhs),
        ArithOp::Sub => lhs.checked_sub(rhs),
        ArithOp::Mul => lhs.checked_mul(rhs),
        ArithOp::Div => lhs.checked_div(rhs),
    }
}
