use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Backend, Field, Scalar};
use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Binary floating point number with an explicit working precision.
///
/// Binary operations round to the larger of the two operand precisions.
#[derive(Clone)]
pub struct Float {
    value: BigFloat,
    prec: usize,
}

impl Float {
    pub fn from_ratio(num: i64, den: i64, prec: usize) -> Float {
        let n = BigFloat::from_i64(num, prec);
        let d = BigFloat::from_i64(den, prec);
        Float { value: n.div(&d, prec, RM), prec }
    }

    pub fn from_f64(v: f64, prec: usize) -> Float {
        Float { value: BigFloat::from_f64(v, prec), prec }
    }

    pub fn from_bigint(v: &BigInt, prec: usize) -> Float {
        let (sign, digits) = v.to_u64_digits();
        if digits.is_empty() {
            return Float { value: BigFloat::from_i64(0, prec), prec };
        }
        let s = if sign == num_bigint::Sign::Minus { Sign::Neg } else { Sign::Pos };
        let e = 64 * digits.len() as i32;
        let mut value = BigFloat::from_words(&digits, s, e);
        // Words carry every bit of the integer; round once to the target width.
        let _ = value.set_precision(prec.max(64 * digits.len()), RM);
        Float { value, prec }
    }

    /// Correctly rounded `num/den` (one rounding after two exact conversions).
    pub fn from_rational(v: &BigRational, prec: usize) -> Float {
        let n = Float::from_bigint(v.numer(), prec);
        let d = Float::from_bigint(v.denom(), prec);
        Float { value: n.value.div(&d.value, prec, RM), prec }
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn with_precision(&self, prec: usize) -> Float {
        let mut value = self.value.clone();
        if prec < self.prec {
            let _ = value.set_precision(prec, RM);
        }
        Float { value, prec }
    }

    pub fn inner(&self) -> &BigFloat {
        &self.value
    }

    /// `self * 2^k` for small integer `k`.
    pub fn mul_pow2(&self, k: i32) -> Float {
        let mut value = self.value.clone();
        if let Some(e) = value.exponent() {
            if !value.is_zero() {
                value.set_exponent(e + k);
            }
        }
        Float { value, prec: self.prec }
    }

    pub fn is_finite(&self) -> bool {
        !self.value.is_nan() && !self.value.is_inf()
    }

    /// Top 64 mantissa bits and the binary exponent such that
    /// `|x| = top * 2^(exp - 64)`.
    fn top_word(&self) -> Option<(u64, i32)> {
        if self.value.is_zero() {
            return None;
        }
        let (words, _, _, e, _) = self.value.as_raw_parts()?;
        let top = *words.last()?;
        Some((top, e))
    }

    fn op(&self, rhs: &Float, f: impl FnOnce(&BigFloat, &BigFloat, usize) -> BigFloat) -> Float {
        let p = self.prec.max(rhs.prec);
        Float { value: f(&self.value, &rhs.value, p), prec: p }
    }
}

impl fmt::Debug for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Float({}, {} bits)", self.value, self.prec)
    }
}

impl Field for Float {
    fn from_ratio_like(&self, num: i64, den: i64) -> Self {
        Float::from_ratio(num, den, self.prec)
    }

    fn from_f64_like(&self, v: f64) -> Self {
        Float::from_f64(v, self.prec)
    }

    fn add(&self, rhs: &Self) -> Self {
        self.op(rhs, |a, b, p| a.add(b, p, RM))
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.op(rhs, |a, b, p| a.sub(b, p, RM))
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.op(rhs, |a, b, p| a.mul(b, p, RM))
    }

    fn div(&self, rhs: &Self) -> Self {
        self.op(rhs, |a, b, p| a.div(b, p, RM))
    }

    fn neg(&self) -> Self {
        Float { value: self.value.neg(), prec: self.prec }
    }

    fn abs(&self) -> Self {
        Float { value: self.value.abs(), prec: self.prec }
    }

    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn is_pole(&self, floor: f64) -> bool {
        !self.is_finite() || self.is_zero() || self.log2_abs() < floor.log2()
    }

    fn cmp_abs(&self, other: &Self) -> Ordering {
        match self.value.abs_cmp(&other.value) {
            Some(v) if v > 0 => Ordering::Greater,
            Some(v) if v < 0 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }

    fn same_value(&self, other: &Self) -> bool {
        self.value.cmp(&other.value) == Some(0)
    }

    fn log2_abs(&self) -> f64 {
        match self.top_word() {
            None if self.is_zero() => f64::NEG_INFINITY,
            None => f64::NAN,
            Some((top, e)) => (top as f64).log2() - 64.0 + e as f64,
        }
    }

    fn to_f64(&self) -> f64 {
        if !self.is_finite() {
            return f64::NAN;
        }
        match self.top_word() {
            None => 0.0,
            Some((top, e)) => {
                let mag = (top as f64) * 2f64.powi((e - 64).clamp(-1100, 1100));
                if self.value.is_negative() {
                    -mag
                } else {
                    mag
                }
            }
        }
    }

    fn backend(&self) -> Backend {
        Backend::Float { precision_bits: self.prec }
    }

    fn render(&self) -> String {
        format!("{}", self.value)
    }

    fn into_scalar(self) -> Scalar {
        Scalar::Float(self)
    }

    fn from_scalar(s: &Scalar) -> Result<Self> {
        match s {
            Scalar::Float(f) => Ok(f.clone()),
            Scalar::Exact(_) => Err(Error::BackendMismatch("expected a float value".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_round_trips_through_f64() {
        let x = Float::from_ratio(-3, 8, 128);
        assert_eq!(x.to_f64(), -0.375);
        assert!((x.log2_abs() - 0.375f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn rational_conversion_is_correctly_rounded() {
        let big = BigRational::new(BigInt::from(10).pow(40) + 1, BigInt::from(3));
        let f = Float::from_rational(&big, 256);
        let g = Float::from_bigint(&(BigInt::from(10).pow(40) + 1), 256).div(&Float::from_ratio(3, 1, 256));
        assert!(f.same_value(&g));
        assert!((f.log2_abs() - (1e40f64 / 3.0).log2()).abs() < 1e-9);
    }

    #[test]
    fn precision_is_max_of_operands() {
        let a = Float::from_ratio(1, 3, 64);
        let b = Float::from_ratio(1, 3, 256);
        assert_eq!(a.mul(&b).precision(), 256);
    }

    #[test]
    fn pole_floor_detects_tiny_values() {
        let tiny = Float::from_ratio(1, 1, 128).mul_pow2(-200);
        assert!(tiny.is_pole(1e-40));
        assert!(!Float::from_ratio(1, 7, 128).is_pole(1e-40));
    }

    #[test]
    fn render_is_decimal() {
        let s = Float::from_ratio(1, 4, 64).render();
        assert_eq!(s, "2.5e-1");
    }
}
