use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

use super::{Backend, Field, Scalar};
use crate::error::{Error, Result};

/// `log2 |n|` for a nonzero big integer, from its top 64 bits.
fn log2_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return n.abs().to_u64().map_or(f64::NAN, |v| (v as f64).log2());
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_u64().map_or(f64::NAN, |v| (v as f64).log2()) + shift as f64
}

impl Field for BigRational {
    fn from_ratio_like(&self, num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }

    fn from_f64_like(&self, v: f64) -> Self {
        BigRational::from_f64(v).unwrap_or_else(BigRational::zero)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn is_pole(&self, _floor: f64) -> bool {
        Zero::is_zero(self)
    }

    fn cmp_abs(&self, other: &Self) -> Ordering {
        Signed::abs(self).cmp(&Signed::abs(other))
    }

    fn same_value(&self, other: &Self) -> bool {
        self == other
    }

    fn log2_abs(&self) -> f64 {
        if Zero::is_zero(self) {
            return f64::NEG_INFINITY;
        }
        log2_bigint(self.numer()) - log2_bigint(self.denom())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn backend(&self) -> Backend {
        Backend::Exact
    }

    fn render(&self) -> String {
        self.to_string()
    }

    fn into_scalar(self) -> Scalar {
        Scalar::Exact(self)
    }

    fn from_scalar(s: &Scalar) -> Result<Self> {
        match s {
            Scalar::Exact(v) => Ok(v.clone()),
            Scalar::Float(_) => Err(Error::BackendMismatch("expected an exact value".into())),
        }
    }
}
