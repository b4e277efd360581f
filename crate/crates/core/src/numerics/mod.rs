//! Scalar backends and q-shifted factorials.
//!
//! Two interchangeable number types implement [`Field`]: exact reduced
//! fractions ([`BigRational`]) and binary floating point with a configurable
//! mantissa ([`Float`]). Evaluators are written once against the trait; the
//! runtime-tagged [`Scalar`] carries values across API boundaries and refuses
//! to mix backends.

mod exact;
mod float;
pub mod poch;

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;

use crate::error::{Error, Result};

pub use float::Float;
pub use poch::{pow_int, Frac, InfProduct, PochTable, PowTable, Product};

/// Smallest admissible mantissa width for the float backend.
pub const MIN_PRECISION_BITS: usize = 64;

/// Arithmetic needed by every evaluator.
///
/// Constants are created "like" an existing value so the float backend can
/// inherit its precision.
#[allow(clippy::wrong_self_convention)]
pub trait Field: Clone + fmt::Debug + Send + Sync + 'static {
    fn from_ratio_like(&self, num: i64, den: i64) -> Self;
    fn from_f64_like(&self, v: f64) -> Self;

    fn zero_like(&self) -> Self {
        self.from_ratio_like(0, 1)
    }
    fn one_like(&self) -> Self {
        self.from_ratio_like(1, 1)
    }

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// `rhs` must be nonzero; callers check with [`Field::is_pole`] first.
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;

    fn is_zero(&self) -> bool;
    /// Whether a denominator factor must be rejected: exactly zero for the
    /// exact backend, `|x| < floor` for floats.
    fn is_pole(&self, floor: f64) -> bool;
    fn cmp_abs(&self, other: &Self) -> Ordering;
    /// Exact value equality (bitwise for floats).
    fn same_value(&self, other: &Self) -> bool;

    /// Approximate `log2 |x|`; `-inf` for zero. Valid far outside the f64 range.
    fn log2_abs(&self) -> f64;
    fn to_f64(&self) -> f64;

    fn backend(&self) -> Backend;
    fn render(&self) -> String;
    fn into_scalar(self) -> Scalar;
    fn from_scalar(s: &Scalar) -> Result<Self>;

    fn one_minus(&self) -> Self {
        self.one_like().sub(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Float { precision_bits: usize },
}

impl Backend {
    pub fn float(precision_bits: usize) -> Result<Self> {
        if precision_bits < MIN_PRECISION_BITS {
            return Err(Error::Config(format!("float precision {precision_bits} below minimum {MIN_PRECISION_BITS}")));
        }
        Ok(Backend::Float { precision_bits })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Backend::Exact)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float { .. } => "float",
        }
    }

    /// Builds `num/den` in this backend.
    pub fn ratio(&self, num: i64, den: i64) -> Scalar {
        match *self {
            Backend::Exact => Scalar::Exact(BigRational::new(num.into(), den.into())),
            Backend::Float { precision_bits } => Scalar::Float(Float::from_ratio(num, den, precision_bits)),
        }
    }

    /// Converts an exact rational into this backend (rounding for floats).
    pub fn from_rational(&self, v: &BigRational) -> Scalar {
        match *self {
            Backend::Exact => Scalar::Exact(v.clone()),
            Backend::Float { precision_bits } => Scalar::Float(Float::from_rational(v, precision_bits)),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => write!(f, "exact"),
            Backend::Float { precision_bits } => write!(f, "float({precision_bits})"),
        }
    }
}

/// A number tagged with its backend.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(BigRational),
    Float(Float),
}

macro_rules! binop {
    ($name:ident, $method:ident) => {
        pub fn $name(&self, rhs: &Scalar) -> Result<Scalar> {
            match (self, rhs) {
                (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a.$method(b))),
                (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a.$method(b))),
                _ => Err(mismatch(self, rhs)),
            }
        }
    };
}

fn mismatch(a: &Scalar, b: &Scalar) -> Error {
    Error::BackendMismatch(format!("{} vs {}", a.backend(), b.backend()))
}

impl Scalar {
    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact(_) => Backend::Exact,
            Scalar::Float(f) => f.backend(),
        }
    }

    binop!(try_add, add);
    binop!(try_sub, sub);
    binop!(try_mul, mul);

    pub fn try_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero("scalar division".into()));
        }
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(Field::div(a, b))),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(Field::div(a, b))),
            _ => Err(mismatch(self, rhs)),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(Field::neg(a)),
            Scalar::Float(a) => Scalar::Float(Field::neg(a)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(a) => Field::is_zero(a),
            Scalar::Float(a) => Field::is_zero(a),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(a) => Field::to_f64(a),
            Scalar::Float(a) => Field::to_f64(a),
        }
    }

    pub fn log2_abs(&self) -> f64 {
        match self {
            Scalar::Exact(a) => Field::log2_abs(a),
            Scalar::Float(a) => Field::log2_abs(a),
        }
    }

    /// Exact fraction string, or a decimal string carrying the full mantissa.
    pub fn render(&self) -> String {
        match self {
            Scalar::Exact(a) => Field::render(a),
            Scalar::Float(a) => Field::render(a),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(a) => Some(a),
            Scalar::Float(_) => None,
        }
    }

    pub fn as_float(&self) -> Option<&Float> {
        match self {
            Scalar::Float(a) => Some(a),
            Scalar::Exact(_) => None,
        }
    }

    /// Re-expresses the value in `backend`. Exact→Float rounds; Float→Exact is refused.
    pub fn convert(&self, backend: Backend) -> Result<Scalar> {
        match (self, backend) {
            (Scalar::Exact(v), b) => Ok(b.from_rational(v)),
            (Scalar::Float(v), Backend::Float { precision_bits }) => {
                Ok(Scalar::Float(v.with_precision(precision_bits)))
            }
            (Scalar::Float(_), Backend::Exact) => {
                Err(Error::BackendMismatch("float values cannot be converted to exact".into()))
            }
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a.same_value(b),
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Truncation and pole-detection settings shared by every evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericConfig {
    /// Target size of neglected tails of infinite products and series.
    pub epsilon_tail: f64,
    /// Hard cap on truncation length (product factors, series layers, window half-width).
    pub max_terms: usize,
    /// Smallest admissible |denominator factor| in the float backend.
    pub pole_floor: f64,
}

impl NumericConfig {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(epsilon_tail: f64, max_terms: usize, pole_floor: f64) -> Result<Self> {
        if !(epsilon_tail > 0.0 && epsilon_tail < 1.0) {
            return Err(Error::Config(format!("epsilon_tail {epsilon_tail} not in (0, 1)")));
        }
        if max_terms < 8 {
            return Err(Error::Config(format!("max_terms {max_terms} below 8")));
        }
        if !(pole_floor > 0.0) {
            return Err(Error::Config(format!("pole_floor {pole_floor} must be positive")));
        }
        Ok(NumericConfig { epsilon_tail, max_terms, pole_floor })
    }
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig { epsilon_tail: 1e-30, max_terms: 512, pole_floor: 1e-40 }
    }
}

macro_rules! dispatch_pair {
    ($a:expr, $q:expr, |$x:ident, $y:ident| $body:expr) => {
        match ($a, $q) {
            (Scalar::Exact($x), Scalar::Exact($y)) => $body.map(Field::into_scalar),
            (Scalar::Float($x), Scalar::Float($y)) => $body.map(Field::into_scalar),
            (a, q) => Err(mismatch(a, q)),
        }
    };
}

/// `(a; q)_k` for any integer `k`.
pub fn qpoch(a: &Scalar, q: &Scalar, k: i64, cfg: &NumericConfig) -> Result<Scalar> {
    dispatch_pair!(a, q, |x, y| poch::qpoch(x, y, k, cfg))
}

/// `(a; q)_∞`, float backend only. Returns the value and the number of factors used.
pub fn qpoch_inf(a: &Scalar, q: &Scalar, cfg: &NumericConfig) -> Result<(Scalar, usize)> {
    match (a, q) {
        (Scalar::Float(x), Scalar::Float(y)) => {
            let r = poch::qpoch_inf(x, y, cfg)?;
            Ok((Scalar::Float(r.value), r.factors))
        }
        (Scalar::Exact(_), Scalar::Exact(_)) => {
            Err(Error::BackendMismatch("infinite products are not evaluated in the exact backend".into()))
        }
        (a, q) => Err(mismatch(a, q)),
    }
}

/// `(a_1, ..., a_m; q)_k`.
pub fn qpoch_multi(list: &[Scalar], q: &Scalar, k: i64, cfg: &NumericConfig) -> Result<Scalar> {
    let mut acc = match q {
        Scalar::Exact(_) => Backend::Exact.ratio(1, 1),
        Scalar::Float(f) => f.backend().ratio(1, 1),
    };
    for a in list {
        acc = acc.try_mul(&qpoch(a, q, k, cfg)?)?;
    }
    Ok(acc)
}
