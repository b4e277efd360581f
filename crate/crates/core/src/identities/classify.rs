//! Balanced / well-poised / very-well-poised flags for one-variable series.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{Backend, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// `s phi s-1`: `s` upper and `s-1` lower parameters.
    Phi,
    /// `s psi s`: `s` upper and `s` lower parameters.
    Psi,
}

/// Parameter lists of a basic hypergeometric series.
///
/// With `combined` set, the lists omit the pairs `±q√a` (upper) and `±√a`
/// (lower), whose presence is signalled instead by the factor
/// `(1 - aq^{2k})/(1 - a)`. For `Phi`, `a` is `upper[0]`; for `Psi` it must
/// be given in `special`.
#[derive(Debug, Clone)]
pub struct SeriesClassifier {
    pub upper: Vec<Scalar>,
    pub lower: Vec<Scalar>,
    pub argument: Scalar,
    pub kind: Kind,
    pub q: Scalar,
    pub combined: bool,
    pub special: Option<Scalar>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Flags {
    pub balanced: bool,
    pub well_poised: bool,
    pub very_well_poised: bool,
}

fn prod(v: &[Scalar], one: &Scalar) -> Result<Scalar> {
    v.iter().try_fold(one.clone(), |acc, x| acc.try_mul(x))
}

/// Equal in the exact backend, or within rounding for floats.
fn same(a: &Scalar, b: &Scalar) -> Result<bool> {
    match a.backend() {
        Backend::Exact => Ok(a == b),
        Backend::Float { precision_bits } => {
            let d = a.try_sub(b)?;
            if d.is_zero() {
                return Ok(true);
            }
            let scale = a.log2_abs().max(b.log2_abs());
            Ok(d.log2_abs() - scale < -(precision_bits as f64 - 16.0))
        }
    }
}

pub fn classify(s: &SeriesClassifier) -> Result<Flags> {
    let (nu, nl) = (s.upper.len(), s.lower.len());
    let shape_ok = match s.kind {
        Kind::Phi => nu >= 1 && nl + 1 == nu,
        Kind::Psi => nu >= 1 && nl == nu,
    };
    if !shape_ok {
        return Err(Error::Schema(format!("{:?} series with {} upper and {} lower parameters", s.kind, nu, nl)));
    }
    let one = s.q.try_div(&s.q)?;
    let q = &s.q;
    match (s.kind, s.combined) {
        (Kind::Phi, false) => {
            let balanced = same(&s.argument, q)? && same(&prod(&s.lower, &one)?, &q.try_mul(&prod(&s.upper, &one)?)?)?;
            let qa1 = q.try_mul(&s.upper[0])?;
            let mut well_poised = true;
            for m in 0..nl {
                well_poised &= same(&s.upper[m + 1].try_mul(&s.lower[m])?, &qa1)?;
            }
            let very_well_poised = well_poised
                && nu >= 3
                && same(&s.upper[1], &s.upper[2].neg())?
                && same(&s.upper[1].try_mul(&s.upper[1])?, &q.try_mul(&qa1)?)?;
            Ok(Flags { balanced, well_poised, very_well_poised })
        }
        (Kind::Phi, true) => {
            let q3 = q.try_mul(q)?.try_mul(q)?;
            let balanced = same(&s.argument, q)? && same(&prod(&s.lower, &one)?, &q3.try_mul(&prod(&s.upper, &one)?)?)?;
            let qa1 = q.try_mul(&s.upper[0])?;
            let mut well_poised = true;
            for t in 0..nl {
                well_poised &= same(&s.upper[1 + t].try_mul(&s.lower[t])?, &qa1)?;
            }
            Ok(Flags { balanced, well_poised, very_well_poised: well_poised })
        }
        (Kind::Psi, combined) => {
            let target = match (&s.special, combined) {
                (Some(a), true) => Some(q.try_mul(a)?),
                (None, true) => {
                    return Err(Error::Schema("combined bilateral form needs the special parameter".into()))
                }
                _ => None,
            };
            let first = s.upper[0].try_mul(&s.lower[0])?;
            let target = target.unwrap_or(first);
            let mut well_poised = true;
            for (u, l) in s.upper.iter().zip(&s.lower) {
                well_poised &= same(&u.try_mul(l)?, &target)?;
            }
            Ok(Flags { balanced: false, well_poised, very_well_poised: combined && well_poised })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(n: i64, d: i64) -> Scalar {
        Backend::Exact.ratio(n, d)
    }

    #[test]
    fn explicit_vwp_chain() {
        // a = 4, q = 1/2: q√a = 1, √a = 2.
        let q = ex(1, 2);
        let b = ex(3, 1);
        let s = SeriesClassifier {
            upper: vec![ex(4, 1), ex(1, 1), ex(-1, 1), b.clone()],
            lower: vec![ex(2, 1), ex(-2, 1), ex(2, 3)],
            argument: ex(1, 5),
            kind: Kind::Phi,
            q,
            combined: false,
            special: None,
        };
        let f = classify(&s).unwrap();
        assert!(f.well_poised && f.very_well_poised && !f.balanced);
    }

    #[test]
    fn single_parameter_is_vacuously_well_poised() {
        let s = SeriesClassifier {
            upper: vec![ex(1, 3)],
            lower: vec![],
            argument: ex(1, 5),
            kind: Kind::Phi,
            q: ex(1, 2),
            combined: false,
            special: None,
        };
        let f = classify(&s).unwrap();
        assert!(f.well_poised && !f.very_well_poised);
    }

    #[test]
    fn shape_is_checked() {
        let s = SeriesClassifier {
            upper: vec![ex(1, 3)],
            lower: vec![ex(1, 3)],
            argument: ex(1, 5),
            kind: Kind::Phi,
            q: ex(1, 2),
            combined: false,
            special: None,
        };
        assert!(matches!(classify(&s), Err(Error::Schema(_))));
    }
}
