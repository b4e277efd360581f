//! Generic q-shifted factorials over any [`Field`].
//!
//! Every finite product here is accumulated by the same loop: the running
//! power `q^j` is advanced by one multiplication per factor. [`PochTable`]
//! extends its cached prefixes with exactly that loop, so cached and
//! from-scratch values are bit-identical in both backends.

use crate::error::{Error, Result};

use super::{Field, NumericConfig};

/// Prefix product of `m` factors `1 - a*step^j` with the index of the first
/// factor judged to be a pole.
struct Prefix<T> {
    prod: T,
    first_pole: Option<usize>,
}

/// Runs the shared product loop. `start` is the initial power (`1` for the
/// forward direction, `1/q` for the backward one).
fn prefix<T: Field>(a: &T, start: &T, step: &T, m: usize, floor: f64) -> Prefix<T> {
    let mut prod = a.one_like();
    let mut qj = start.clone();
    let mut first_pole = None;
    for j in 0..m {
        let f = a.mul(&qj).one_minus();
        if first_pole.is_none() && f.is_pole(floor) {
            first_pole = Some(j + 1);
        }
        prod = prod.mul(&f);
        qj = qj.mul(step);
    }
    Prefix { prod, first_pole }
}

fn inverse_base<T: Field>(q: &T) -> Result<T> {
    if q.is_zero() {
        return Err(Error::DivisionByZero("q = 0 in a negative-index q-shifted factorial".into()));
    }
    Ok(q.one_like().div(q))
}

/// `(a; q)_k` for any integer `k`.
pub fn qpoch<T: Field>(a: &T, q: &T, k: i64, cfg: &NumericConfig) -> Result<T> {
    if k >= 0 {
        return Ok(prefix(a, &a.one_like(), q, k as usize, cfg.pole_floor).prod);
    }
    if q.cmp_abs(&q.one_like()).is_ge() {
        return Err(Error::ConstraintViolated("negative index requires |q| < 1".into()));
    }
    let qinv = inverse_base(q)?;
    let n = k.unsigned_abs() as usize;
    let p = prefix(a, &qinv, &qinv, n, cfg.pole_floor);
    if let Some(j) = p.first_pole {
        return Err(Error::DivisionByZero(format!("factor 1 - a q^-{j} of (a;q)_{k}")));
    }
    Ok(a.one_like().div(&p.prod))
}

/// `(a_1, ..., a_m; q)_k`.
pub fn qpoch_multi<T: Field>(list: &[T], q: &T, k: i64, cfg: &NumericConfig) -> Result<T> {
    let mut acc = q.one_like();
    for a in list {
        acc = acc.mul(&qpoch(a, q, k, cfg)?);
    }
    Ok(acc)
}

/// A truncated infinite product together with the number of factors used.
#[derive(Debug, Clone)]
pub struct InfProduct<T> {
    pub value: T,
    pub factors: usize,
}

/// Number of factors `J` needed so that `|a q^J| / (1 - |q|) < eps`.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn inf_factors<T: Field>(a: &T, q: &T, cfg: &NumericConfig) -> Result<usize> {
    let lq = q.log2_abs();
    // Negated so that NaN is rejected too.
    if !(lq < 0.0) {
        return Err(Error::ConstraintViolated("infinite product requires |q| < 1".into()));
    }
    if a.is_zero() {
        return Ok(0);
    }
    let one_minus_q = q.abs().one_minus().log2_abs();
    // J*log2|q| < log2(eps) + log2(1-|q|) - log2|a|
    let rhs = cfg.epsilon_tail.log2() + one_minus_q - a.log2_abs();
    let j = if rhs > 0.0 { 0 } else { (rhs / lq).floor() as usize + 1 };
    if j > cfg.max_terms {
        return Err(Error::NoConvergence { terms: cfg.max_terms, reason: format!("(a;q)_inf needs {j} factors") });
    }
    Ok(j)
}

/// `(a; q)_∞` truncated at the first `J` with `|a q^J|/(1-|q|) < epsilon_tail`.
///
/// Meant for the float backend; the scalar-level wrapper refuses exact input.
pub fn qpoch_inf<T: Field>(a: &T, q: &T, cfg: &NumericConfig) -> Result<InfProduct<T>> {
    let factors = inf_factors(a, q, cfg)?;
    let value = prefix(a, &a.one_like(), q, factors, cfg.pole_floor).prod;
    Ok(InfProduct { value, factors })
}

/// `x^e` for any integer `e` by binary exponentiation.
pub fn pow_int<T: Field>(x: &T, e: i64) -> Result<T> {
    let mut base = x.clone();
    let mut n = e.unsigned_abs();
    let mut acc = x.one_like();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc.mul(&base);
        }
        n >>= 1;
        if n > 0 {
            base = base.mul(&base);
        }
    }
    if e < 0 {
        if acc.is_zero() {
            return Err(Error::DivisionByZero("zero raised to a negative power".into()));
        }
        acc = x.one_like().div(&acc);
    }
    Ok(acc)
}

/// Cache of `q^t` over a growing window of integer exponents.
#[derive(Debug, Clone)]
pub struct PowTable<T> {
    q: T,
    qinv: Option<T>,
    pos: Vec<T>,
    neg: Vec<T>,
}

impl<T: Field> PowTable<T> {
    pub fn new(q: &T) -> Self {
        let qinv = (!q.is_zero()).then(|| q.one_like().div(q));
        PowTable { q: q.clone(), qinv, pos: vec![q.one_like()], neg: vec![q.one_like()] }
    }

    /// `q^t`, computed by repeated multiplication from `q^0`.
    pub fn get(&mut self, t: i64) -> Result<T> {
        if t >= 0 {
            let t = t as usize;
            while self.pos.len() <= t {
                let next = self.pos.last().unwrap().mul(&self.q);
                self.pos.push(next);
            }
            Ok(self.pos[t].clone())
        } else {
            let qinv = self.qinv.clone().ok_or_else(|| Error::DivisionByZero("negative power of q = 0".into()))?;
            let n = t.unsigned_abs() as usize;
            while self.neg.len() <= n {
                let next = self.neg.last().unwrap().mul(&qinv);
                self.neg.push(next);
            }
            Ok(self.neg[n].clone())
        }
    }
}

/// Lazily extended values of `(a; q)_k` for one base `a`.
///
/// Positive indices store prefix products; negative indices store the
/// products `∏_{j=1}^{n}(1 - a q^{-j})`, whose reciprocal is `(a)_{-n}`.
#[derive(Debug, Clone)]
pub struct PochTable<T> {
    a: T,
    q: T,
    qinv: Option<T>,
    floor: f64,
    pos: Vec<T>,
    pos_qj: T,
    pos_pole: Option<usize>,
    neg: Vec<T>,
    neg_qj: Option<T>,
    neg_pole: Option<usize>,
}

impl<T: Field> PochTable<T> {
    pub fn new(a: &T, q: &T, cfg: &NumericConfig) -> Self {
        let qinv = (!q.is_zero()).then(|| q.one_like().div(q));
        PochTable {
            a: a.clone(),
            q: q.clone(),
            neg_qj: qinv.clone(),
            qinv,
            floor: cfg.pole_floor,
            pos: vec![a.one_like()],
            pos_qj: a.one_like(),
            pos_pole: None,
            neg: vec![a.one_like()],
            neg_pole: None,
        }
    }

    pub fn base(&self) -> &T {
        &self.a
    }

    fn extend_pos(&mut self, k: usize) {
        while self.pos.len() <= k {
            let f = self.a.mul(&self.pos_qj).one_minus();
            if self.pos_pole.is_none() && f.is_pole(self.floor) {
                self.pos_pole = Some(self.pos.len());
            }
            let next = self.pos.last().unwrap().mul(&f);
            self.pos.push(next);
            self.pos_qj = self.pos_qj.mul(&self.q);
        }
    }

    fn extend_neg(&mut self, n: usize) -> Result<()> {
        let qinv = self.qinv.clone().ok_or_else(|| Error::DivisionByZero("negative index with q = 0".into()))?;
        while self.neg.len() <= n {
            let qj = self.neg_qj.as_ref().expect("set together with qinv");
            let f = self.a.mul(qj).one_minus();
            if self.neg_pole.is_none() && f.is_pole(self.floor) {
                self.neg_pole = Some(self.neg.len());
            }
            let next = self.neg.last().unwrap().mul(&f);
            self.neg.push(next);
            self.neg_qj = Some(qj.mul(&qinv));
        }
        Ok(())
    }

    /// `(a)_k` for `k >= 0`, or the product whose reciprocal is `(a)_k` for `k < 0`.
    /// The flag tells whether a pole occurs among the factors used.
    fn raw(&mut self, k: i64) -> Result<(&T, bool)> {
        if k >= 0 {
            let k = k as usize;
            self.extend_pos(k);
            Ok((&self.pos[k], self.pos_pole.is_some_and(|j| j <= k)))
        } else {
            let n = k.unsigned_abs() as usize;
            self.extend_neg(n)?;
            Ok((&self.neg[n], self.neg_pole.is_some_and(|j| j <= n)))
        }
    }

    /// `(a)_k`; matches [`qpoch`] bit for bit.
    pub fn get(&mut self, k: i64) -> Result<T> {
        let one = self.a.one_like();
        let (v, pole) = self.raw(k)?;
        if k >= 0 {
            return Ok(v.clone());
        }
        if pole {
            return Err(Error::DivisionByZero(format!("(a;q)_{k} has a vanishing factor")));
        }
        Ok(one.div(v))
    }
}

/// A value kept as numerator and denominator so products of many
/// q-shifted factorials need a single division.
#[derive(Debug, Clone)]
pub struct Frac<T> {
    pub num: T,
    pub den: T,
}

impl<T: Field> Frac<T> {
    pub fn one(like: &T) -> Self {
        Frac { num: like.one_like(), den: like.one_like() }
    }

    pub fn mul(&mut self, x: &T) {
        self.num = self.num.mul(x);
    }

    /// Divides by `x`, rejecting poles.
    pub fn div(&mut self, x: &T, floor: f64, what: &str) -> Result<()> {
        if x.is_pole(floor) {
            return Err(Error::Pole(what.to_string()));
        }
        self.den = self.den.mul(x);
        Ok(())
    }

    /// Multiplies by `(a)_k` read from `table`.
    pub fn times_poch(&mut self, table: &mut PochTable<T>, k: i64) -> Result<()> {
        let (v, pole) = table.raw(k)?;
        if k >= 0 {
            self.num = self.num.mul(v);
        } else {
            if pole {
                return Err(Error::Pole(format!("numerator (a;q)_{k}")));
            }
            self.den = self.den.mul(v);
        }
        Ok(())
    }

    /// Divides by `(a)_k` read from `table`.
    pub fn over_poch(&mut self, table: &mut PochTable<T>, k: i64) -> Result<()> {
        let (v, pole) = table.raw(k)?;
        if k >= 0 {
            if pole {
                return Err(Error::Pole(format!("denominator (a;q)_{k}")));
            }
            self.den = self.den.mul(v);
        } else {
            // 1/(a)_{-n} is a finite product and may legitimately vanish;
            // a factor below the pole floor counts as an exact zero.
            self.num = if pole { self.num.zero_like() } else { self.num.mul(v) };
        }
        Ok(())
    }

    pub fn value(&self) -> Result<T> {
        if self.den.is_zero() {
            return Err(Error::Pole("denominator underflowed to zero".into()));
        }
        Ok(self.num.div(&self.den))
    }
}

/// Running product of scalars and q-shifted factorials, each factorial
/// evaluated from scratch.
#[derive(Debug, Clone)]
pub struct Product<'a, T> {
    frac: Frac<T>,
    q: &'a T,
    cfg: &'a NumericConfig,
}

impl<'a, T: Field> Product<'a, T> {
    pub fn new(q: &'a T, cfg: &'a NumericConfig) -> Self {
        Product { frac: Frac::one(q), q, cfg }
    }

    /// Multiplies by `(a)_k`.
    pub fn up(&mut self, a: &T, k: i64) -> Result<&mut Self> {
        self.frac.times_poch(&mut PochTable::new(a, self.q, self.cfg), k)?;
        Ok(self)
    }

    /// Divides by `(a)_k`.
    pub fn down(&mut self, a: &T, k: i64) -> Result<&mut Self> {
        self.frac.over_poch(&mut PochTable::new(a, self.q, self.cfg), k)?;
        Ok(self)
    }

    pub fn mul(&mut self, x: &T) -> &mut Self {
        self.frac.mul(x);
        self
    }

    pub fn div(&mut self, x: &T, what: &str) -> Result<&mut Self> {
        self.frac.div(x, self.cfg.pole_floor, what)?;
        Ok(self)
    }

    pub fn value(&self) -> Result<T> {
        self.frac.value()
    }
}
