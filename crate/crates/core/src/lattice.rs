//! Points of Z^r, summation domains, and the A_r cross-term products.

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{poch, pow_int, Field, NumericConfig, PowTable, Scalar};

/// A point `k ∈ Z^r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Schema("multi-index needs r >= 1 entries".into()));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zeros(r: usize) -> Self {
        MultiIndex(vec![0; r.max(1)])
    }

    pub fn r(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0[i]
    }

    /// `|k| = k_1 + ... + k_r`.
    pub fn abs(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn e2(&self) -> i64 {
        e2(self)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.r() == other.r() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|v| v.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        MultiIndex(v)
    }
}

/// Second elementary symmetric function `Σ_{i<j} k_i k_j`.
pub fn e2(k: &MultiIndex) -> i64 {
    // Σ_{i<j} k_i k_j via a running prefix sum.
    let mut prefix = 0i64;
    let mut acc = 0i64;
    for &v in k.entries() {
        acc += prefix * v;
        prefix += v;
    }
    acc
}

/// `C(n, 2)` extended polynomially to all integers.
pub fn binom2(n: i64) -> i64 {
    n * (n - 1) / 2
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SummationDomain {
    /// `0 <= k_i <= n_i`.
    Box(MultiIndex),
    /// `k_i >= 0`, `|k| <= n`.
    Simplex { n: u32, r: usize },
    /// `k_i >= 0`, unbounded.
    Unilateral(usize),
    /// `k ∈ Z^r`.
    Bilateral(usize),
}

impl SummationDomain {
    pub fn r(&self) -> usize {
        match self {
            SummationDomain::Box(n) => n.r(),
            SummationDomain::Simplex { r, .. } => *r,
            SummationDomain::Unilateral(r) | SummationDomain::Bilateral(r) => *r,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SummationDomain::Box(_) => "box",
            SummationDomain::Simplex { .. } => "simplex",
            SummationDomain::Unilateral(_) => "unilateral",
            SummationDomain::Bilateral(_) => "bilateral",
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, SummationDomain::Box(_) | SummationDomain::Simplex { .. })
    }
}

/// Lexicographic iterator over a finite domain.
#[derive(Debug, Clone)]
pub struct DomainIter {
    lo: Vec<i64>,
    hi: Vec<i64>,
    sum_cap: Option<i64>,
    next: Option<Vec<i64>>,
}

impl DomainIter {
    fn boxed(lo: Vec<i64>, hi: Vec<i64>, sum_cap: Option<i64>) -> Self {
        let empty = lo.iter().zip(&hi).any(|(a, b)| a > b) || sum_cap.is_some_and(|c| lo.iter().sum::<i64>() > c);
        let next = (!empty).then(|| lo.clone());
        DomainIter { lo, hi, sum_cap, next }
    }

    fn advance(&self, cur: &[i64]) -> Option<Vec<i64>> {
        let mut k = cur.to_vec();
        for p in (0..k.len()).rev() {
            if k[p] < self.hi[p] {
                k[p] += 1;
                k[p + 1..].copy_from_slice(&self.lo[p + 1..]);
                if self.sum_cap.is_none_or(|c| k.iter().sum::<i64>() <= c) {
                    return Some(k);
                }
            }
        }
        None
    }
}

impl Iterator for DomainIter {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let cur = self.next.take()?;
        self.next = self.advance(&cur);
        Some(MultiIndex(cur))
    }
}

/// Every lattice point of a finite domain, once, in lexicographic order.
pub fn iterate(domain: &SummationDomain) -> Result<DomainIter> {
    match domain {
        SummationDomain::Box(n) => Ok(DomainIter::boxed(vec![0; n.r()], n.entries().to_vec(), None)),
        SummationDomain::Simplex { n, r } => Ok(DomainIter::boxed(vec![0; *r], vec![*n as i64; *r], Some(*n as i64))),
        _ => Err(Error::InfiniteDomain),
    }
}

/// All `l` with `lo <= l <= hi` componentwise.
pub fn box_between(lo: &MultiIndex, hi: &MultiIndex) -> DomainIter {
    DomainIter::boxed(lo.entries().to_vec(), hi.entries().to_vec(), None)
}

/// Points `k >= 0` with `|k| = layer`, lexicographic.
pub fn layer(r: usize, layer: u32) -> impl Iterator<Item = MultiIndex> {
    let l = layer as i64;
    DomainIter::boxed(vec![0; r], vec![l; r], Some(l)).filter(move |k| k.abs() == l)
}

/// Points with `inner < max_i |k_i| <= outer`, lexicographic. `inner < 0`
/// includes the origin.
pub fn shell(r: usize, inner: i64, outer: i64) -> impl Iterator<Item = MultiIndex> {
    DomainIter::boxed(vec![-outer; r], vec![outer; r], None).filter(move |k| k.max_abs() > inner)
}

/// Precomputed pieces of `∏_{i<j}(1 - q^{k_i-k_j} x_i/x_j)/(1 - x_i/x_j)`.
#[derive(Debug, Clone)]
pub struct CrossRatio<T> {
    ratios: Vec<(usize, usize, T)>,
    den: T,
}

impl<T: Field> CrossRatio<T> {
    pub fn new(x: &[T], cfg: &NumericConfig) -> Result<Self> {
        let one = match x.first() {
            Some(v) => v.one_like(),
            None => return Err(Error::Schema("empty x vector".into())),
        };
        let mut ratios = Vec::new();
        let mut den = one.clone();
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                if x[j].is_pole(cfg.pole_floor) {
                    return Err(Error::Pole(format!("x_{} = 0", j + 1)));
                }
                let t = x[i].div(&x[j]);
                let f = t.one_minus();
                if f.is_pole(cfg.pole_floor) {
                    return Err(Error::Pole(format!("1 - x_{}/x_{}", i + 1, j + 1)));
                }
                den = den.mul(&f);
                ratios.push((i, j, t));
            }
        }
        Ok(CrossRatio { ratios, den })
    }

    /// The numerator `∏_{i<j}(1 - q^{k_i-k_j} x_i/x_j)`.
    pub fn numerator(&self, k: &[i64], pows: &mut PowTable<T>) -> Result<T> {
        let mut acc = self.den.one_like();
        for (i, j, t) in &self.ratios {
            acc = acc.mul(&pows.get(k[*i] - k[*j])?.mul(t).one_minus());
        }
        Ok(acc)
    }

    /// The constant denominator `∏_{i<j}(1 - x_i/x_j)`.
    pub fn denominator(&self) -> &T {
        &self.den
    }

    pub fn eval(&self, k: &[i64], pows: &mut PowTable<T>) -> Result<T> {
        Ok(self.numerator(k, pows)?.div(&self.den))
    }
}

/// Generic form of [`ar_cross_ratio`].
pub fn cross_ratio<T: Field>(k: &MultiIndex, x: &[T], q: &T, cfg: &NumericConfig) -> Result<T> {
    if x.len() != k.r() {
        return Err(Error::Schema(format!("x has {} entries, k has {}", x.len(), k.r())));
    }
    CrossRatio::new(x, cfg)?.eval(k.entries(), &mut PowTable::new(q))
}

/// `∏_{i<j}(1 - q^{k_i-k_j} x_i/x_j)/(1 - x_i/x_j)`.
pub fn ar_cross_ratio(k: &MultiIndex, x: &[Scalar], q: &Scalar, cfg: &NumericConfig) -> Result<Scalar> {
    match q {
        Scalar::Exact(qv) => {
            let xs = unwrap_all::<BigRational>(x)?;
            cross_ratio(k, &xs, qv, cfg).map(Field::into_scalar)
        }
        Scalar::Float(qv) => {
            let xs = unwrap_all(x)?;
            cross_ratio(k, &xs, qv, cfg).map(Field::into_scalar)
        }
    }
}

pub(crate) fn unwrap_all<T: Field>(xs: &[Scalar]) -> Result<Vec<T>> {
    xs.iter().map(T::from_scalar).collect()
}

/// Rejects `x` vectors with some `x_i/x_j = q^t`, `|t| <= reach`, `i != j`,
/// which would put a pole somewhere in a sum reaching that far.
pub fn validate_x<T: Field>(x: &[T], q: &T, reach: i64, cfg: &NumericConfig) -> Result<()> {
    let mut pows = PowTable::new(q);
    for i in 0..x.len() {
        for j in 0..x.len() {
            if i == j {
                continue;
            }
            let t = x[i].div(&x[j]);
            for s in -reach..=reach {
                if pows.get(s)?.mul(&t).one_minus().is_pole(cfg.pole_floor) {
                    return Err(Error::ConstraintViolated(format!("x_{}/x_{} = q^{}", i + 1, j + 1, -s)));
                }
            }
        }
    }
    Ok(())
}

fn exact_args(x: &[Scalar], q: &Scalar) -> Result<(Vec<BigRational>, BigRational)> {
    let q = q.as_exact().ok_or_else(|| Error::BackendMismatch("lemma checks run in the exact backend".into()))?.clone();
    Ok((unwrap_all(x)?, q))
}

/// Checks the telescoping product identity
///
/// `∏_{i<j}(1-q^{k_i-k_j}x_i/x_j)/(1-q^{l_i-l_j}x_i/x_j)
///   · ∏_{i,j}(q^{l_i-k_j}x_i/x_j)_{k_i-l_i}/(q^{1+l_i-l_j}x_i/x_j)_{k_i-l_i}
///   = (-1)^{|k|-|l|} q^{-C(|k|-|l|,2) - Σ i(k_i-l_i)}`
///
/// exactly, for `l <= k`.
pub fn check_telescoping_lemma(
    k: &MultiIndex,
    l: &MultiIndex,
    x: &[Scalar],
    q: &Scalar,
    cfg: &NumericConfig,
) -> Result<bool> {
    let (x, q) = exact_args(x, q)?;
    if k.r() != l.r() || x.len() != k.r() {
        return Err(Error::Schema("k, l and x must share r".into()));
    }
    if !l.le(k) {
        return Err(Error::ConstraintViolated(format!("l = {l} is not <= k = {k}")));
    }
    let r = k.r();
    let (kk, ll) = (k.entries(), l.entries());
    let mut pows = PowTable::new(&q);
    let mut num = q.one_like();
    let mut den = q.one_like();
    for i in 0..r {
        for j in i + 1..r {
            let t = x[i].div(&x[j]);
            num = num.mul(&pows.get(kk[i] - kk[j])?.mul(&t).one_minus());
            den = den.mul(&pows.get(ll[i] - ll[j])?.mul(&t).one_minus());
        }
    }
    for i in 0..r {
        for j in 0..r {
            let t = x[i].div(&x[j]);
            let m = kk[i] - ll[i];
            num = num.mul(&poch::qpoch(&pows.get(ll[i] - kk[j])?.mul(&t), &q, m, cfg)?);
            den = den.mul(&poch::qpoch(&pows.get(1 + ll[i] - ll[j])?.mul(&t), &q, m, cfg)?);
        }
    }
    if Field::is_zero(&den) {
        return Err(Error::Pole("telescoping product denominator".into()));
    }
    let d = k.abs() - l.abs();
    let weighted: i64 = (0..r).map(|i| (i as i64 + 1) * (kk[i] - ll[i])).sum();
    let mut rhs = pow_int(&q, -binom2(d) - weighted)?;
    if d % 2 != 0 {
        rhs = Field::neg(&rhs);
    }
    Ok(Field::div(&num, &den) == rhs)
}

/// Checks, exactly,
///
/// `∏_{i,j}(q x_i/x_j)_{m_j-m_i} = (-1)^{(r-1)|m|} q^{-C(|m|+1,2) + rΣC(m_i+1,2)}
///   q^{-Σ(i-1)m_i} ∏ x_i^{|m|-r m_i} ∏_{i<j}(1-q^{m_j-m_i}x_i/x_j)/(1-x_i/x_j)`.
pub fn check_milne_lem312(m: &MultiIndex, x: &[Scalar], q: &Scalar, cfg: &NumericConfig) -> Result<bool> {
    let (x, q) = exact_args(x, q)?;
    if x.len() != m.r() {
        return Err(Error::Schema("m and x must share r".into()));
    }
    let r = m.r();
    let mm = m.entries();
    let mut lhs = q.one_like();
    for i in 0..r {
        for j in 0..r {
            let base = q.mul(&x[i]).div(&x[j]);
            lhs = lhs.mul(&poch::qpoch(&base, &q, mm[j] - mm[i], cfg)?);
        }
    }
    let total = m.abs();
    let r64 = r as i64;
    let exp = -binom2(total + 1) + r64 * mm.iter().map(|&v| binom2(v + 1)).sum::<i64>()
        - (0..r).map(|i| i as i64 * mm[i]).sum::<i64>();
    let mut rhs = pow_int(&q, exp)?;
    for i in 0..r {
        rhs = rhs.mul(&pow_int(&x[i], total - r64 * mm[i])?);
    }
    let mut pows = PowTable::new(&q);
    for i in 0..r {
        for j in i + 1..r {
            let t = x[i].div(&x[j]);
            let d = t.one_minus();
            if Field::is_zero(&d) {
                return Err(Error::Pole(format!("1 - x_{}/x_{}", i + 1, j + 1)));
            }
            rhs = rhs.mul(&pows.get(mm[j] - mm[i])?.mul(&t).one_minus()).div(&d);
        }
    }
    if ((r64 - 1) * total) % 2 != 0 {
        rhs = Field::neg(&rhs);
    }
    Ok(lhs == rhs)
}
