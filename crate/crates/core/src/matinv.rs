//! Multidimensional matrix inverse pairs and the inverse-relation engine.
//!
//! Lower-triangularity is structural: entry functions are only called with
//! `k <= n`, the drivers never evaluate them elsewhere.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice::{binom2, box_between, MultiIndex};
use crate::numerics::{pow_int, Field, NumericConfig, Product};
use crate::par::{self, Exec};

/// A scalar sequence indexed by `t ∈ Z`.
#[derive(Debug, Clone)]
pub enum Seq<T> {
    /// `base * ratio^t`.
    Geometric { base: T, ratio: T },
    /// Explicit values for `t = start, start+1, ...`.
    Table { start: i64, values: Vec<T> },
}

impl<T: Field> Seq<T> {
    pub fn at(&self, t: i64) -> Result<T> {
        match self {
            Seq::Geometric { base, ratio } => Ok(base.mul(&pow_int(ratio, t)?)),
            Seq::Table { start, values } => {
                let hi = start + values.len() as i64 - 1;
                if t < *start || t > hi {
                    return Err(Error::Range { index: t, lo: *start, hi });
                }
                Ok(values[(t - start) as usize].clone())
            }
        }
    }
}

/// The sequences `a_t` and `c_1(t), ..., c_r(t)` of the general inverse.
#[derive(Debug, Clone)]
pub struct SequenceSpec<T> {
    pub a: Seq<T>,
    pub c: Vec<Seq<T>>,
}

impl<T: Field> SequenceSpec<T> {
    pub fn r(&self) -> usize {
        self.c.len()
    }

    fn c_at(&self, k: &MultiIndex) -> Result<Vec<T>> {
        (0..self.r()).map(|j| self.c[j].at(k.get(j))).collect()
    }
}

fn product<T: Field>(v: &[T]) -> T {
    let mut it = v.iter();
    let first = it.next().expect("r >= 1").clone();
    it.fold(first, |acc, x| acc.mul(x))
}

/// `(1 - a_t C(k)) ∏_j (a_t - c_j(k_j))` or its `c_i(t)` analogue.
fn block<T: Field>(v: &T, ck: &[T], cprod: &T) -> T {
    let mut acc = v.mul(cprod).one_minus();
    for c in ck {
        acc = acc.mul(&v.sub(c));
    }
    acc
}

fn check_shapes(n: &MultiIndex, k: &MultiIndex, r: usize) -> Result<()> {
    if n.r() != r || k.r() != r {
        return Err(Error::Schema(format!("indices must have r = {r} entries")));
    }
    if !k.le(n) {
        return Err(Error::ConstraintViolated(format!("{k} is not <= {n}")));
    }
    Ok(())
}

/// Entry `f_{nk}` of the general A_r matrix inverse.
pub fn f_general<T: Field>(n: &MultiIndex, k: &MultiIndex, s: &SequenceSpec<T>, cfg: &NumericConfig) -> Result<T> {
    check_shapes(n, k, s.r())?;
    let ck = s.c_at(k)?;
    let cprod = product(&ck);
    let mut num = cprod.one_like();
    for t in k.abs()..n.abs() {
        num = num.mul(&block(&s.a.at(t)?, &ck, &cprod));
    }
    let mut den = cprod.one_like();
    for i in 0..s.r() {
        for t in k.get(i) + 1..=n.get(i) {
            let f = block(&s.c[i].at(t)?, &ck, &cprod);
            if f.is_pole(cfg.pole_floor) {
                return Err(Error::Pole(format!("f denominator at i={}, t={t}", i + 1)));
            }
            den = den.mul(&f);
        }
    }
    Ok(num.div(&den))
}

/// Entry `g_{kl}` of the general A_r matrix inverse.
pub fn g_general<T: Field>(k: &MultiIndex, l: &MultiIndex, s: &SequenceSpec<T>, cfg: &NumericConfig) -> Result<T> {
    check_shapes(k, l, s.r())?;
    let r = s.r();
    let ck = s.c_at(k)?;
    let cl = s.c_at(l)?;
    let pk = product(&ck);
    let pl = product(&cl);
    let one = pk.one_like();
    let mut num = one.clone();
    let mut den = one.clone();
    let push_den = |den: &mut T, f: T, what: &dyn Fn() -> String| -> Result<()> {
        if f.is_pole(cfg.pole_floor) {
            return Err(Error::Pole(format!("g denominator {}", what())));
        }
        *den = den.mul(&f);
        Ok(())
    };
    for i in 0..r {
        for j in i + 1..r {
            num = num.mul(&cl[i].sub(&cl[j]));
            push_den(&mut den, ck[i].sub(&ck[j]), &|| format!("c_{}(k) - c_{}(k)", i + 1, j + 1))?;
        }
    }
    let al = s.a.at(l.abs())?;
    let ak = s.a.at(k.abs())?;
    num = num.mul(&block(&al, &cl, &pl));
    push_den(&mut den, block(&ak, &ck, &pk), &|| "at t = |k|".to_string())?;
    for t in l.abs() + 1..=k.abs() {
        num = num.mul(&block(&s.a.at(t)?, &ck, &pk));
    }
    for i in 0..r {
        for t in l.get(i)..k.get(i) {
            let f = block(&s.c[i].at(t)?, &ck, &pk);
            push_den(&mut den, f, &|| format!("i={}, t={t}", i + 1))?;
        }
    }
    Ok(num.div(&den))
}

/// Parameters of the `(a, b, x)` inverse pair.
#[derive(Debug, Clone)]
pub struct MmicParams<T> {
    pub a: T,
    pub b: T,
    pub x: Vec<T>,
    pub q: T,
}

impl<T: Field> MmicParams<T> {
    pub fn r(&self) -> usize {
        self.x.len()
    }

    fn qp(&self, e: i64) -> Result<T> {
        pow_int(&self.q, e)
    }
}

/// Entry `f_{nk}` of the `(a, b, x)` inverse pair.
pub fn f_mmic<T: Field>(n: &MultiIndex, k: &MultiIndex, p: &MmicParams<T>, cfg: &NumericConfig) -> Result<T> {
    check_shapes(n, k, p.r())?;
    let (nn, kk) = (n.abs(), k.abs());
    let ab = p.a.mul(&p.b);
    let mut acc = Product::new(&p.q, cfg);
    acc.up(&ab.mul(&p.qp(2 * kk)?), nn - kk)?;
    for i in 0..p.r() {
        let ki = k.get(i);
        acc.up(&p.a.mul(&p.qp(kk - ki)?).div(&p.x[i]), nn - kk)?;
        acc.down(&p.b.mul(&p.x[i]).mul(&p.qp(1 + ki + kk)?), n.get(i) - ki)?;
        for j in 0..p.r() {
            let base = p.qp(1 + ki - k.get(j))?.mul(&p.x[i]).div(&p.x[j]);
            acc.down(&base, n.get(i) - ki)?;
        }
    }
    acc.value()
}

/// Entry `g_{kl}` of the `(a, b, x)` inverse pair.
pub fn g_mmic<T: Field>(k: &MultiIndex, l: &MultiIndex, p: &MmicParams<T>, cfg: &NumericConfig) -> Result<T> {
    check_shapes(k, l, p.r())?;
    let (kk, ll) = (k.abs(), l.abs());
    let d = kk - ll;
    let ab = p.a.mul(&p.b);
    let mut acc = Product::new(&p.q, cfg);
    let mut sign = p.qp(binom2(d))?;
    if d % 2 != 0 {
        sign = sign.neg();
    }
    acc.mul(&sign);
    acc.mul(&ab.mul(&p.qp(2 * ll)?).one_minus());
    acc.div(&ab.mul(&p.qp(2 * kk)?).one_minus(), "1 - ab q^{2|k|}")?;
    acc.up(&ab.mul(&p.qp(1 + ll + kk)?), d)?;
    for i in 0..p.r() {
        let (ki, li) = (k.get(i), l.get(i));
        acc.mul(&p.a.mul(&p.qp(ll - li)?).div(&p.x[i]).one_minus());
        acc.div(&p.a.mul(&p.qp(kk - ki)?).div(&p.x[i]).one_minus(), "1 - a q^{|k|-k_i}/x_i")?;
        acc.up(&p.a.mul(&p.qp(1 + ll - ki)?).div(&p.x[i]), d)?;
        acc.down(&p.b.mul(&p.x[i]).mul(&p.qp(li + kk)?), ki - li)?;
        for j in 0..p.r() {
            let base = p.qp(1 + li - l.get(j))?.mul(&p.x[i]).div(&p.x[j]);
            acc.down(&base, ki - li)?;
        }
    }
    acc.value()
}

/// A pair of mutually inverse lower-triangular matrices.
#[derive(Debug, Clone)]
pub enum MatrixPair<T> {
    General(SequenceSpec<T>),
    Mmic(MmicParams<T>),
}

impl<T: Field> MatrixPair<T> {
    pub fn r(&self) -> usize {
        match self {
            MatrixPair::General(s) => s.r(),
            MatrixPair::Mmic(p) => p.r(),
        }
    }

    pub fn f(&self, n: &MultiIndex, k: &MultiIndex, cfg: &NumericConfig) -> Result<T> {
        match self {
            MatrixPair::General(s) => f_general(n, k, s, cfg),
            MatrixPair::Mmic(p) => f_mmic(n, k, p, cfg),
        }
    }

    pub fn g(&self, k: &MultiIndex, l: &MultiIndex, cfg: &NumericConfig) -> Result<T> {
        match self {
            MatrixPair::General(s) => g_general(k, l, s, cfg),
            MatrixPair::Mmic(p) => g_mmic(k, l, p, cfg),
        }
    }
}

/// The general pair specialised so that it reproduces the `(a, b, x)` pair:
/// `a_t = w a q^t`, `c_i(t) = w x_i q^t` and `b = w^{r+1} x_1 ⋯ x_r`.
pub fn mmic_as_general<T: Field>(a: &T, w: &T, x: &[T], q: &T) -> Result<(SequenceSpec<T>, MmicParams<T>)> {
    let geo = |base: T| Seq::Geometric { base, ratio: q.clone() };
    let spec = SequenceSpec { a: geo(w.mul(a)), c: x.iter().map(|xi| geo(w.mul(xi))).collect() };
    let mut b = pow_int(w, x.len() as i64 + 1)?;
    for xi in x {
        b = b.mul(xi);
    }
    Ok((spec, MmicParams { a: a.clone(), b, x: x.to_vec(), q: q.clone() }))
}

/// Outcome of a batch of equalities.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub checks: usize,
    pub failure: Option<CheckFailure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckFailure {
    pub at: String,
    pub residual: String,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn into_result(self) -> Result<CheckReport> {
        match &self.failure {
            None => Ok(self),
            Some(f) => Err(Error::ReportedMismatch { at: f.at.clone(), residual: f.residual.clone() }),
        }
    }

    fn merge(name: &str, parts: Vec<Result<(usize, Option<CheckFailure>)>>) -> Result<CheckReport> {
        let mut checks = 0;
        let mut failure = None;
        for p in parts {
            let (c, f) = p?;
            checks += c;
            if failure.is_none() {
                failure = f;
            }
        }
        Ok(CheckReport { name: name.to_string(), checks, failure })
    }
}

/// Exact equality for the exact backend; relative error within
/// `2^-(precision-16)` for floats. Returns the verdict and `lhs - rhs`.
pub fn agree<T: Field>(lhs: &T, rhs: &T) -> (bool, T) {
    let diff = lhs.sub(rhs);
    let ok = match lhs.backend() {
        crate::numerics::Backend::Exact => diff.is_zero(),
        crate::numerics::Backend::Float { precision_bits } => {
            let scale = rhs.log2_abs().max(0.0);
            diff.is_zero() || diff.log2_abs() - scale <= -(precision_bits as f64 - 16.0)
        }
    };
    (ok, diff)
}

fn locate(e: Error, at: &dyn Fn() -> String) -> Error {
    match e {
        Error::Pole(m) => Error::Pole(format!("{m} at {}", at())),
        Error::DivisionByZero(m) => Error::DivisionByZero(format!("{m} at {}", at())),
        other => other,
    }
}

/// Checks `Σ_{n≥k≥l} f_{nk} g_{kl} = δ_{nl}` and the dual
/// `Σ_{n≥k≥l} g_{nk} f_{kl} = δ_{nl}` for all `0 <= l <= n <= bound`.
pub fn verify_orthogonality<T: Field>(
    pair: &MatrixPair<T>,
    bound: &MultiIndex,
    cfg: &NumericConfig,
    exec: Exec,
) -> Result<CheckReport> {
    if bound.r() != pair.r() || bound.entries().iter().any(|&v| v < 0) {
        return Err(Error::Schema("bound must be a nonnegative index with the pair's r".into()));
    }
    let zero = MultiIndex::zeros(bound.r());
    let ns: Vec<MultiIndex> = box_between(&zero, bound).collect();
    // Each entry appears in many sums; evaluate every (n, k) once.
    let rows = par::map(exec, ns.clone(), |n| -> Result<Vec<(MultiIndex, T, T)>> {
        box_between(&zero, &n)
            .map(|k| {
                let at = || format!("n={n}, k={k}");
                let f = pair.f(&n, &k, cfg).map_err(|e| locate(e, &at))?;
                let g = pair.g(&n, &k, cfg).map_err(|e| locate(e, &at))?;
                Ok((k, f, g))
            })
            .collect()
    });
    let mut f = HashMap::new();
    let mut g = HashMap::new();
    for (n, row) in ns.iter().zip(rows) {
        for (k, fv, gv) in row? {
            f.insert((n.clone(), k.clone()), fv);
            g.insert((n.clone(), k), gv);
        }
    }
    let entry =
        |m: &HashMap<(MultiIndex, MultiIndex), T>, a: &MultiIndex, b: &MultiIndex| m[&(a.clone(), b.clone())].clone();
    let parts = par::map(exec, ns, |n| -> Result<(usize, Option<CheckFailure>)> {
        let mut checks = 0;
        for l in box_between(&zero, &n) {
            let mut primal: Option<T> = None;
            let mut dual: Option<T> = None;
            for k in box_between(&l, &n) {
                let p = entry(&f, &n, &k).mul(&entry(&g, &k, &l));
                let d = entry(&g, &n, &k).mul(&entry(&f, &k, &l));
                primal = Some(primal.map_or(p.clone(), |s| s.add(&p)));
                dual = Some(dual.map_or(d.clone(), |s| s.add(&d)));
            }
            let (primal, dual) = (primal.expect("k = l term"), dual.expect("k = l term"));
            let delta = if n == l { primal.one_like() } else { primal.zero_like() };
            for (which, sum) in [("f*g", primal), ("g*f", dual)] {
                checks += 1;
                let (ok, diff) = agree(&sum, &delta);
                if !ok {
                    let at = format!("{which} n={n}, l={l}");
                    return Ok((checks, Some(CheckFailure { at, residual: diff.render() })));
                }
            }
        }
        Ok((checks, None))
    });
    CheckReport::merge("orthogonality", parts)
}

/// Checks that the general pair under the geometric substitution of
/// [`mmic_as_general`] equals the `(a, b, x)` pair entry by entry.
pub fn substitution_check<T: Field>(
    a: &T,
    w: &T,
    x: &[T],
    q: &T,
    bound: &MultiIndex,
    cfg: &NumericConfig,
) -> Result<CheckReport> {
    let (spec, mm) = mmic_as_general(a, w, x, q)?;
    let zero = MultiIndex::zeros(bound.r());
    let mut checks = 0;
    for n in box_between(&zero, bound) {
        for k in box_between(&zero, &n) {
            let pairs = [
                ("f", f_general(&n, &k, &spec, cfg)?, f_mmic(&n, &k, &mm, cfg)?),
                ("g", g_general(&n, &k, &spec, cfg)?, g_mmic(&n, &k, &mm, cfg)?),
            ];
            for (which, gen, spec_form) in pairs {
                checks += 1;
                let (ok, diff) = agree(&gen, &spec_form);
                if !ok {
                    return Ok(CheckReport {
                        name: "substitution".into(),
                        checks,
                        failure: Some(CheckFailure { at: format!("{which} n={n}, k={k}"), residual: diff.render() }),
                    });
                }
            }
        }
    }
    Ok(CheckReport { name: "substitution".into(), checks, failure: None })
}

/// Parameters of the inverse-relation replay.
#[derive(Debug, Clone)]
pub struct RelationParams<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub x: Vec<T>,
    pub q: T,
}

/// The sequence `a_k` whose `f`-transform is `b_n`.
pub fn relation_a<T: Field>(k: &MultiIndex, p: &RelationParams<T>, cfg: &NumericConfig) -> Result<T> {
    let kk = k.abs();
    let q = &p.q;
    let (a, b, c, d) = (&p.a, &p.b, &p.c, &p.d);
    let acd = a.mul(c).mul(d);
    let mut acc = Product::new(q, cfg);
    acc.up(&a.mul(b), 2 * kk)?.up(c, kk)?.down(&acd, kk)?.down(&b.mul(q).div(d), kk)?;
    let mut exp = binom2(kk);
    for (i, xi) in p.x.iter().enumerate() {
        let ki = k.get(i);
        let bx = b.mul(xi);
        acc.up(&bx, kk)?.up(&a.div(xi), kk - ki)?.up(&d.mul(xi), ki)?;
        acc.up(&bx.mul(q).div(&acd), ki)?;
        acc.down(&bx, ki + kk)?.down(&bx.mul(q).div(c), ki)?;
        acc.mul(&pow_int(xi, -ki)?);
        for xj in &p.x {
            acc.down(&q.mul(xi).div(xj), ki)?;
        }
        exp -= binom2(ki);
    }
    acc.mul(&pow_int(q, exp)?).mul(&pow_int(a, kk)?);
    acc.value()
}

/// The sequence `b_n`.
pub fn relation_b<T: Field>(n: &MultiIndex, p: &RelationParams<T>, cfg: &NumericConfig) -> Result<T> {
    let nn = n.abs();
    let q = &p.q;
    let (a, b, c, d) = (&p.a, &p.b, &p.c, &p.d);
    let mut acc = Product::new(q, cfg);
    acc.up(&a.mul(b), nn)?.up(&a.mul(d), nn)?.up(&b.mul(q).div(&c.mul(d)), nn)?;
    acc.down(&a.mul(c).mul(d), nn)?.down(&b.mul(q).div(d), nn)?;
    for (i, xi) in p.x.iter().enumerate() {
        let ni = n.get(i);
        let acx = a.mul(c).div(xi);
        acc.up(&acx, nn)?.up(&a.div(xi), nn - ni)?;
        acc.down(&b.mul(xi).mul(q).div(c), ni)?.down(&acx, nn - ni)?;
        for xj in &p.x {
            acc.down(&q.mul(xi).div(xj), ni)?;
        }
    }
    acc.value()
}

/// Replays the derivation: checks `Σ_{0≤k≤n} f_{nk} a_k = b_n` with the
/// `(a, b, x)` pair for all `n <= bound`, then the dual
/// `Σ_{0≤l≤k} g_{kl} b_l = a_k` for all `k <= bound`.
pub fn inverse_relation_check<T: Field>(
    bound: &MultiIndex,
    p: &RelationParams<T>,
    cfg: &NumericConfig,
) -> Result<CheckReport> {
    if bound.r() != p.x.len() {
        return Err(Error::Schema("bound and x must share r".into()));
    }
    let zero = MultiIndex::zeros(bound.r());
    let mm = MmicParams { a: p.a.clone(), b: p.b.clone(), x: p.x.clone(), q: p.q.clone() };
    let mut seq_a = HashMap::new();
    let mut seq_b = HashMap::new();
    for k in box_between(&zero, bound) {
        let at = || format!("k={k}");
        seq_a.insert(k.clone(), relation_a(&k, p, cfg).map_err(|e| locate(e, &at))?);
        seq_b.insert(k.clone(), relation_b(&k, p, cfg).map_err(|e| locate(e, &at))?);
    }
    let mut checks = 0;
    for (which, from, to) in [("f", &seq_a, &seq_b), ("g", &seq_b, &seq_a)] {
        for n in box_between(&zero, bound) {
            let mut sum = p.q.zero_like();
            for k in box_between(&zero, &n) {
                let at = || format!("{which} n={n}, k={k}");
                let e = if which == "f" { f_mmic(&n, &k, &mm, cfg) } else { g_mmic(&n, &k, &mm, cfg) };
                sum = sum.add(&e.map_err(|e| locate(e, &at))?.mul(&from[&k]));
            }
            checks += 1;
            let (ok, diff) = agree(&sum, &to[&n]);
            if !ok {
                return Ok(CheckReport {
                    name: "inverse relations".into(),
                    checks,
                    failure: Some(CheckFailure { at: format!("{which} n={n}"), residual: diff.render() }),
                });
            }
        }
    }
    Ok(CheckReport { name: "inverse relations".into(), checks, failure: None })
}
