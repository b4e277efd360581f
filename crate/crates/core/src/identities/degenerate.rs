//! Specialisations linking the identities to each other.
//!
//! (i)   `new_ar_6psi6` at `e_i = a` is `new_ar_6phi5_nonterm`, and every
//!       bilateral term with a negative index vanishes.
//! (ii)  `new_ar_6phi5_nonterm` at `c_i = q^{-n_i}`, `d = c` is
//!       `new_ar_6phi5_term`, term by term.
//! (iii) `new_ar_8phi7_poly` at `c_j = q^{-n_j}`, `N = |n|` agrees with
//!       `new_ar_8phi7` at `c = q^{-N}`.
//! (iv)  `new_ar_8phi7_special` is `new_ar_8phi7_poly` with
//!       `b -> a^2 q^{1+N}/bCd`, term by term.
//! (v)   Jackson's and Bailey's series classify as balanced / very-well-poised.

use num_rational::BigRational;
use num_traits::FromPrimitive;

use crate::error::{Error, Result};
use crate::lattice::{iterate, MultiIndex, SummationDomain};
use crate::numerics::{pow_int, Backend, Field, NumericConfig, Scalar};

use super::classify::{classify, Kind, SeriesClassifier};
use super::sample::{sample_parameters, trial_seed, SampleConfig};
use super::{
    build, eval_lhs_with, eval_rhs_with, tolerance, Eval, Id, ParameterAssignment, SeriesPlan, Verdict,
    VerificationReport,
};

/// Mantissa width for the float items.
const PRECISION: usize = 256;
/// Fresh samples tried when a specialisation lands on a pole.
const RETRIES: usize = 64;

fn is_pole(e: &Error) -> bool {
    matches!(e, Error::Pole(_) | Error::DivisionByZero(_) | Error::ConstraintViolated(_))
}

/// Runs `f` on successive trial seeds until it does not hit a pole.
fn retrying(
    seed: u64,
    id: Id,
    r: usize,
    trial: usize,
    mut f: impl FnMut(u64) -> Result<VerificationReport>,
) -> Result<VerificationReport> {
    let mut last = None;
    for attempt in 0..RETRIES {
        let s = trial_seed(seed, id, r, trial * RETRIES + attempt);
        match f(s) {
            Err(e) if is_pole(&e) => last = Some(e),
            other => return other,
        }
    }
    Err(last.unwrap_or(Error::SamplingExhausted(RETRIES)))
}

fn report(name: &str, p: &ParameterAssignment, seed: u64, trial: usize) -> VerificationReport {
    let mut rep = VerificationReport::new(name, p.r, p.backend());
    rep.params = p.render();
    rep.seed = Some(seed);
    rep.trial = Some(trial);
    rep
}

/// First `k` in `points` where the two plans give different terms.
fn first_term_mismatch<T: Field>(
    a: &mut SeriesPlan<T>,
    b: &mut SeriesPlan<T>,
    points: &SummationDomain,
) -> Result<Option<MultiIndex>> {
    for k in iterate(points)? {
        if !a.term(k.entries(), Eval::Cached)?.same_value(&b.term(k.entries(), Eval::Cached)?) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

fn exact(v: &Scalar) -> Result<BigRational> {
    match v {
        Scalar::Exact(x) => Ok(x.clone()),
        // Sampled floats are dyadic with few bits, hence exact in f64.
        Scalar::Float(_) => {
            BigRational::from_f64(v.to_f64()).ok_or_else(|| Error::Config("non-finite sampled value".into()))
        }
    }
}

fn to_exact(p: &ParameterAssignment) -> Result<ParameterAssignment> {
    let one = |v: &Option<Scalar>| v.as_ref().map(|x| exact(x).map(Scalar::Exact)).transpose();
    let many = |v: &Option<Vec<Scalar>>| {
        v.as_ref().map(|xs| xs.iter().map(|x| exact(x).map(Scalar::Exact)).collect::<Result<Vec<_>>>()).transpose()
    };
    Ok(ParameterAssignment {
        r: p.r,
        q: Scalar::Exact(exact(&p.q)?),
        a: one(&p.a)?,
        b: one(&p.b)?,
        c: one(&p.c)?,
        d: one(&p.d)?,
        z: one(&p.z)?,
        c_vec: many(&p.c_vec)?,
        e_vec: many(&p.e_vec)?,
        x_vec: many(&p.x_vec)?,
        n_vec: p.n_vec.clone(),
        big_n: p.big_n,
    })
}

fn q_pow(q: &Scalar, e: i64) -> Result<Scalar> {
    match q {
        Scalar::Exact(v) => pow_int(v, e).map(Scalar::Exact),
        Scalar::Float(v) => pow_int(v, e).map(Scalar::Float),
    }
}

/// (i) `e_i = a`: sums and products against the 6phi5, plus exact vanishing
/// of every term with a negative index.
fn item_i(seed: u64, r: usize, trial: usize, cfg: &NumericConfig) -> Result<Vec<VerificationReport>> {
    let backend = Backend::float(PRECISION)?;
    let sc = SampleConfig::new(backend);
    let s = trial_seed(seed, Id::NewAr6phi5Nonterm, r, trial);
    let base = sample_parameters(Id::NewAr6phi5Nonterm, r, s, &sc, cfg)?;
    let mut psi = base.clone();
    psi.e_vec = Some(vec![base.a.clone().expect("schema has a"); r]);
    let tol = tolerance(backend, cfg);

    let (phi_rhs, _) = eval_rhs_with(Id::NewAr6phi5Nonterm, &base, cfg)?;
    let mut lhs_rep = report("degeneration_i_sum", &psi, s, trial);
    let (psi_lhs, trunc) = eval_lhs_with(Id::NewAr6psi6, &psi, cfg, Eval::Cached)?;
    lhs_rep.terms = trunc.terms;
    lhs_rep.window = trunc.window;
    lhs_rep.tail = trunc.tail;
    lhs_rep.compare(&psi_lhs, &phi_rhs, tol)?;

    let mut rhs_rep = report("degeneration_i_product", &psi, s, trial);
    let (psi_rhs, _) = eval_rhs_with(Id::NewAr6psi6, &psi, cfg)?;
    rhs_rep.compare(&psi_rhs, &phi_rhs, tol)?;

    // Vanishing is checked in exact arithmetic on the same (dyadic) values.
    let ex = to_exact(&psi)?;
    let mut vanish = report("degeneration_i_vanishing", &ex, s, trial);
    let (mut plan, _) = build(Id::NewAr6psi6, &ex.typed::<BigRational>()?, cfg)?;
    let reach = 3;
    let window = SummationDomain::Box(MultiIndex::from(vec![2 * reach; r]));
    let mut checked = 0;
    let mut offender = None;
    for k in iterate(&window)? {
        let k: Vec<i64> = k.entries().iter().map(|v| v - reach).collect();
        if k.iter().all(|&v| v >= 0) {
            continue;
        }
        checked += 1;
        if !plan.term(&k, Eval::Scratch)?.is_zero() {
            offender = Some(MultiIndex::from(k));
            break;
        }
    }
    vanish.terms = checked;
    vanish.residual = Some(if offender.is_some() { 1.0 } else { 0.0 });
    vanish.verdict = if offender.is_none() { Verdict::Pass } else { Verdict::Fail };
    if let Some(k) = offender {
        vanish.error = Some(format!("term at {k} does not vanish"));
    }
    Ok(vec![lhs_rep, rhs_rep, vanish])
}

/// (ii) `c_i = q^{-n_i}`, `d = c`.
fn item_ii(seed: u64, r: usize, trial: usize, cfg: &NumericConfig) -> Result<VerificationReport> {
    retrying(seed, Id::NewAr6phi5Term, r, trial, |s| {
        let sc = SampleConfig::new(Backend::Exact);
        let t = sample_parameters(Id::NewAr6phi5Term, r, s, &sc, cfg)?;
        let n = t.n_vec.clone().expect("schema has n_vec");
        let mut p = ParameterAssignment::new(r, t.q.clone());
        p.a = t.a.clone();
        p.b = t.b.clone();
        p.d = t.c.clone();
        p.x_vec = t.x_vec.clone();
        p.c_vec = Some(n.entries().iter().map(|&v| q_pow(&t.q, -v)).collect::<Result<_>>()?);
        let mut rep = report("degeneration_ii", &p, s, trial);
        let (mut phi, _) = build(Id::NewAr6phi5Nonterm, &p.typed::<BigRational>()?, cfg)?;
        let (mut term, rhs) = build(Id::NewAr6phi5Term, &t.typed::<BigRational>()?, cfg)?;
        // Past the box the specialised 6phi5 terms must vanish.
        let wide = SummationDomain::Box(MultiIndex::from(n.entries().iter().map(|v| v + 2).collect::<Vec<_>>()));
        let box_ = SummationDomain::Box(n.clone());
        let mut sum = phi.q().zero_like();
        let mut terms = 0;
        for k in iterate(&wide)? {
            let v = phi.term(k.entries(), Eval::Cached)?;
            if k.le(&n) {
                sum = sum.add(&v);
                terms += 1;
            } else if !v.is_zero() {
                rep.error = Some(format!("term at {k} outside the box does not vanish"));
                return Ok(rep);
            }
        }
        if let Some(k) = first_term_mismatch(&mut phi, &mut term, &box_)? {
            rep.error = Some(format!("terms differ at {k}"));
            return Ok(rep);
        }
        rep.terms = terms;
        let (rv, _) = rhs.eval(cfg)?;
        rep.compare(&sum.into_scalar(), &rv.into_scalar(), 0.0)?;
        Ok(rep)
    })
}

/// (iii) `c_j = q^{-n_j}`, `N = |n|` against `c = q^{-N}`.
fn item_iii(seed: u64, r: usize, trial: usize, cfg: &NumericConfig) -> Result<VerificationReport> {
    retrying(seed, Id::NewAr8phi7, r, trial, |s| {
        let sc = SampleConfig::new(Backend::Exact);
        let mut full = sample_parameters(Id::NewAr8phi7, r, s, &sc, cfg)?;
        let n = full.n_vec.clone().expect("schema has n_vec");
        let nn = n.abs();
        full.c = Some(q_pow(&full.q, -nn)?);
        let mut poly = ParameterAssignment::new(r, full.q.clone());
        poly.a = full.a.clone();
        poly.b = full.b.clone();
        poly.d = full.d.clone();
        poly.x_vec = full.x_vec.clone();
        poly.c_vec = Some(n.entries().iter().map(|&v| q_pow(&full.q, -v)).collect::<Result<_>>()?);
        poly.big_n = Some(nn as u32);
        let mut rep = report("degeneration_iii", &poly, s, trial);
        let (l1, t1) = eval_lhs_with(Id::NewAr8phi7Poly, &poly, cfg, Eval::Cached)?;
        let (l2, _) = eval_lhs_with(Id::NewAr8phi7, &full, cfg, Eval::Cached)?;
        let (r1, _) = eval_rhs_with(Id::NewAr8phi7Poly, &poly, cfg)?;
        let (r2, _) = eval_rhs_with(Id::NewAr8phi7, &full, cfg)?;
        rep.terms = t1.terms;
        rep.compare(&l1, &l2, 0.0)?;
        if rep.passed() && (r1 != r2 || l1 != r1) {
            rep.verdict = Verdict::Fail;
            rep.error = Some(format!("products differ: {r1} vs {r2}"));
        }
        Ok(rep)
    })
}

/// (iv) `b -> a^2 q^{1+N}/bCd`.
fn item_iv(seed: u64, r: usize, trial: usize, cfg: &NumericConfig) -> Result<VerificationReport> {
    retrying(seed, Id::NewAr8phi7Special, r, trial, |s| {
        let sc = SampleConfig::new(Backend::Exact);
        let sp = sample_parameters(Id::NewAr8phi7Special, r, s, &sc, cfg)?;
        let typed = sp.typed::<BigRational>()?;
        let (a, b, d) = (typed.a()?, typed.b()?, typed.d()?);
        let big_n = typed.big_n()? as i64;
        let b2 = a.mul(a).mul(&pow_int(&typed.q, 1 + big_n)?).div(&b.mul(&typed.cprod()?).mul(d));
        let mut poly = sp.clone();
        poly.b = Some(Scalar::Exact(b2));
        let mut rep = report("degeneration_iv", &sp, s, trial);
        let (mut s1, r1) = build(Id::NewAr8phi7Special, &typed, cfg)?;
        let (mut s2, r2) = build(Id::NewAr8phi7Poly, &poly.typed::<BigRational>()?, cfg)?;
        let dom = s1.domain().clone();
        if let Some(k) = first_term_mismatch(&mut s1, &mut s2, &dom)? {
            rep.error = Some(format!("terms differ at {k}"));
            return Ok(rep);
        }
        rep.terms = iterate(&dom)?.count();
        let (v1, _) = r1.eval(cfg)?;
        let (v2, _) = r2.eval(cfg)?;
        rep.compare(&v1.into_scalar(), &v2.into_scalar(), 0.0)?;
        Ok(rep)
    })
}

fn flags_report(
    name: &str,
    p: &ParameterAssignment,
    s: u64,
    trial: usize,
    ok: bool,
    what: String,
) -> VerificationReport {
    let mut rep = report(name, p, s, trial);
    rep.lhs = Some(what);
    rep.residual = Some(if ok { 0.0 } else { 1.0 });
    rep.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    rep
}

/// (v) Jackson's series in combined and explicit (`a = s^2`) form, and
/// Bailey's bilateral series.
fn item_v(seed: u64, trial: usize, cfg: &NumericConfig) -> Result<Vec<VerificationReport>> {
    let ex = Backend::Exact;
    let sc = SampleConfig::new(ex);
    let mut out = Vec::new();

    let jack = retrying(seed, Id::Jackson8phi7, 1, trial, |s| {
        let mut p = sample_parameters(Id::Jackson8phi7, 1, s, &sc, cfg)?;
        // A square special parameter keeps ±q√a rational.
        let root = p.a.clone().expect("schema has a");
        let a = root.try_mul(&root)?;
        p.a = Some(a.clone());
        let (mut plan, _) = build(Id::Jackson8phi7, &p.typed::<BigRational>()?, cfg)?;
        let t = p.typed::<BigRational>()?;
        let (q, b, c, d) = (&t.q, t.b()?, t.c()?, t.d()?);
        let av = t.a()?;
        let n = t.n()?.get(0);
        let aq = av.mul(q);
        let e = av.mul(av).mul(&pow_int(q, 1 + n)?).div(&b.mul(c).mul(d));
        let sv = Field::from_scalar(&root)?;
        let upper =
            vec![av.clone(), q.mul(&sv), q.mul(&sv).neg(), b.clone(), c.clone(), d.clone(), e.clone(), pow_int(q, -n)?];
        let lower =
            vec![sv.clone(), sv.neg(), aq.div(b), aq.div(c), aq.div(d), aq.div(&e), av.mul(&pow_int(q, 1 + n)?)];
        // The explicit terms must reproduce the combined-form summand.
        for k in 0..=n {
            let mut v = pow_int(q, k)?;
            for u in &upper {
                v = v.mul(&crate::numerics::poch::qpoch(u, q, k, cfg)?);
            }
            for l in lower.iter().chain(std::iter::once(q)) {
                v = v.div(&crate::numerics::poch::qpoch(l, q, k, cfg)?);
            }
            if !v.same_value(&plan.term(&[k], Eval::Scratch)?) {
                return Ok(flags_report("degeneration_v_jackson_terms", &p, s, trial, false, format!("k={k}")));
            }
        }
        let sx = |v: &[BigRational]| v.iter().cloned().map(Scalar::Exact).collect::<Vec<_>>();
        let explicit = SeriesClassifier {
            upper: sx(&upper),
            lower: sx(&lower),
            argument: Scalar::Exact(q.clone()),
            kind: Kind::Phi,
            q: Scalar::Exact(q.clone()),
            combined: false,
            special: None,
        };
        let combined = SeriesClassifier {
            upper: sx(&[av.clone(), b.clone(), c.clone(), d.clone(), e.clone(), pow_int(q, -n)?]),
            lower: sx(&[aq.div(b), aq.div(c), aq.div(d), aq.div(&e), av.mul(&pow_int(q, 1 + n)?)]),
            argument: Scalar::Exact(q.clone()),
            kind: Kind::Phi,
            q: Scalar::Exact(q.clone()),
            combined: true,
            special: None,
        };
        let f1 = classify(&explicit)?;
        let f2 = classify(&combined)?;
        let ok = f1.balanced && f1.very_well_poised && f2.balanced && f2.very_well_poised;
        Ok(flags_report("degeneration_v_jackson", &p, s, trial, ok, format!("explicit {f1:?}; combined {f2:?}")))
    })?;
    out.push(jack);

    let bs = Backend::float(PRECISION)?;
    let s = trial_seed(seed, Id::Bailey6psi6, 1, trial);
    let p = sample_parameters(Id::Bailey6psi6, 1, s, &SampleConfig::new(bs), cfg)?;
    let aq = p.a.as_ref().expect("schema has a").try_mul(&p.q)?;
    let e = p.e_vec.as_ref().expect("schema has e_vec")[0].clone();
    let params = [p.b.clone(), p.c.clone(), p.d.clone(), Some(e)];
    let upper: Vec<Scalar> = params.iter().flatten().cloned().collect();
    let lower = upper.iter().map(|v| aq.try_div(v)).collect::<Result<Vec<_>>>()?;
    let (plan, _) = super::plans::<crate::numerics::Float>(Id::Bailey6psi6, &p, cfg)?;
    let bailey = SeriesClassifier {
        upper,
        lower,
        argument: plan.argument().cloned().expect("bilateral plans carry an argument").into_scalar(),
        kind: Kind::Psi,
        q: p.q.clone(),
        combined: true,
        special: p.a.clone(),
    };
    let f = classify(&bailey)?;
    out.push(flags_report("degeneration_v_bailey", &p, s, trial, f.very_well_poised && !f.balanced, format!("{f:?}")));
    Ok(out)
}

/// Runs items (i)-(v) for `trials` seeded trials; (i) at `r = 1, 2`,
/// (ii)-(iv) at `r = 1, 2, 3`. Errors become failed reports.
pub fn check_degenerations(seed: u64, trials: usize, cfg: &NumericConfig) -> Vec<VerificationReport> {
    let fail = |name: &str, r: usize, trial: usize, e: Error| {
        let mut rep = VerificationReport::new(name, r, Backend::Exact);
        rep.seed = Some(seed);
        rep.trial = Some(trial);
        rep.failed_with(&e)
    };
    let mut out = Vec::new();
    for trial in 0..trials {
        for r in 1..=2 {
            match item_i(seed, r, trial, cfg) {
                Ok(v) => out.extend(v),
                Err(e) => out.push(fail("degeneration_i", r, trial, e)),
            }
        }
        for r in 1..=3 {
            type Item = fn(u64, usize, usize, &NumericConfig) -> Result<VerificationReport>;
            let items: [(&str, Item); 3] =
                [("degeneration_ii", item_ii), ("degeneration_iii", item_iii), ("degeneration_iv", item_iv)];
            for (name, f) in items {
                out.push(f(seed, r, trial, cfg).unwrap_or_else(|e| fail(name, r, trial, e)));
            }
        }
        match item_v(seed, trial, cfg) {
            Ok(v) => out.extend(v),
            Err(e) => out.push(fail("degeneration_v", 1, trial, e)),
        }
    }
    out
}
