mod common;

use arsum::identities::{
    check_degenerations, classify, eval_lhs, eval_lhs_with, eval_rhs, plans, residual, sample_parameters, tolerance,
    verify_instance, Eval, Id, Kind, ParameterAssignment, SampleConfig, SeriesClassifier,
};
use arsum::lattice::MultiIndex;
use arsum::numerics::{qpoch_inf, Backend, Float, NumericConfig, Scalar};
use arsum::Error;
use common::{ex, exact_all, mi, oracle, random_rat, random_xq, rat, rng};
use num_rational::BigRational;

const BITS: usize = 256;

fn cfg() -> NumericConfig {
    NumericConfig::default()
}

fn fb() -> Backend {
    Backend::float(BITS).unwrap()
}

fn exq(v: &BigRational) -> Scalar {
    Scalar::Exact(v.clone())
}

#[allow(clippy::too_many_arguments)]
fn abcd_x_n(
    q: &BigRational,
    a: &BigRational,
    b: &BigRational,
    c: &BigRational,
    d: &BigRational,
    x: &[BigRational],
    n: &[i64],
) -> ParameterAssignment {
    let mut p = ParameterAssignment::new(x.len(), exq(q));
    p.a = Some(exq(a));
    p.b = Some(exq(b));
    p.c = Some(exq(c));
    p.d = Some(exq(d));
    p.x_vec = Some(exact_all(x));
    p.n_vec = Some(mi(n));
    p
}

fn rel(a: &Scalar, b: &Scalar) -> f64 {
    residual(a, b).unwrap()
}

#[test]
fn new_8phi7_matches_direct_summation() {
    let (q, a, b, c, d) = (rat(1, 2), rat(1, 7), rat(2, 1), rat(3, 1), rat(5, 1));
    let x = [rat(1, 1), rat(1, 3)];
    let n = [1, 1];
    let p = abcd_x_n(&q, &a, &b, &c, &d, &x, &n);
    let direct = oracle::new87_sum(&n, &q, &a, &b, &c, &d, &x);
    let product = oracle::new87_product(&n, &q, &a, &b, &c, &d, &x);
    assert_eq!(direct, product);
    assert_eq!(eval_lhs(Id::NewAr8phi7, &p, &cfg()).unwrap(), exq(&direct));
    assert_eq!(eval_rhs(Id::NewAr8phi7, &p, &cfg()).unwrap(), exq(&product));
}

#[test]
fn new_8phi7_random_against_oracle() {
    let mut g = rng(21);
    let mut checked = 0;
    for r in 1..=3 {
        for _ in 0..6 {
            let (x, q) = random_xq(&mut g, r);
            let [a, b, c, d] = [0; 4].map(|_| random_rat(&mut g));
            let n = common::random_index(&mut g, r, 2);
            let p = abcd_x_n(&q, &a, &b, &c, &d, &x, &n);
            let Ok(lhs) = eval_lhs(Id::NewAr8phi7, &p, &cfg()) else { continue };
            assert_eq!(lhs, exq(&oracle::new87_sum(&n, &q, &a, &b, &c, &d, &x)));
            assert_eq!(eval_rhs(Id::NewAr8phi7, &p, &cfg()).unwrap(), lhs);
            checked += 1;
        }
    }
    assert!(checked >= 12);
}

#[test]
fn zero_index_is_trivial() {
    let one = rat(1, 1);
    let p = abcd_x_n(&rat(1, 3), &rat(2, 5), &one, &rat(3, 1), &rat(-7, 2), &[one.clone(), rat(5, 3)], &[0, 0]);
    assert_eq!(eval_lhs(Id::NewAr8phi7, &p, &cfg()).unwrap(), ex(1, 1));
    assert_eq!(eval_rhs(Id::NewAr8phi7, &p, &cfg()).unwrap(), ex(1, 1));
    let rep = verify_instance(Id::NewAr8phi7, &p, &cfg());
    assert!(rep.passed());
    assert_eq!(rep.residual, Some(0.0));
}

#[test]
fn r1_reduces_to_jackson_term_by_term() {
    let (q, a, b, c, d, x) = (rat(1, 3), rat(2, 7), rat(-3, 5), rat(4, 1), rat(5, 9), rat(-2, 3));
    for n in 0..=3 {
        let p = abcd_x_n(&q, &a, &b, &c, &d, std::slice::from_ref(&x), &[n]);
        let mut j = p.clone();
        j.x_vec = None;
        j.d = Some(exq(&(&d / &x)));
        let (mut s_new, _) = plans::<BigRational>(Id::NewAr8phi7, &p, &cfg()).unwrap();
        let (mut s_jac, _) = plans::<BigRational>(Id::Jackson8phi7, &j, &cfg()).unwrap();
        for k in 0..=n {
            let t = s_jac.term(&[k], Eval::Cached).unwrap();
            assert_eq!(s_new.term(&[k], Eval::Cached).unwrap(), t);
            assert_eq!(t, oracle::jackson_term(k, n, &q, &a, &b, &c, &(&d / &x)));
        }
        assert_eq!(eval_rhs(Id::NewAr8phi7, &p, &cfg()).unwrap(), eval_rhs(Id::Jackson8phi7, &j, &cfg()).unwrap());
    }
}

#[test]
fn milne_denominator_uses_the_own_index() {
    // (a x_i q^{1+n_i})_{|k|} gives an identity; (a x_i q^{1+|n|})_{|k|}
    // agrees with it only when r = 1.
    let mut g = rng(22);
    for r in 1..=2 {
        let (x, q) = random_xq(&mut g, r);
        let [a, b, c, d] = [0; 4].map(|_| random_rat(&mut g));
        let n: Vec<i64> = (1..=r as i64).collect();
        let product = oracle::milne_product(&n, &q, &a, &b, &c, &d, &x);
        assert_eq!(oracle::milne_sum(&n, &q, &a, &b, &c, &d, &x, false), product);
        let total = oracle::milne_sum(&n, &q, &a, &b, &c, &d, &x, true);
        assert_eq!(total == product, r == 1);
        let p = abcd_x_n(&q, &a, &b, &c, &d, &x, &n);
        assert_eq!(eval_lhs(Id::MilneAr8phi7, &p, &cfg()).unwrap(), exq(&product));
    }
}

#[test]
fn cached_and_scratch_are_bit_identical() {
    let c = cfg();
    let cases = [
        (Id::MilneAr8phi7, 3, Backend::Exact),
        (Id::NewAr8phi7Poly, 2, Backend::Exact),
        (Id::BhatnagarAr6phi5, 3, fb()),
        (Id::NewAr6phi5Nonterm, 2, fb()),
        (Id::NewAr6psi6, 1, fb()),
        (Id::QBinomial, 1, fb()),
    ];
    for (id, r, backend) in cases {
        let p = sample_parameters(id, r, 5, &SampleConfig::new(backend), &c).unwrap();
        let (a, ta) = eval_lhs_with(id, &p, &c, Eval::Cached).unwrap();
        let (b, tb) = eval_lhs_with(id, &p, &c, Eval::Scratch).unwrap();
        assert_eq!(a, b, "{id}");
        assert_eq!(a.render(), b.render());
        assert_eq!(ta, tb);
    }
}

fn reversed(p: &ParameterAssignment) -> ParameterAssignment {
    let mut s = p.clone();
    for v in [&mut s.x_vec, &mut s.c_vec, &mut s.e_vec].into_iter().flatten() {
        v.reverse();
    }
    if let Some(n) = &p.n_vec {
        let mut e = n.entries().to_vec();
        e.reverse();
        s.n_vec = Some(MultiIndex::from(e));
    }
    s
}

#[test]
fn sums_are_symmetric_in_the_vector_slots() {
    let c = cfg();
    let ids = [
        Id::MilneAr8phi7,
        Id::BhatnagarAr6phi5,
        Id::NewAr8phi7,
        Id::NewAr8phi7Poly,
        Id::NewAr8phi7Special,
        Id::NewAr6phi5Term,
    ];
    for id in ids {
        for seed in 0..3 {
            let p = sample_parameters(id, 3, seed, &SampleConfig::new(Backend::Exact), &c).unwrap();
            let lhs = eval_lhs(id, &p, &c).unwrap();
            assert_eq!(eval_lhs(id, &reversed(&p), &c).unwrap(), lhs, "{id} seed {seed}");
        }
    }
}

fn bailey_from(p: &ParameterAssignment) -> ParameterAssignment {
    // r = 1: (a, b, c_1, d, e_1, x) maps to Bailey's (a, b x, c_1, d/x, e_1).
    let x = &p.x_vec.as_ref().unwrap()[0];
    let mut s = ParameterAssignment::new(1, p.q.clone());
    s.a = p.a.clone();
    s.b = Some(p.b.as_ref().unwrap().try_mul(x).unwrap());
    s.c = Some(p.c_vec.as_ref().unwrap()[0].clone());
    s.d = Some(p.d.as_ref().unwrap().try_div(x).unwrap());
    s.e_vec = p.e_vec.clone();
    s
}

#[test]
fn bilateral_r1_is_bailey() {
    let c = cfg();
    for seed in 0..4 {
        let p = sample_parameters(Id::NewAr6psi6, 1, seed, &SampleConfig::new(fb()), &c).unwrap();
        let bp = bailey_from(&p);
        let (mut s6, _) = plans::<Float>(Id::NewAr6psi6, &p, &c).unwrap();
        let (mut sb, _) = plans::<Float>(Id::Bailey6psi6, &bp, &c).unwrap();
        for k in -6..=6 {
            let (u, v) = (s6.term(&[k], Eval::Cached).unwrap(), sb.term(&[k], Eval::Cached).unwrap());
            assert!(rel(&Scalar::Float(u), &Scalar::Float(v)) < 1e-70);
        }
        let (l6, lb) = (eval_lhs(Id::NewAr6psi6, &p, &c).unwrap(), eval_lhs(Id::Bailey6psi6, &bp, &c).unwrap());
        let (r6, rb) = (eval_rhs(Id::NewAr6psi6, &p, &c).unwrap(), eval_rhs(Id::Bailey6psi6, &bp, &c).unwrap());
        assert!(rel(&l6, &lb) < 1e-28 && rel(&r6, &rb) < 1e-28);
        assert_eq!(verify_instance(Id::NewAr6psi6, &p, &c).verdict, verify_instance(Id::Bailey6psi6, &bp, &c).verdict);
    }
}

#[test]
fn bailey_product_side() {
    let c = NumericConfig { epsilon_tail: 1e-40, ..cfg() };
    let b = fb();
    let [q, a, bb, cc, d, e] = [(1, 3), (1, 2), (3, 2), (-2, 1), (5, 2), (7, 4)].map(|(n, m)| b.ratio(n, m));
    let mut p = ParameterAssignment::new(1, q.clone());
    p.a = Some(a.clone());
    p.b = Some(bb.clone());
    p.c = Some(cc.clone());
    p.d = Some(d.clone());
    p.e_vec = Some(vec![e.clone()]);
    let m = |u: &Scalar, v: &Scalar| u.try_mul(v).unwrap();
    let dv = |u: &Scalar, v: &Scalar| u.try_div(v).unwrap();
    let one = b.ratio(1, 1);
    let aq = m(&a, &q);
    let z = dv(&m(&a, &aq), &m(&m(&bb, &cc), &m(&d, &e)));
    let ups = [
        q.clone(),
        aq.clone(),
        dv(&q, &a),
        dv(&aq, &m(&bb, &cc)),
        dv(&aq, &m(&bb, &d)),
        dv(&aq, &m(&bb, &e)),
        dv(&aq, &m(&cc, &d)),
        dv(&aq, &m(&cc, &e)),
        dv(&aq, &m(&d, &e)),
    ];
    let downs =
        [dv(&aq, &bb), dv(&aq, &cc), dv(&aq, &d), dv(&aq, &e), dv(&q, &bb), dv(&q, &cc), dv(&q, &d), dv(&q, &e), z];
    let mut want = one;
    for u in &ups {
        want = m(&want, &qpoch_inf(u, &q, &c).unwrap().0);
    }
    for v in &downs {
        want = dv(&want, &qpoch_inf(v, &q, &c).unwrap().0);
    }
    assert!(rel(&eval_rhs(Id::Bailey6psi6, &p, &c).unwrap(), &want) < 1e-35);
    assert!(verify_instance(Id::Bailey6psi6, &p, &c).passed());
}

#[test]
fn bilateral_terms_vanish_below_zero_when_e_equals_a() {
    let c = cfg();
    let mut p = sample_parameters(Id::NewAr6psi6, 2, 3, &SampleConfig::new(fb()), &c).unwrap();
    let a = p.a.clone().unwrap();
    p.e_vec = Some(vec![a.clone(), a]);
    let (mut s, _) = plans::<Float>(Id::NewAr6psi6, &p, &c).unwrap();
    for k1 in -3..=3 {
        for k2 in -3..=3 {
            let t = s.term(&[k1, k2], Eval::Cached).unwrap();
            if k1.min(k2) < 0 {
                assert!(Scalar::Float(t).is_zero(), "k = ({k1}, {k2})");
            }
        }
    }
}

#[test]
fn bilateral_r2_holds_at_shifted_e() {
    // With e_i = a q^{-m_i} the r = 2 sum matches its product side.
    let c = cfg();
    let b = fb();
    for (m1, m2) in [(0, 0), (1, 0)] {
        let mut seed = 0;
        let rep = loop {
            let mut p = sample_parameters(Id::NewAr6psi6, 2, seed, &SampleConfig::new(b), &c).unwrap();
            let a = p.a.clone().unwrap();
            let q = p.q.clone();
            let shift = |m: i64| (0..m).fold(a.clone(), |acc, _| acc.try_div(&q).unwrap());
            p.e_vec = Some(vec![shift(m1), shift(m2)]);
            let rep = verify_instance(Id::NewAr6psi6, &p, &c);
            if rep.error.is_none() {
                break rep;
            }
            seed += 1;
        };
        assert!(rep.passed(), "{rep:?}");
    }
}

#[test]
fn nonterminating_example() {
    // q = 3/10 and aq/bCd = 2/5.
    let c = cfg();
    let b = fb();
    let mut p = ParameterAssignment::new(2, b.ratio(3, 10));
    p.a = Some(b.ratio(1, 2));
    p.b = Some(b.ratio(3, 2));
    p.d = Some(b.ratio(1, 2));
    p.c_vec = Some(vec![b.ratio(1, 2), b.ratio(1, 1)]);
    p.x_vec = Some(vec![b.ratio(1, 1), b.ratio(-2, 5)]);
    let rep = verify_instance(Id::NewAr6phi5Nonterm, &p, &c);
    assert!(rep.passed(), "{rep:?}");
    assert!(rep.residual.unwrap() < 1e-28);
}

#[test]
fn more_terms_do_not_change_the_verdict() {
    let tight = cfg();
    let wide = NumericConfig { max_terms: 2048, ..tight };
    for seed in 0..3 {
        let p = sample_parameters(Id::NewAr6phi5Nonterm, 1, seed, &SampleConfig::new(fb()), &tight).unwrap();
        let (u, v) =
            (verify_instance(Id::NewAr6phi5Nonterm, &p, &tight), verify_instance(Id::NewAr6phi5Nonterm, &p, &wide));
        assert_eq!(u.verdict, v.verdict);
        assert!(u.passed());
    }
}

#[test]
fn float_terminating_residuals_are_small() {
    let c = cfg();
    let tol = 2f64.powi(-(BITS as i32 - 16));
    assert!(tolerance(fb(), &c) >= tol);
    for id in [Id::NewAr8phi7, Id::MilneAr8phi7, Id::NewAr8phi7Special] {
        let p = sample_parameters(id, 2, 9, &SampleConfig::new(fb()), &c).unwrap();
        let rep = verify_instance(id, &p, &c);
        assert!(rep.passed() && rep.residual.unwrap() < tol, "{rep:?}");
    }
}

#[test]
fn sampler_is_deterministic_and_respects_constraints() {
    let c = cfg();
    let ex_sc = SampleConfig::new(Backend::Exact);
    let p = sample_parameters(Id::NewAr8phi7, 1, 1, &ex_sc, &c).unwrap();
    assert_eq!(p.render(), sample_parameters(Id::NewAr8phi7, 1, 1, &ex_sc, &c).unwrap().render());
    assert_ne!(p.render(), sample_parameters(Id::NewAr8phi7, 1, 2, &ex_sc, &c).unwrap().render());
    assert!(matches!(sample_parameters(Id::Jackson8phi7, 2, 1, &ex_sc, &c), Err(Error::Schema(_))));
    assert!(sample_parameters(Id::NewAr6phi5Nonterm, 1, 1, &ex_sc, &c).is_err());
    let sc = SampleConfig::new(fb());
    for seed in 0..10 {
        let p = sample_parameters(Id::NewAr6phi5Nonterm, 2, seed, &sc, &c).unwrap();
        let (mut s, _) = plans::<Float>(Id::NewAr6phi5Nonterm, &p, &c).unwrap();
        assert!(s.argument().unwrap().to_f64_abs() <= 0.6);
        let _ = s.term(&[0, 0], Eval::Cached).unwrap();
        let p = sample_parameters(Id::NewAr6psi6, 2, seed, &sc, &c).unwrap();
        let (s, _) = plans::<Float>(Id::NewAr6psi6, &p, &c).unwrap();
        assert!(s.argument().unwrap().to_f64_abs() <= 0.6);
    }
}

trait AbsF64 {
    fn to_f64_abs(&self) -> f64;
}

impl AbsF64 for Float {
    fn to_f64_abs(&self) -> f64 {
        arsum::numerics::Field::to_f64(self).abs()
    }
}

#[test]
fn invalid_assignments_are_reported() {
    let c = cfg();
    let mut p = sample_parameters(Id::NewAr8phi7, 2, 4, &SampleConfig::new(Backend::Exact), &c).unwrap();
    p.d = None;
    assert!(matches!(eval_lhs(Id::NewAr8phi7, &p, &c), Err(Error::Schema(_))));
    let rep = verify_instance(Id::NewAr8phi7, &p, &c);
    assert!(!rep.passed() && rep.error.is_some());
    let mut q = ParameterAssignment::new(1, ex(1, 2));
    q.a = Some(ex(1, 3));
    q.z = Some(ex(1, 2));
    assert!(eval_lhs(Id::QBinomial, &q, &c).is_err());
}

#[test]
fn classifier_flags() {
    // Jackson with a = 4, q = 1/2: q sqrt(a) = 1, sqrt(a) = 2, n = 1.
    let (q, a, b, c, d) = (ex(1, 2), ex(4, 1), ex(3, 1), ex(-5, 1), ex(7, 3));
    let m = |u: &Scalar, v: &Scalar| u.try_mul(v).unwrap();
    let dv = |u: &Scalar, v: &Scalar| u.try_div(v).unwrap();
    let qn = ex(2, 1); // q^{-1}
    let aq = m(&a, &q);
    let e = dv(&m(&m(&a, &a), &m(&q, &q)), &m(&m(&b, &c), &d));
    let upper = vec![a.clone(), ex(1, 1), ex(-1, 1), b.clone(), c.clone(), d.clone(), e.clone(), qn.clone()];
    let lower = vec![ex(2, 1), ex(-2, 1), dv(&aq, &b), dv(&aq, &c), dv(&aq, &d), dv(&aq, &e), dv(&aq, &qn)];
    let s = SeriesClassifier {
        upper,
        lower,
        argument: q.clone(),
        kind: Kind::Phi,
        q: q.clone(),
        combined: false,
        special: None,
    };
    let f = classify(&s).unwrap();
    assert!(f.balanced && f.well_poised && f.very_well_poised);
    let mut broken = s.clone();
    broken.lower[2] = ex(9, 1);
    let f = classify(&broken).unwrap();
    assert!(!f.balanced && !f.well_poised);
    // Bailey, with the very-well-poised pairs folded into the factor.
    let ee = ex(5, 1);
    let s = SeriesClassifier {
        upper: vec![b.clone(), c.clone(), d.clone(), ee.clone()],
        lower: vec![dv(&aq, &b), dv(&aq, &c), dv(&aq, &d), dv(&aq, &ee)],
        argument: ex(1, 9),
        kind: Kind::Psi,
        q,
        combined: true,
        special: Some(a),
    };
    let f = classify(&s).unwrap();
    assert!(f.very_well_poised && !f.balanced);
}

#[test]
fn degenerations_pass() {
    let reports = check_degenerations(3, 2, &cfg());
    assert!(!reports.is_empty());
    for rep in &reports {
        assert!(rep.passed(), "{rep:?}");
    }
}
