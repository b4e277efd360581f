//! The registry: metadata and summand/product construction per identity.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::SummationDomain;
use crate::numerics::{pow_int, Field, NumericConfig};

use super::params::{Params, Slot};
use super::plan::{Idx, RIdx, RhsPlan, SeriesPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Id {
    Jackson8phi7,
    Bailey6psi6,
    QBinomial,
    MilneAr8phi7,
    BhatnagarAr6phi5,
    NewAr8phi7,
    NewAr8phi7Poly,
    NewAr8phi7Special,
    NewAr6phi5Nonterm,
    NewAr6phi5Term,
    NewAr6psi6,
}

impl Id {
    pub const ALL: [Id; 11] = [
        Id::Jackson8phi7,
        Id::Bailey6psi6,
        Id::QBinomial,
        Id::MilneAr8phi7,
        Id::BhatnagarAr6phi5,
        Id::NewAr8phi7,
        Id::NewAr8phi7Poly,
        Id::NewAr8phi7Special,
        Id::NewAr6phi5Nonterm,
        Id::NewAr6phi5Term,
        Id::NewAr6psi6,
    ];

    pub fn name(self) -> &'static str {
        self.descriptor().name
    }

    pub fn descriptor(self) -> &'static IdentityDescriptor {
        &REGISTRY[self as usize]
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Id {
    type Err = Error;

    fn from_str(s: &str) -> Result<Id> {
        Id::ALL.iter().copied().find(|id| id.name() == s).ok_or_else(|| Error::UnknownIdentity(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Box,
    Simplex,
    Unilateral,
    Bilateral,
}

impl DomainKind {
    pub fn name(self) -> &'static str {
        match self {
            DomainKind::Box => "box 0 <= k_i <= n_i",
            DomainKind::Simplex => "simplex k_i >= 0, |k| <= N",
            DomainKind::Unilateral => "unilateral k_i >= 0",
            DomainKind::Bilateral => "bilateral k in Z^r",
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, DomainKind::Box | DomainKind::Simplex)
    }
}

/// Registry entry for one identity.
#[derive(Debug)]
pub struct IdentityDescriptor {
    pub id: Id,
    pub name: &'static str,
    pub title: &'static str,
    pub schema: &'static [Slot],
    pub domain: DomainKind,
    /// Set for the one-variable classics.
    pub r_fixed: Option<usize>,
    pub constraints: &'static [&'static str],
    pub notes: &'static str,
}

impl IdentityDescriptor {
    pub fn terminating(&self) -> bool {
        self.domain.is_finite()
    }

    pub fn admits_r(&self, r: usize) -> bool {
        r >= 1 && self.r_fixed.is_none_or(|f| f == r)
    }
}

use Slot::*;

const NONZERO: &str = "no denominator factor vanishes";

static REGISTRY: [IdentityDescriptor; 11] = [
    IdentityDescriptor {
        id: Id::Jackson8phi7,
        name: "jackson_8phi7",
        title: "Jackson's terminating very-well-poised balanced 8phi7 summation",
        schema: &[Q, A, B, C, D, NVec],
        domain: DomainKind::Box,
        r_fixed: Some(1),
        constraints: &[NONZERO, "e = a^2 q^{1+n}/bcd is implied"],
        notes: "balanced and very-well-poised; evaluated in the combined form with (1-aq^{2k})/(1-a)",
    },
    IdentityDescriptor {
        id: Id::Bailey6psi6,
        name: "bailey_6psi6",
        title: "Bailey's very-well-poised 6psi6 summation",
        schema: &[Q, A, B, C, D, EVec],
        domain: DomainKind::Bilateral,
        r_fixed: Some(1),
        constraints: &[NONZERO, "|a^2 q/bcde| < 1"],
        notes: "very-well-poised bilateral series; e is e_vec[0]",
    },
    IdentityDescriptor {
        id: Id::QBinomial,
        name: "qbinomial",
        title: "q-binomial theorem",
        schema: &[Q, A, Z],
        domain: DomainKind::Unilateral,
        r_fixed: Some(1),
        constraints: &["|z| < 1"],
        notes: "sum_l (a)_l z^l/(q)_l = (az)_inf/(z)_inf",
    },
    IdentityDescriptor {
        id: Id::MilneAr8phi7,
        name: "milne_ar_8phi7",
        title: "Milne's A_r terminating very-well-poised balanced 8phi7 summation",
        schema: &[Q, A, B, C, D, XVec, NVec],
        domain: DomainKind::Box,
        r_fixed: None,
        constraints: &[NONZERO],
        notes: "very-well-poised factor prod_i (1-a x_i q^{k_i+|k|})/(1-a x_i)",
    },
    IdentityDescriptor {
        id: Id::BhatnagarAr6phi5,
        name: "bhatnagar_ar_6phi5",
        title: "Bhatnagar's A_r terminating very-well-poised 6phi5 summation",
        schema: &[Q, A, B, C, XVec, NVec],
        domain: DomainKind::Box,
        r_fixed: None,
        constraints: &[NONZERO],
        notes: "summand carries q^{-e2(k)}",
    },
    IdentityDescriptor {
        id: Id::NewAr8phi7,
        name: "new_ar_8phi7",
        title: "A_r terminating very-well-poised balanced 8phi7 summation (inverse-relation form)",
        schema: &[Q, A, B, C, D, XVec, NVec],
        domain: DomainKind::Box,
        r_fixed: None,
        constraints: &[NONZERO],
        notes: "reduces to jackson_8phi7 at r = 1 with d -> d/x_1",
    },
    IdentityDescriptor {
        id: Id::NewAr8phi7Poly,
        name: "new_ar_8phi7_poly",
        title: "A_r terminating very-well-poised balanced 8phi7 summation over a simplex",
        schema: &[Q, A, B, D, CVec, XVec, BigN],
        domain: DomainKind::Simplex,
        r_fixed: None,
        constraints: &[NONZERO, "C = c_1...c_r"],
        notes: "c_j = q^{-n_j}, N = |n| recovers new_ar_8phi7 with c = q^{-N}",
    },
    IdentityDescriptor {
        id: Id::NewAr8phi7Special,
        name: "new_ar_8phi7_special",
        title: "A_r terminating 8phi7 summation with N only in |k|-dependent factors",
        schema: &[Q, A, B, D, CVec, XVec, BigN],
        domain: DomainKind::Simplex,
        r_fixed: None,
        constraints: &[NONZERO, "C = c_1...c_r"],
        notes: "new_ar_8phi7_poly with b -> a^2 q^{1+N}/bCd",
    },
    IdentityDescriptor {
        id: Id::NewAr6phi5Nonterm,
        name: "new_ar_6phi5_nonterm",
        title: "A_r nonterminating very-well-poised 6phi5 summation",
        schema: &[Q, A, B, D, CVec, XVec],
        domain: DomainKind::Unilateral,
        r_fixed: None,
        constraints: &[NONZERO, "|aq/bCd| < 1"],
        notes: "float backend only",
    },
    IdentityDescriptor {
        id: Id::NewAr6phi5Term,
        name: "new_ar_6phi5_term",
        title: "A_r terminating very-well-poised 6phi5 summation",
        schema: &[Q, A, B, C, XVec, NVec],
        domain: DomainKind::Box,
        r_fixed: None,
        constraints: &[NONZERO],
        notes: "new_ar_6phi5_nonterm with c_i = q^{-n_i} and d -> c",
    },
    IdentityDescriptor {
        id: Id::NewAr6psi6,
        name: "new_ar_6psi6",
        title: "A_r very-well-poised 6psi6 summation",
        schema: &[Q, A, B, D, CVec, EVec, XVec],
        domain: DomainKind::Bilateral,
        r_fixed: None,
        constraints: &[NONZERO, "|a^{r+1}q/bCdE| < 1 (modulus of the series argument)"],
        notes: "float backend only; e_i = a gives new_ar_6phi5_nonterm; r = 1 is bailey_6psi6 with (b,d) -> (b x, d/x)",
    },
];

/// Summand plan and closed-form product for `id` at `p`.
pub fn build<T: Field>(id: Id, p: &Params<T>, cfg: &NumericConfig) -> Result<(SeriesPlan<T>, RhsPlan<T>)> {
    let r = p.r;
    let q = &p.q;
    let qp = |e: i64| pow_int(q, e);
    let mut rhs = RhsPlan::new(q);
    let fin = RIdx::Fin;
    let inf = RIdx::Inf;
    let plan = match id {
        Id::Jackson8phi7 => {
            let (a, b, c, d) = (p.a()?, p.b()?, p.c()?, p.d()?);
            let n = p.n()?.get(0);
            let aq = a.mul(q);
            let bcd = b.mul(c).mul(d);
            let e = a.mul(a).mul(&qp(1 + n)?).div(&bcd);
            let mut s = SeriesPlan::new(1, q, SummationDomain::Box(p.n()?.clone()), cfg);
            s.vwp(a);
            for up in [a, b, c, d, &e, &qp(-n)?] {
                s.global(true, up.clone());
            }
            for down in [q.clone(), aq.div(b), aq.div(c), aq.div(d), bcd.mul(&qp(-n)?).div(a), a.mul(&qp(1 + n)?)] {
                s.global(false, down);
            }
            s.qpower(0, 0);
            rhs.up(aq.clone(), fin(n)).up(aq.div(&b.mul(c)), fin(n));
            rhs.up(aq.div(&b.mul(d)), fin(n)).up(aq.div(&c.mul(d)), fin(n));
            rhs.down(aq.div(b), fin(n)).down(aq.div(c), fin(n)).down(aq.div(d), fin(n)).down(aq.div(&bcd), fin(n));
            s
        }
        Id::Bailey6psi6 => {
            let (a, b, c, d) = (p.a()?, p.b()?, p.c()?, p.d()?);
            let e = &p.ev()?[0];
            let aq = a.mul(q);
            let z = a.mul(&aq).div(&b.mul(c).mul(d).mul(e));
            let mut s = SeriesPlan::new(1, q, SummationDomain::Bilateral(1), cfg);
            s.vwp(a);
            for v in [b, c, d, e] {
                s.global(true, v.clone());
            }
            for v in [b, c, d, e] {
                s.global(false, aq.div(v));
            }
            s.arg(z.clone());
            for v in [q.clone(), aq.clone(), q.div(a)] {
                rhs.up(v, inf);
            }
            for (u, v) in [(b, c), (b, d), (b, e), (c, d), (c, e), (d, e)] {
                rhs.up(aq.div(&u.mul(v)), inf);
            }
            for v in [b, c, d, e] {
                rhs.down(aq.div(v), inf);
            }
            for v in [b, c, d, e] {
                rhs.down(q.div(v), inf);
            }
            rhs.down(z, inf);
            s
        }
        Id::QBinomial => {
            let (a, z) = (p.a()?, p.z()?);
            let mut s = SeriesPlan::new(1, q, SummationDomain::Unilateral(1), cfg);
            s.global(true, a.clone()).global(false, q.clone()).arg(z.clone());
            rhs.up(a.mul(z), inf).down(z.clone(), inf);
            s
        }
        Id::MilneAr8phi7 => {
            let (a, b, c, d, x) = (p.a()?, p.b()?, p.c()?, p.d()?, p.xv()?);
            let n = p.n()?;
            let nn = n.abs();
            let bcd = b.mul(c).mul(d);
            let aq = a.mul(q);
            let qn1 = qp(1 + nn)?;
            let mut s = SeriesPlan::new(r, q, SummationDomain::Box(n.clone()), cfg);
            let qneg: Vec<T> = (0..r).map(|j| qp(-n.get(j))).collect::<Result<_>>()?;
            s.cross(x)?;
            s.pair(true, |i, j| qneg[j].mul(&x[i]).div(&x[j]));
            s.pair(false, |i, j| q.mul(&x[i]).div(&x[j]));
            s.per_vwp(x.iter().map(|xi| a.mul(xi)).collect());
            s.per(Idx::K, true, |i| a.mul(&x[i]));
            s.per(Idx::Ki, true, |i| d.mul(&x[i]));
            s.per(Idx::Ki, true, |i| a.mul(a).mul(&x[i]).mul(&qn1).div(&bcd));
            s.per(Idx::K, false, |i| aq.mul(&x[i]).div(&qneg[i]));
            s.per(Idx::Ki, false, |i| aq.mul(&x[i]).div(b));
            s.per(Idx::Ki, false, |i| aq.mul(&x[i]).div(c));
            s.global(true, b.clone()).global(true, c.clone());
            s.global(false, aq.div(d)).global(false, bcd.mul(&qp(-nn)?).div(a));
            s.qpower(0, 0);
            rhs.up(aq.div(&b.mul(d)), fin(nn)).up(aq.div(&c.mul(d)), fin(nn));
            rhs.down(aq.div(d), fin(nn)).down(aq.div(&bcd), fin(nn));
            for (i, xi) in x.iter().enumerate() {
                let ax = aq.mul(xi);
                let ni = fin(n.get(i));
                rhs.up(ax.clone(), ni).up(ax.div(&b.mul(c)), ni);
                rhs.down(ax.div(b), ni).down(ax.div(c), ni);
            }
            s
        }
        Id::BhatnagarAr6phi5 => {
            let (a, b, c, x) = (p.a()?, p.b()?, p.c()?, p.xv()?);
            let n = p.n()?;
            let nn = n.abs();
            let aq = a.mul(q);
            let qn1 = qp(1 + nn)?;
            let mut s = SeriesPlan::new(r, q, SummationDomain::Box(n.clone()), cfg);
            let qneg: Vec<T> = (0..r).map(|j| qp(-n.get(j))).collect::<Result<_>>()?;
            s.cross(x)?;
            s.pair(true, |i, j| qneg[j].mul(&x[i]).div(&x[j]));
            s.pair(false, |i, j| q.mul(&x[i]).div(&x[j]));
            s.per(Idx::K, true, |i| c.div(&x[i]));
            s.per(Idx::Ki, false, |i| aq.mul(&x[i]).div(c));
            s.per(Idx::KMinusKi, false, |i| c.div(&x[i]));
            s.xpow(x);
            s.vwp(a);
            s.global(true, a.clone()).global(true, b.clone());
            s.global(false, a.mul(&qn1)).global(false, aq.div(b));
            s.arg(a.mul(&qn1).div(&b.mul(c)));
            s.qpower(-1, -1);
            rhs.up(aq.clone(), fin(nn)).down(aq.div(b), fin(nn));
            for (i, xi) in x.iter().enumerate() {
                let ax = aq.mul(xi);
                rhs.up(ax.div(&b.mul(c)), fin(n.get(i))).down(ax.div(c), fin(n.get(i)));
            }
            s
        }
        Id::NewAr8phi7 => {
            let (a, b, c, d, x) = (p.a()?, p.b()?, p.c()?, p.d()?, p.xv()?);
            let n = p.n()?;
            let nn = n.abs();
            let bcd = b.mul(c).mul(d);
            let aq = a.mul(q);
            let qn1 = qp(1 + nn)?;
            let mut s = SeriesPlan::new(r, q, SummationDomain::Box(n.clone()), cfg);
            let qneg: Vec<T> = (0..r).map(|j| qp(-n.get(j))).collect::<Result<_>>()?;
            s.cross(x)?;
            s.pair(true, |i, j| qneg[j].mul(&x[i]).div(&x[j]));
            s.pair(false, |i, j| q.mul(&x[i]).div(&x[j]));
            s.per(Idx::KMinusKi, true, |i| bcd.div(&a.mul(&x[i])));
            s.per(Idx::K, true, |i| d.div(&x[i]));
            s.per(Idx::Ki, true, |i| a.mul(a).mul(&x[i]).mul(&qn1).div(&bcd));
            s.per(Idx::KMinusKi, false, |i| d.div(&x[i]));
            s.per(Idx::K, false, |i| bcd.mul(&qneg[i]).div(&a.mul(&x[i])));
            s.per(Idx::Ki, false, |i| aq.mul(&x[i]).div(d));
            s.vwp(a);
            for v in [a, b, c] {
                s.global(true, v.clone());
            }
            for v in [a.mul(&qn1), aq.div(b), aq.div(c)] {
                s.global(false, v);
            }
            s.qpower(0, 0);
            rhs.up(aq.clone(), fin(nn)).up(aq.div(&b.mul(c)), fin(nn));
            rhs.down(aq.div(b), fin(nn)).down(aq.div(c), fin(nn));
            for (i, xi) in x.iter().enumerate() {
                let ax = aq.mul(xi);
                let ni = fin(n.get(i));
                rhs.up(ax.div(&b.mul(d)), ni).up(ax.div(&c.mul(d)), ni);
                rhs.down(ax.div(d), ni).down(ax.div(&bcd), ni);
            }
            s
        }
        Id::NewAr8phi7Poly => {
            let (a, b, d, cv, x) = (p.a()?, p.b()?, p.d()?, p.cv()?, p.xv()?);
            let big_n = p.big_n()? as i64;
            let cc = p.cprod()?;
            let aq = a.mul(q);
            let qn1 = qp(1 + big_n)?;
            let qmn = qp(-big_n)?;
            let bcd = b.mul(&cc).mul(d);
            let mut s = SeriesPlan::new(r, q, SummationDomain::Simplex { n: big_n as u32, r }, cfg);
            s.cross(x)?;
            s.pair(true, |i, j| cv[j].mul(&x[i]).div(&x[j]));
            s.pair(false, |i, j| q.mul(&x[i]).div(&x[j]));
            s.per(Idx::KMinusKi, true, |i| b.mul(d).mul(&qmn).div(&a.mul(&x[i])));
            s.per(Idx::K, true, |i| d.div(&x[i]));
            s.per(Idx::Ki, true, |i| a.mul(a).mul(&x[i]).mul(&qn1).div(&bcd));
            s.per(Idx::KMinusKi, false, |i| d.div(&x[i]));
            s.per(Idx::K, false, |i| b.mul(&cv[i]).mul(d).mul(&qmn).div(&a.mul(&x[i])));
            s.per(Idx::Ki, false, |i| aq.mul(&x[i]).div(d));
            s.vwp(a);
            for v in [a.clone(), b.clone(), qmn.clone()] {
                s.global(true, v);
            }
            for v in [aq.div(&cc), aq.div(b), a.mul(&qn1)] {
                s.global(false, v);
            }
            s.qpower(0, 0);
            let nf = fin(big_n);
            rhs.up(aq.clone(), nf).up(aq.div(&b.mul(&cc)), nf);
            rhs.down(aq.div(b), nf).down(aq.div(&cc), nf);
            for (i, xi) in x.iter().enumerate() {
                let ax = aq.mul(xi);
                rhs.up(ax.div(&b.mul(d)), nf).up(ax.div(&cv[i].mul(d)), nf);
                rhs.down(ax.div(d), nf).down(ax.div(&b.mul(&cv[i]).mul(d)), nf);
            }
            s
        }
        Id::NewAr8phi7Special => {
            let (a, b, d, cv, x) = (p.a()?, p.b()?, p.d()?, p.cv()?, p.xv()?);
            let big_n = p.big_n()? as i64;
            let cc = p.cprod()?;
            let aq = a.mul(q);
            let qn1 = qp(1 + big_n)?;
            let qmn = qp(-big_n)?;
            let bc = b.mul(&cc);
            let bcd = bc.mul(d);
            let mut s = SeriesPlan::new(r, q, SummationDomain::Simplex { n: big_n as u32, r }, cfg);
            s.cross(x)?;
            s.pair(true, |i, j| cv[j].mul(&x[i]).div(&x[j]));
            s.pair(false, |i, j| q.mul(&x[i]).div(&x[j]));
            six_five_blocks(&mut s, a, b, d, &cc, cv, x, q);
            s.vwp(a);
            for v in [a.clone(), a.mul(a).mul(&qn1).div(&bcd), qmn.clone()] {
                s.global(true, v);
            }
            for v in [aq.div(&cc), bcd.mul(&qmn).div(a), a.mul(&qn1)] {
                s.global(false, v);
            }
            s.qpower(0, 0);
            let nf = fin(big_n);
            rhs.up(aq.clone(), nf).up(aq.div(&b.mul(d)), nf);
            rhs.down(aq.div(&cc), nf).down(aq.div(&bcd), nf);
            for (i, xi) in x.iter().enumerate() {
                rhs.up(aq.div(&bc.mul(xi)), nf).up(aq.mul(xi).div(&cv[i].mul(d)), nf);
                rhs.down(aq.mul(xi).div(d), nf).down(aq.mul(&cv[i]).div(&bc.mul(xi)), nf);
            }
            s
        }
        Id::NewAr6phi5Nonterm => {
            let (a, b, d, cv, x) = (p.a()?, p.b()?, p.d()?, p.cv()?, p.xv()?);
            let cc = p.cprod()?;
            let aq = a.mul(q);
            let bc = b.mul(&cc);
            let mut s = SeriesPlan::new(r, q, SummationDomain::Unilateral(r), cfg);
            s.cross(x)?;
            s.pair(true, |i, j| cv[j].mul(&x[i]).div(&x[j]));
            s.pair(false, |i, j| q.mul(&x[i]).div(&x[j]));
            six_five_blocks(&mut s, a, b, d, &cc, cv, x, q);
            s.vwp(a);
            s.global(true, a.clone()).global(false, aq.div(&cc));
            s.arg(aq.div(&bc.mul(d)));
            s.qpower(-1, 0);
            rhs.up(aq.clone(), inf).up(aq.div(&b.mul(d)), inf);
            rhs.down(aq.div(&cc), inf).down(aq.div(&bc.mul(d)), inf);
            for (i, xi) in x.iter().enumerate() {
                rhs.up(aq.div(&bc.mul(xi)), inf).up(aq.mul(xi).div(&cv[i].mul(d)), inf);
                rhs.down(aq.mul(xi).div(d), inf).down(aq.mul(&cv[i]).div(&bc.mul(xi)), inf);
            }
            s
        }
        Id::NewAr6phi5Term => {
            let (a, b, c, x) = (p.a()?, p.b()?, p.c()?, p.xv()?);
            let n = p.n()?;
            let nn = n.abs();
            let aq = a.mul(q);
            let qn1 = qp(1 + nn)?;
            let mut s = SeriesPlan::new(r, q, SummationDomain::Box(n.clone()), cfg);
            let qneg: Vec<T> = (0..r).map(|j| qp(-n.get(j))).collect::<Result<_>>()?;
            s.cross(x)?;
            s.pair(true, |i, j| qneg[j].mul(&x[i]).div(&x[j]));
            s.pair(false, |i, j| q.mul(&x[i]).div(&x[j]));
            s.per(Idx::KMinusKi, true, |i| a.mul(&qn1).div(&b.mul(&x[i])));
            s.per(Idx::K, true, |i| c.div(&x[i]));
            s.per(Idx::Ki, true, |i| b.mul(&x[i]));
            s.per(Idx::KMinusKi, false, |i| c.div(&x[i]));
            s.per(Idx::K, false, |i| a.mul(&qn1).mul(&qneg[i]).div(&b.mul(&x[i])));
            s.per(Idx::Ki, false, |i| aq.mul(&x[i]).div(c));
            s.vwp(a);
            s.global(true, a.clone()).global(false, a.mul(&qn1));
            s.arg(a.mul(&qn1).div(&b.mul(c)));
            s.qpower(-1, 0);
            rhs.up(aq.clone(), fin(nn)).up(aq.div(&b.mul(c)), fin(nn));
            for (i, xi) in x.iter().enumerate() {
                let base = aq.div(&b.mul(xi));
                rhs.up(base.clone(), fin(nn - n.get(i))).down(base, fin(nn));
                rhs.down(aq.mul(xi).div(c), fin(n.get(i)));
            }
            s
        }
        Id::NewAr6psi6 => {
            let (a, b, d, cv, ev, x) = (p.a()?, p.b()?, p.d()?, p.cv()?, p.ev()?, p.xv()?);
            let cc = p.cprod()?;
            let ee = p.eprod()?;
            let aq = a.mul(q);
            let bc = b.mul(&cc);
            let ar = pow_int(a, r as i64)?;
            let ar1 = pow_int(a, r as i64 - 1)?;
            let de = d.mul(&ee);
            let z = ar.mul(&aq).div(&bc.mul(&de));
            let mut s = SeriesPlan::new(r, q, SummationDomain::Bilateral(r), cfg);
            s.cross(x)?;
            s.pair(true, |i, j| cv[j].mul(&x[i]).div(&x[j]));
            s.pair(false, |i, j| aq.mul(&x[i]).div(&ev[j].mul(&x[j])));
            s.per(Idx::KMinusKi, true, |i| aq.div(&bc.mul(&x[i])));
            s.per(Idx::K, true, |i| de.div(&ar1.mul(&ev[i]).mul(&x[i])));
            s.per(Idx::Ki, true, |i| b.mul(&x[i]));
            s.per(Idx::KMinusKi, false, |i| de.div(&ar.mul(&x[i])));
            s.per(Idx::K, false, |i| aq.mul(&cv[i]).div(&bc.mul(&x[i])));
            s.per(Idx::Ki, false, |i| aq.mul(&x[i]).div(d));
            s.vwp(a);
            s.global(true, ee.div(&ar1)).global(false, aq.div(&cc));
            s.arg(z.clone());
            s.qpower(-1, 0);
            rhs.up(aq.clone(), inf).up(q.div(a), inf).up(aq.div(&b.mul(d)), inf);
            rhs.down(aq.div(&cc), inf).down(z, inf).down(ar1.mul(q).div(&ee), inf);
            for i in 0..r {
                for j in 0..r {
                    let ratio = x[i].div(&x[j]);
                    rhs.up(q.mul(&ratio), inf).up(aq.mul(&ratio).div(&cv[i].mul(&ev[j])), inf);
                    rhs.down(q.mul(&ratio).div(&cv[i]), inf).down(aq.mul(&ratio).div(&ev[j]), inf);
                }
            }
            for (i, xi) in x.iter().enumerate() {
                rhs.up(ar.mul(xi).mul(q).div(&de), inf);
                rhs.up(aq.div(&b.mul(&ev[i]).mul(xi)), inf);
                rhs.up(aq.div(&bc.mul(xi)), inf);
                rhs.up(aq.mul(xi).div(&cv[i].mul(d)), inf);
                rhs.down(ar1.mul(&ev[i]).mul(xi).mul(q).div(&de), inf);
                rhs.down(q.div(&b.mul(xi)), inf);
                rhs.down(aq.mul(xi).div(d), inf);
                rhs.down(aq.mul(&cv[i]).div(&bc.mul(xi)), inf);
            }
            s
        }
    };
    Ok((plan, rhs))
}

/// The per-coordinate factorials shared by the simplex 8phi7 special form
/// and the nonterminating 6phi5.
#[allow(clippy::too_many_arguments)]
fn six_five_blocks<T: Field>(s: &mut SeriesPlan<T>, a: &T, b: &T, d: &T, cc: &T, cv: &[T], x: &[T], q: &T) {
    let aq = a.mul(q);
    let bc = b.mul(cc);
    s.per(Idx::KMinusKi, true, |i| aq.div(&bc.mul(&x[i])));
    s.per(Idx::K, true, |i| d.div(&x[i]));
    s.per(Idx::Ki, true, |i| b.mul(&x[i]));
    s.per(Idx::KMinusKi, false, |i| d.div(&x[i]));
    s.per(Idx::K, false, |i| aq.mul(&cv[i]).div(&bc.mul(&x[i])));
    s.per(Idx::Ki, false, |i| aq.mul(&x[i]).div(d));
}
