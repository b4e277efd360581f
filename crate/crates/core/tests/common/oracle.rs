//! Reference evaluators written straight from the formulas, sharing no code
//! with the library beyond its number types.

use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

fn one() -> Q {
    Q::one()
}

pub fn pow(x: &Q, e: i64) -> Q {
    let mut acc = one();
    for _ in 0..e.unsigned_abs() {
        acc *= x;
    }
    if e < 0 {
        one() / acc
    } else {
        acc
    }
}

/// `(a; q)_k`, positive and negative `k`, by the defining products.
pub fn poch(a: &Q, q: &Q, k: i64) -> Q {
    if k >= 0 {
        (0..k).fold(one(), |acc, j| acc * (one() - a * pow(q, j)))
    } else {
        let d = (1..=-k).fold(one(), |acc, j| acc * (one() - a * pow(q, -j)));
        one() / d
    }
}

/// Every `k` with `0 <= k_i <= n_i`.
pub fn boxed(n: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &ni in n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=ni).map(move |v| {
                    let mut p = p.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

pub fn abs(k: &[i64]) -> i64 {
    k.iter().sum()
}

/// `f_{nk}` of the general inverse with sequences given as closures.
pub fn f_general(n: &[i64], k: &[i64], a: &dyn Fn(i64) -> Q, c: &[&dyn Fn(i64) -> Q]) -> Q {
    let r = n.len();
    let ck: Vec<Q> = (0..r).map(|j| c[j](k[j])).collect();
    let cp = ck.iter().fold(one(), |acc, v| acc * v);
    let block = |v: Q| {
        let mut p = one() - &v * &cp;
        for cj in &ck {
            p *= &v - cj;
        }
        p
    };
    let mut num = one();
    for t in abs(k)..abs(n) {
        num *= block(a(t));
    }
    let mut den = one();
    for i in 0..r {
        for t in k[i] + 1..=n[i] {
            den *= block(c[i](t));
        }
    }
    num / den
}

/// `g_{kl}` of the general inverse.
pub fn g_general(k: &[i64], l: &[i64], a: &dyn Fn(i64) -> Q, c: &[&dyn Fn(i64) -> Q]) -> Q {
    let r = k.len();
    let ck: Vec<Q> = (0..r).map(|j| c[j](k[j])).collect();
    let cl: Vec<Q> = (0..r).map(|j| c[j](l[j])).collect();
    let pk = ck.iter().fold(one(), |acc, v| acc * v);
    let pl = cl.iter().fold(one(), |acc, v| acc * v);
    let mut v = one();
    for i in 0..r {
        for j in i + 1..r {
            v = v * (&cl[i] - &cl[j]) / (&ck[i] - &ck[j]);
        }
    }
    let (al, ak) = (a(abs(l)), a(abs(k)));
    v = v * (one() - &al * &pl) / (one() - &ak * &pk);
    for j in 0..r {
        v = v * (&al - &cl[j]) / (&ak - &ck[j]);
    }
    let block = |x: Q| {
        let mut p = one() - &x * &pk;
        for cj in &ck {
            p *= &x - cj;
        }
        p
    };
    for t in abs(l) + 1..=abs(k) {
        v *= block(a(t));
    }
    for i in 0..r {
        for t in l[i]..k[i] {
            v /= block(c[i](t));
        }
    }
    v
}

/// Summand of the A_r terminating 8phi7 in inverse-relation form.
#[allow(clippy::too_many_arguments)]
pub fn new87_term(k: &[i64], n: &[i64], q: &Q, a: &Q, b: &Q, c: &Q, d: &Q, x: &[Q]) -> Q {
    let r = k.len();
    let (kk, nn) = (abs(k), abs(n));
    let bcd = b * c * d;
    let mut v = one();
    for i in 0..r {
        for j in i + 1..r {
            v = v * (one() - pow(q, k[i] - k[j]) * &x[i] / &x[j]) / (one() - &x[i] / &x[j]);
        }
    }
    for i in 0..r {
        for j in 0..r {
            v = v * poch(&(pow(q, -n[j]) * &x[i] / &x[j]), q, k[i]) / poch(&(q * &x[i] / &x[j]), q, k[i]);
        }
    }
    for i in 0..r {
        let xi = &x[i];
        v *= poch(&(&bcd / (a * xi)), q, kk - k[i]);
        v *= poch(&(d / xi), q, kk);
        v *= poch(&(a * a * xi * pow(q, 1 + nn) / &bcd), q, k[i]);
        v /= poch(&(d / xi), q, kk - k[i]);
        v /= poch(&(&bcd * pow(q, -n[i]) / (a * xi)), q, kk);
        v /= poch(&(a * xi * q / d), q, k[i]);
    }
    v = v * (one() - a * pow(q, 2 * kk)) / (one() - a);
    v = v * poch(a, q, kk) * poch(b, q, kk) * poch(c, q, kk);
    v /= poch(&(a * pow(q, 1 + nn)), q, kk) * poch(&(a * q / b), q, kk) * poch(&(a * q / c), q, kk);
    let e: i64 = (0..r).map(|i| (i as i64 + 1) * k[i]).sum();
    v * pow(q, e)
}

#[allow(clippy::too_many_arguments)]
pub fn new87_sum(n: &[i64], q: &Q, a: &Q, b: &Q, c: &Q, d: &Q, x: &[Q]) -> Q {
    boxed(n).iter().fold(Q::zero(), |acc, k| acc + new87_term(k, n, q, a, b, c, d, x))
}

#[allow(clippy::too_many_arguments)]
pub fn new87_product(n: &[i64], q: &Q, a: &Q, b: &Q, c: &Q, d: &Q, x: &[Q]) -> Q {
    let nn = abs(n);
    let aq = a * q;
    let mut v = poch(&aq, q, nn) * poch(&(&aq / (b * c)), q, nn) / (poch(&(&aq / b), q, nn) * poch(&(&aq / c), q, nn));
    for (i, xi) in x.iter().enumerate() {
        let ax = &aq * xi;
        v *= poch(&(&ax / (b * d)), q, n[i]) * poch(&(&ax / (c * d)), q, n[i]);
        v /= poch(&(&ax / d), q, n[i]) * poch(&(&ax / (b * c * d)), q, n[i]);
    }
    v
}

/// Jackson's summand in the form with the explicit `e`.
pub fn jackson_term(k: i64, n: i64, q: &Q, a: &Q, b: &Q, c: &Q, d: &Q) -> Q {
    let e = a * a * pow(q, 1 + n) / (b * c * d);
    let aq = a * q;
    let up = [a.clone(), b.clone(), c.clone(), d.clone(), e.clone(), pow(q, -n)];
    let down = [q.clone(), &aq / b, &aq / c, &aq / d, &aq / &e, a * pow(q, 1 + n)];
    let mut v = (one() - a * pow(q, 2 * k)) / (one() - a) * pow(q, k);
    for u in &up {
        v *= poch(u, q, k);
    }
    for w in &down {
        v /= poch(w, q, k);
    }
    v
}

fn binom2(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// Both sides of the telescoping product identity.
pub fn telescoping_sides(k: &[i64], l: &[i64], x: &[Q], q: &Q) -> (Q, Q) {
    let r = k.len();
    let mut lhs = one();
    for i in 0..r {
        for j in i + 1..r {
            let t = &x[i] / &x[j];
            lhs = lhs * (one() - pow(q, k[i] - k[j]) * &t) / (one() - pow(q, l[i] - l[j]) * &t);
        }
    }
    for i in 0..r {
        for j in 0..r {
            let t = &x[i] / &x[j];
            let m = k[i] - l[i];
            lhs = lhs * poch(&(pow(q, l[i] - k[j]) * &t), q, m) / poch(&(pow(q, 1 + l[i] - l[j]) * &t), q, m);
        }
    }
    let d = abs(k) - abs(l);
    let w: i64 = (0..r).map(|i| (i as i64 + 1) * (k[i] - l[i])).sum();
    let sign = if d % 2 == 0 { one() } else { -one() };
    (lhs, sign * pow(q, -binom2(d) - w))
}

/// Both sides of the product identity used for the bilateral sum.
pub fn lem312_sides(m: &[i64], x: &[Q], q: &Q) -> (Q, Q) {
    let r = m.len() as i64;
    let mut lhs = one();
    for i in 0..m.len() {
        for j in 0..m.len() {
            lhs *= poch(&(q * &x[i] / &x[j]), q, m[j] - m[i]);
        }
    }
    let mm = abs(m);
    let mut e = -binom2(mm + 1);
    for (i, &mi) in m.iter().enumerate() {
        e += r * binom2(mi + 1) - i as i64 * mi;
    }
    let mut rhs = if ((r - 1) * mm) % 2 == 0 { one() } else { -one() };
    rhs *= pow(q, e);
    for (i, xi) in x.iter().enumerate() {
        rhs *= pow(xi, mm - r * m[i]);
    }
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            rhs = rhs * (one() - pow(q, m[j] - m[i]) * &x[i] / &x[j]) / (one() - &x[i] / &x[j]);
        }
    }
    (lhs, rhs)
}

/// `f_{nk}` of the `(a, b, x)` pair.
pub fn f_mmic(n: &[i64], k: &[i64], a: &Q, b: &Q, x: &[Q], q: &Q) -> Q {
    let (nn, kk) = (abs(n), abs(k));
    let r = n.len();
    let mut v = poch(&(a * b * pow(q, 2 * kk)), q, nn - kk);
    for i in 0..r {
        v *= poch(&(a * pow(q, kk - k[i]) / &x[i]), q, nn - kk);
        v /= poch(&(b * &x[i] * pow(q, 1 + k[i] + kk)), q, n[i] - k[i]);
        for j in 0..r {
            v /= poch(&(pow(q, 1 + k[i] - k[j]) * &x[i] / &x[j]), q, n[i] - k[i]);
        }
    }
    v
}

/// `g_{kl}` of the `(a, b, x)` pair.
pub fn g_mmic(k: &[i64], l: &[i64], a: &Q, b: &Q, x: &[Q], q: &Q) -> Q {
    let (kk, ll) = (abs(k), abs(l));
    let d = kk - ll;
    let r = k.len();
    let ab = a * b;
    let mut v = if d % 2 == 0 { one() } else { -one() } * pow(q, binom2(d));
    v = v * (one() - &ab * pow(q, 2 * ll)) / (one() - &ab * pow(q, 2 * kk));
    v *= poch(&(&ab * pow(q, 1 + ll + kk)), q, d);
    for i in 0..r {
        v = v * (one() - a * pow(q, ll - l[i]) / &x[i]) / (one() - a * pow(q, kk - k[i]) / &x[i]);
        v *= poch(&(a * pow(q, 1 + ll - k[i]) / &x[i]), q, d);
        v /= poch(&(b * &x[i] * pow(q, l[i] + kk)), q, k[i] - l[i]);
        for j in 0..r {
            v /= poch(&(pow(q, 1 + l[i] - l[j]) * &x[i] / &x[j]), q, k[i] - l[i]);
        }
    }
    v
}

/// Summand of Milne's A_r 8phi7. With `total` set, the factor
/// `(a x_i q^{1+n_i})_{|k|}` is replaced by `(a x_i q^{1+|n|})_{|k|}`.
#[allow(clippy::too_many_arguments)]
pub fn milne_term(k: &[i64], n: &[i64], q: &Q, a: &Q, b: &Q, c: &Q, d: &Q, x: &[Q], total: bool) -> Q {
    let r = k.len();
    let (kk, nn) = (abs(k), abs(n));
    let bcd = b * c * d;
    let mut v = one();
    for i in 0..r {
        v = v * (one() - a * &x[i] * pow(q, k[i] + kk)) / (one() - a * &x[i]);
        for j in i + 1..r {
            v = v * (one() - pow(q, k[i] - k[j]) * &x[i] / &x[j]) / (one() - &x[i] / &x[j]);
        }
        for j in 0..r {
            v = v * poch(&(pow(q, -n[j]) * &x[i] / &x[j]), q, k[i]) / poch(&(q * &x[i] / &x[j]), q, k[i]);
        }
        let ax = a * &x[i];
        let shift = if total { nn } else { n[i] };
        v *= poch(&ax, q, kk) * poch(&(d * &x[i]), q, k[i]) * poch(&(&ax * a * pow(q, 1 + nn) / &bcd), q, k[i]);
        v /= poch(&(&ax * pow(q, 1 + shift)), q, kk) * poch(&(&ax * q / b), q, k[i]) * poch(&(&ax * q / c), q, k[i]);
    }
    v = v * poch(b, q, kk) * poch(c, q, kk) / (poch(&(a * q / d), q, kk) * poch(&(&bcd * pow(q, -nn) / a), q, kk));
    let e: i64 = (0..r).map(|i| (i as i64 + 1) * k[i]).sum();
    v * pow(q, e)
}

#[allow(clippy::too_many_arguments)]
pub fn milne_sum(n: &[i64], q: &Q, a: &Q, b: &Q, c: &Q, d: &Q, x: &[Q], total: bool) -> Q {
    boxed(n).iter().fold(Q::zero(), |acc, k| acc + milne_term(k, n, q, a, b, c, d, x, total))
}

#[allow(clippy::too_many_arguments)]
pub fn milne_product(n: &[i64], q: &Q, a: &Q, b: &Q, c: &Q, d: &Q, x: &[Q]) -> Q {
    let nn = abs(n);
    let aq = a * q;
    let mut v = poch(&(&aq / (b * d)), q, nn) * poch(&(&aq / (c * d)), q, nn);
    v /= poch(&(&aq / d), q, nn) * poch(&(&aq / (b * c * d)), q, nn);
    for (i, xi) in x.iter().enumerate() {
        let ax = &aq * xi;
        v *= poch(&ax, q, n[i]) * poch(&(&ax / (b * c)), q, n[i]);
        v /= poch(&(&ax / b), q, n[i]) * poch(&(&ax / c), q, n[i]);
    }
    v
}
