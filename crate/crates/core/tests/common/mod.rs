#![allow(dead_code)]

pub mod oracle;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use arsum::lattice::MultiIndex;
use arsum::numerics::{Backend, Scalar};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn ex(n: i64, d: i64) -> Scalar {
    Backend::Exact.ratio(n, d)
}

pub fn fl(n: i64, d: i64, bits: usize) -> Scalar {
    Backend::float(bits).unwrap().ratio(n, d)
}

pub fn mi(v: &[i64]) -> MultiIndex {
    MultiIndex::from(v.to_vec())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero `n/d` with `|n|, d <= 64`.
pub fn random_rat(rng: &mut ChaCha8Rng) -> BigRational {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-64..=64);
    }
    rat(n, rng.gen_range(1..=64))
}

/// `q` with `1/10 <= |q| <= 1/2`.
pub fn random_q(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let d = rng.gen_range(2..=64);
        let n = rng.gen_range(1..d);
        if 10 * n >= d && 2 * n <= d {
            let s = if rng.gen_bool(0.5) { 1 } else { -1 };
            return rat(s * n, d);
        }
    }
}

pub fn exact_all(v: &[BigRational]) -> Vec<Scalar> {
    v.iter().map(|x| Scalar::Exact(x.clone())).collect()
}

/// A random index with entries in `0..=max`.
pub fn random_index(rng: &mut ChaCha8Rng, r: usize, max: i64) -> Vec<i64> {
    (0..r).map(|_| rng.gen_range(0..=max)).collect()
}

/// Random `(x, q)` with distinct `x_i`.
pub fn random_xq(rng: &mut ChaCha8Rng, r: usize) -> (Vec<BigRational>, BigRational) {
    let q = random_q(rng);
    loop {
        let x: Vec<BigRational> = (0..r).map(|_| random_rat(rng)).collect();
        let distinct = (0..r).all(|i| (i + 1..r).all(|j| x[i] != x[j]));
        if distinct {
            return (x, q);
        }
    }
}
