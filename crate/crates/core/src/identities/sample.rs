//! Seeded rejection sampling of admissible parameter assignments.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{iterate, layer, validate_x, MultiIndex, SummationDomain};
use crate::numerics::{Backend, Field, Float, NumericConfig, Scalar};

use super::{plans, with_field, DomainKind, Eval, Id, ParameterAssignment, SeriesPlan, Slot};

/// Knobs of the sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleConfig {
    pub backend: Backend,
    /// Largest entry of `n_vec`.
    pub max_n: i64,
    /// Largest `N` for simplex domains.
    pub max_big_n: u32,
    /// Bound on the modulus of the series argument of nonterminating ids.
    pub arg_bound: f64,
    pub max_attempts: usize,
}

impl SampleConfig {
    pub fn new(backend: Backend) -> Self {
        SampleConfig { backend, max_n: 3, max_big_n: 5, arg_bound: 0.6, max_attempts: 1000 }
    }
}

/// Largest numerator and denominator of a sampled value.
const MAX_PART: i64 = 64;
/// Bilateral truncation reach probed at sampling time.
const PROBE: i64 = 12;
/// Ray probe points `t s` for `t` in these two values.
const RAY: (i64, i64) = (24, 32);
/// Largest admissible per-step decay along a ray.
const BILATERAL_DECAY: f64 = 0.5;
const UNILATERAL_DECAY: f64 = 0.75;

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed derived from the run seed and the trial coordinates.
pub fn trial_seed(seed: u64, id: Id, r: usize, trial: usize) -> u64 {
    let mut s = mix(seed);
    for v in [id as u64, r as u64, trial as u64] {
        s = mix(s ^ v);
    }
    s
}

fn value(rng: &mut ChaCha8Rng, backend: Backend) -> Scalar {
    let mut num = 0;
    while num == 0 {
        num = rng.gen_range(-MAX_PART..=MAX_PART);
    }
    match backend {
        Backend::Exact => {
            let den = rng.gen_range(1..=MAX_PART);
            Scalar::Exact(BigRational::new(num.into(), den.into()))
        }
        Backend::Float { precision_bits } => {
            let e = rng.gen_range(0..=6);
            Scalar::Float(Float::from_ratio(num, 1 << e, precision_bits))
        }
    }
}

fn base_q(rng: &mut ChaCha8Rng, backend: Backend) -> Scalar {
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    match backend {
        Backend::Exact => loop {
            let den = rng.gen_range(2..=MAX_PART);
            let num = rng.gen_range(1..den);
            if 10 * num >= den && 2 * num <= den {
                return backend.ratio(sign * num, den);
            }
        },
        Backend::Float { .. } => backend.ratio(sign * rng.gen_range(7..=32), 64),
    }
}

fn vector(rng: &mut ChaCha8Rng, backend: Backend, r: usize) -> Vec<Scalar> {
    (0..r).map(|_| value(rng, backend)).collect()
}

fn draw(id: Id, r: usize, rng: &mut ChaCha8Rng, sc: &SampleConfig) -> ParameterAssignment {
    let b = sc.backend;
    let mut p = ParameterAssignment::new(r, base_q(rng, b));
    for slot in id.descriptor().schema {
        match slot {
            Slot::Q => {}
            Slot::A => p.a = Some(value(rng, b)),
            Slot::B => p.b = Some(value(rng, b)),
            Slot::C => p.c = Some(value(rng, b)),
            Slot::D => p.d = Some(value(rng, b)),
            Slot::Z => p.z = Some(value(rng, b)),
            Slot::CVec => p.c_vec = Some(vector(rng, b, r)),
            Slot::EVec => p.e_vec = Some(vector(rng, b, r)),
            Slot::XVec => p.x_vec = Some(vector(rng, b, r)),
            Slot::NVec => {
                p.n_vec = Some(MultiIndex::from((0..r).map(|_| rng.gen_range(0..=sc.max_n)).collect::<Vec<_>>()))
            }
            Slot::BigN => p.big_n = Some(rng.gen_range(0..=sc.max_big_n)),
        }
    }
    p
}

/// `log2 |term(k)|`, `-inf` for a vanishing term.
fn log_term<T: Field>(plan: &mut SeriesPlan<T>, k: Vec<i64>) -> Result<f64> {
    Ok(plan.term(&k, Eval::Cached)?.log2_abs())
}

/// Every summand along the rays `t s`, `s ∈ {-2..2}^r` (bilateral) or
/// `{0..2}^r` (unilateral), must shrink by at least the decay factor per
/// unit of `max |k_i|` between the two probe points.
fn rays_decay<T: Field>(plan: &mut SeriesPlan<T>, bilateral: bool) -> Result<bool> {
    let r = plan.r();
    let lo = if bilateral { -2 } else { 0 };
    let decay = if bilateral { BILATERAL_DECAY } else { UNILATERAL_DECAY }.log2();
    let dirs = SummationDomain::Box(MultiIndex::from(vec![2 - lo; r]));
    for d in iterate(&dirs)? {
        let s: Vec<i64> = d.entries().iter().map(|v| v + lo).collect();
        let norm = s.iter().map(|v| v.abs()).max().unwrap_or(0);
        if norm == 0 {
            continue;
        }
        let near = log_term(plan, s.iter().map(|v| v * RAY.0).collect())?;
        let far = log_term(plan, s.iter().map(|v| v * RAY.1).collect())?;
        if far == f64::NEG_INFINITY {
            continue;
        }
        if near == f64::NEG_INFINITY || (far - near) / ((RAY.1 - RAY.0) * norm) as f64 > decay {
            return Ok(false);
        }
    }
    Ok(true)
}

fn admissible<T: Field>(id: Id, p: &ParameterAssignment, sc: &SampleConfig, cfg: &NumericConfig) -> Result<bool> {
    let desc = id.descriptor();
    let (mut series, rhs) = plans::<T>(id, p, cfg)?;
    let reach = match desc.domain {
        DomainKind::Box => 2 * p.n_vec.as_ref().map_or(0, |n| n.max_abs()) + 2,
        DomainKind::Simplex => 2 * p.big_n.unwrap_or(0) as i64 + 2,
        DomainKind::Unilateral | DomainKind::Bilateral => 2 * RAY.1 * 2,
    };
    if let Some(x) = &p.x_vec {
        let xs: Vec<T> = x.iter().map(T::from_scalar).collect::<Result<_>>()?;
        validate_x(&xs, series.q(), reach, cfg)?;
    }
    if !desc.terminating() {
        if let Some(z) = series.argument() {
            if z.log2_abs() > sc.arg_bound.log2() {
                return Ok(false);
            }
        }
    }
    match desc.domain {
        DomainKind::Box | DomainKind::Simplex => {
            let d = series.domain().clone();
            for k in iterate(&d)? {
                series.term(k.entries(), Eval::Cached)?;
            }
        }
        DomainKind::Unilateral => {
            for l in 0..=(2 * PROBE as u32) {
                for k in layer(p.r, l) {
                    series.term(k.entries(), Eval::Cached)?;
                }
            }
            if !rays_decay(&mut series, false)? {
                return Ok(false);
            }
        }
        DomainKind::Bilateral => {
            let window = SummationDomain::Box(MultiIndex::from(vec![2 * PROBE; p.r]));
            for k in iterate(&window)? {
                let k: Vec<i64> = k.entries().iter().map(|v| v - PROBE).collect();
                series.term(&k, Eval::Cached)?;
            }
            if !rays_decay(&mut series, true)? {
                return Ok(false);
            }
        }
    }
    rhs.eval(cfg)?;
    Ok(true)
}

/// Draws parameters for `(id, r)` from `seed` until every denominator on
/// the (probed) domain is nonzero, no `x_i/x_j` is a small power of `q`
/// and, for nonterminating ids, the series argument is at most
/// `arg_bound` in modulus with terms decaying geometrically.
pub fn sample_parameters(
    id: Id,
    r: usize,
    seed: u64,
    sc: &SampleConfig,
    cfg: &NumericConfig,
) -> Result<ParameterAssignment> {
    if !id.descriptor().admits_r(r) {
        return Err(Error::Schema(format!("{id} is not defined for r = {r}")));
    }
    if !id.descriptor().terminating() && sc.backend.is_exact() {
        return Err(Error::BackendMismatch(format!("{id} is evaluated in the float backend only")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sc.max_attempts {
        let p = draw(id, r, &mut rng, sc);
        if id == Id::QBinomial && p.z.as_ref().is_some_and(|z| z.log2_abs() > sc.arg_bound.log2()) {
            continue;
        }
        let ok = with_field!(sc.backend, T => admissible::<T>(id, &p, sc, cfg));
        match ok {
            Ok(true) => return Ok(p),
            Ok(false) => {}
            Err(Error::Pole(_) | Error::DivisionByZero(_) | Error::ConstraintViolated(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Err(Error::SamplingExhausted(sc.max_attempts))
}
