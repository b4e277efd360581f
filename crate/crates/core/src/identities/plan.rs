//! Declarative summands and products.
//!
//! Every series in the registry is a product of the same few kinds of
//! factors: q-shifted factorials indexed by `k_i`, `|k|` or `|k| - k_i`,
//! the very-well-poised factor, the A_r cross ratio, an argument power and
//! a power of `q`. A [`SeriesPlan`] lists those factors with their bases
//! fixed once per parameter assignment; a summand is then assembled from
//! scratch for every `k`.

use crate::error::{Error, Result};
use crate::lattice::{e2, CrossRatio, MultiIndex, SummationDomain};
use crate::numerics::{poch, pow_int, Field, Frac, NumericConfig, PochTable, PowTable};

/// Which index a per-coordinate factorial is raised to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Idx {
    /// `k_i`
    Ki,
    /// `|k|`
    K,
    /// `|k| - k_i`
    KMinusKi,
}

/// How q-shifted factorials are obtained while assembling a summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eval {
    /// Read from lazily grown per-base tables.
    Cached,
    /// Recomputed for every summand. Bit-identical to `Cached`.
    Scratch,
}

#[derive(Debug, Clone)]
struct Factorials<T> {
    tables: Vec<PochTable<T>>,
    up: bool,
}

#[derive(Debug, Clone)]
pub struct SeriesPlan<T> {
    r: usize,
    q: T,
    cfg: NumericConfig,
    domain: SummationDomain,
    cross: Option<CrossRatio<T>>,
    pairs: Vec<Factorials<T>>,
    per: Vec<(Factorials<T>, Idx)>,
    global: Vec<Factorials<T>>,
    vwp: Option<T>,
    per_vwp: Option<Vec<T>>,
    xpow: Option<Vec<T>>,
    arg: Option<T>,
    qlin: Vec<i64>,
    qe2: i64,
    pows: PowTable<T>,
}

fn apply<T: Field>(
    frac: &mut Frac<T>,
    table: &mut PochTable<T>,
    k: i64,
    up: bool,
    mode: Eval,
    q: &T,
    cfg: &NumericConfig,
) -> Result<()> {
    let mut fresh;
    let t = match mode {
        Eval::Cached => table,
        Eval::Scratch => {
            fresh = PochTable::new(table.base(), q, cfg);
            &mut fresh
        }
    };
    if up {
        frac.times_poch(t, k)
    } else {
        frac.over_poch(t, k)
    }
}

impl<T: Field> SeriesPlan<T> {
    pub fn new(r: usize, q: &T, domain: SummationDomain, cfg: &NumericConfig) -> Self {
        SeriesPlan {
            r,
            q: q.clone(),
            cfg: *cfg,
            domain,
            cross: None,
            pairs: Vec::new(),
            per: Vec::new(),
            global: Vec::new(),
            vwp: None,
            per_vwp: None,
            xpow: None,
            arg: None,
            qlin: vec![0; r],
            qe2: 0,
            pows: PowTable::new(q),
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn domain(&self) -> &SummationDomain {
        &self.domain
    }

    pub fn q(&self) -> &T {
        &self.q
    }

    pub fn argument(&self) -> Option<&T> {
        self.arg.as_ref()
    }

    fn table(&self, base: T) -> PochTable<T> {
        PochTable::new(&base, &self.q, &self.cfg)
    }

    /// `∏_{i<j}(1 - q^{k_i-k_j} x_i/x_j)/(1 - x_i/x_j)`.
    pub fn cross(&mut self, x: &[T]) -> Result<&mut Self> {
        if self.r > 1 {
            self.cross = Some(CrossRatio::new(x, &self.cfg)?);
        }
        Ok(self)
    }

    /// `∏_{i,j} (base(i,j))_{k_i}` in the numerator (`up`) or denominator.
    pub fn pair(&mut self, up: bool, base: impl Fn(usize, usize) -> T) -> &mut Self {
        let mut tables = Vec::with_capacity(self.r * self.r);
        for i in 0..self.r {
            for j in 0..self.r {
                tables.push(self.table(base(i, j)));
            }
        }
        self.pairs.push(Factorials { tables, up });
        self
    }

    /// `∏_i (base(i))_{idx}`.
    pub fn per(&mut self, idx: Idx, up: bool, base: impl Fn(usize) -> T) -> &mut Self {
        let tables = (0..self.r).map(|i| self.table(base(i))).collect();
        self.per.push((Factorials { tables, up }, idx));
        self
    }

    /// `(base)_{|k|}`.
    pub fn global(&mut self, up: bool, base: T) -> &mut Self {
        let tables = vec![self.table(base)];
        self.global.push(Factorials { tables, up });
        self
    }

    /// `(1 - a q^{2|k|})/(1 - a)`.
    pub fn vwp(&mut self, a: &T) -> &mut Self {
        self.vwp = Some(a.clone());
        self
    }

    /// `∏_i (1 - a_i q^{k_i+|k|})/(1 - a_i)`.
    pub fn per_vwp(&mut self, a: Vec<T>) -> &mut Self {
        self.per_vwp = Some(a);
        self
    }

    /// `∏_i x_i^{k_i}`.
    pub fn xpow(&mut self, x: &[T]) -> &mut Self {
        self.xpow = Some(x.to_vec());
        self
    }

    /// `z^{|k|}`.
    pub fn arg(&mut self, z: T) -> &mut Self {
        self.arg = Some(z);
        self
    }

    /// `q^{Σ c_i k_i + c_e2 e_2(k)}` with `c_i = offset + i` (1-based `i`).
    pub fn qpower(&mut self, offset: i64, e2_coeff: i64) -> &mut Self {
        self.qlin = (0..self.r as i64).map(|i| i + 1 + offset).collect();
        self.qe2 = e2_coeff;
        self
    }

    /// The summand at `k`.
    #[allow(clippy::needless_range_loop)]
    pub fn term(&mut self, k: &[i64], mode: Eval) -> Result<T> {
        if k.len() != self.r {
            return Err(Error::Schema(format!("summand index has {} entries, r = {}", k.len(), self.r)));
        }
        let SeriesPlan { r, q, cfg, cross, pairs, per, global, vwp, per_vwp, xpow, arg, qlin, qe2, pows, .. } = self;
        let r = *r;
        let mut fresh_pows;
        let pows = match mode {
            Eval::Cached => pows,
            Eval::Scratch => {
                fresh_pows = PowTable::new(q);
                &mut fresh_pows
            }
        };
        let kk: i64 = k.iter().sum();
        let mut frac = Frac::one(q);
        if let Some(c) = cross {
            frac.mul(&c.numerator(k, pows)?);
            frac.div(c.denominator(), cfg.pole_floor, "cross-ratio denominator")?;
        }
        for f in pairs.iter_mut() {
            for i in 0..r {
                for j in 0..r {
                    apply(&mut frac, &mut f.tables[i * r + j], k[i], f.up, mode, q, cfg)?;
                }
            }
        }
        for (f, idx) in per.iter_mut() {
            for i in 0..r {
                let m = match idx {
                    Idx::Ki => k[i],
                    Idx::K => kk,
                    Idx::KMinusKi => kk - k[i],
                };
                apply(&mut frac, &mut f.tables[i], m, f.up, mode, q, cfg)?;
            }
        }
        for f in global.iter_mut() {
            apply(&mut frac, &mut f.tables[0], kk, f.up, mode, q, cfg)?;
        }
        if let Some(a) = vwp {
            frac.mul(&a.mul(&pows.get(2 * kk)?).one_minus());
            frac.div(&a.one_minus(), cfg.pole_floor, "1 - a")?;
        }
        if let Some(av) = per_vwp {
            for (i, a) in av.iter().enumerate() {
                frac.mul(&a.mul(&pows.get(k[i] + kk)?).one_minus());
                frac.div(&a.one_minus(), cfg.pole_floor, "1 - a x_i")?;
            }
        }
        if let Some(xs) = xpow {
            for (i, x) in xs.iter().enumerate() {
                frac.mul(&pow_int(x, k[i])?);
            }
        }
        if let Some(z) = arg {
            frac.mul(&pow_int(z, kk)?);
        }
        let mut e: i64 = qlin.iter().zip(k).map(|(c, v)| c * v).sum();
        if *qe2 != 0 {
            e += *qe2 * e2(&MultiIndex::from(k.to_vec()));
        }
        if e != 0 {
            frac.mul(&pows.get(e)?);
        }
        frac.value()
    }
}

/// Index of a right-hand-side factorial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RIdx {
    Fin(i64),
    Inf,
}

/// A product of q-shifted factorials with fixed indices.
#[derive(Debug, Clone)]
pub struct RhsPlan<T> {
    q: T,
    factors: Vec<(T, RIdx, bool)>,
}

impl<T: Field> RhsPlan<T> {
    pub fn new(q: &T) -> Self {
        RhsPlan { q: q.clone(), factors: Vec::new() }
    }

    pub fn up(&mut self, base: T, idx: RIdx) -> &mut Self {
        self.factors.push((base, idx, true));
        self
    }

    pub fn down(&mut self, base: T, idx: RIdx) -> &mut Self {
        self.factors.push((base, idx, false));
        self
    }

    pub fn is_finite(&self) -> bool {
        self.factors.iter().all(|(_, i, _)| matches!(i, RIdx::Fin(_)))
    }

    /// The product and the largest number of factors used by an infinite product.
    pub fn eval(&self, cfg: &NumericConfig) -> Result<(T, usize)> {
        let mut frac = Frac::one(&self.q);
        let mut most = 0;
        for (base, idx, up) in &self.factors {
            match idx {
                RIdx::Fin(m) => {
                    let mut t = PochTable::new(base, &self.q, cfg);
                    if *up {
                        frac.times_poch(&mut t, *m)?;
                    } else {
                        frac.over_poch(&mut t, *m)?;
                    }
                }
                RIdx::Inf => {
                    if self.q.backend().is_exact() {
                        return Err(Error::BackendMismatch(
                            "infinite products are not evaluated in the exact backend".into(),
                        ));
                    }
                    let p = poch::qpoch_inf(base, &self.q, cfg)?;
                    most = most.max(p.factors);
                    if *up {
                        frac.mul(&p.value);
                    } else {
                        frac.div(&p.value, cfg.pole_floor, "infinite product in a denominator")?;
                    }
                }
            }
        }
        Ok((frac.value()?, most))
    }
}
