//! Summation over finite domains and truncation control for infinite ones.

use crate::error::{Error, Result};
use crate::lattice::{iterate, layer, shell, SummationDomain};
use crate::numerics::{Field, NumericConfig};

use super::plan::{Eval, SeriesPlan};

/// How a sum was cut off.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Truncation {
    /// Summands evaluated.
    pub terms: usize,
    /// Final half-width `M` of the window `-M <= k_i <= M` (bilateral sums).
    pub window: Option<i64>,
    /// Estimate of the neglected tail, absolute.
    pub tail: f64,
}

/// Layers always summed before the tail estimate is trusted.
const MIN_LAYERS: u32 = 4;
/// First half-width of the bilateral window.
const FIRST_WINDOW: i64 = 8;

fn mag<T: Field>(x: &T) -> f64 {
    x.log2_abs().exp2()
}

pub fn sum_series<T: Field>(plan: &mut SeriesPlan<T>, cfg: &NumericConfig, mode: Eval) -> Result<(T, Truncation)> {
    match plan.domain().clone() {
        d @ (SummationDomain::Box(_) | SummationDomain::Simplex { .. }) => {
            let mut sum = plan.q().zero_like();
            let mut terms = 0;
            for k in iterate(&d)? {
                sum = sum.add(&plan.term(k.entries(), mode)?);
                terms += 1;
            }
            Ok((sum, Truncation { terms, window: None, tail: 0.0 }))
        }
        SummationDomain::Unilateral(r) => unilateral(plan, r, cfg, mode),
        SummationDomain::Bilateral(r) => bilateral(plan, r, cfg, mode),
    }
}

/// Sums layer by layer in `|k|`. After layer `L` the tail is bounded by the
/// geometric series `S_L ρ/(1-ρ)`, where `S_L` is the layer's absolute sum
/// and `ρ` the larger of the argument modulus and the observed layer ratio.
fn unilateral<T: Field>(
    plan: &mut SeriesPlan<T>,
    r: usize,
    cfg: &NumericConfig,
    mode: Eval,
) -> Result<(T, Truncation)> {
    let z = plan.argument().map_or(0.0, mag);
    let mut sum = plan.q().zero_like();
    let mut terms = 0;
    let mut prev = f64::NAN;
    for l in 0..=cfg.max_terms as u32 {
        let mut layer_abs = 0.0;
        for k in layer(r, l) {
            let t = plan.term(k.entries(), mode)?;
            layer_abs += mag(&t);
            sum = sum.add(&t);
            terms += 1;
        }
        if l >= MIN_LAYERS {
            let scale = mag(&sum).max(1.0);
            if layer_abs == 0.0 && prev == 0.0 {
                return Ok((sum, Truncation { terms, window: None, tail: 0.0 }));
            }
            let rho = if prev > 0.0 { z.max(layer_abs / prev) } else { z };
            if rho < 1.0 {
                let tail = layer_abs * rho / (1.0 - rho);
                if tail < cfg.epsilon_tail * scale {
                    return Ok((sum, Truncation { terms, window: None, tail }));
                }
            }
        }
        prev = layer_abs;
    }
    Err(Error::NoConvergence {
        terms,
        reason: format!("tail still above {} after {} layers", cfg.epsilon_tail, cfg.max_terms),
    })
}

/// Sums over `-M <= k_i <= M`, doubling `M` until two consecutive windows
/// agree within `epsilon_tail` and every summand on the window boundary is
/// below `epsilon_tail` times the partial sum.
fn bilateral<T: Field>(plan: &mut SeriesPlan<T>, r: usize, cfg: &NumericConfig, mode: Eval) -> Result<(T, Truncation)> {
    let mut sum = plan.q().zero_like();
    let mut terms = 0;
    let mut inner = -1;
    let mut m = FIRST_WINDOW;
    let mut previous: Option<T> = None;
    while m <= cfg.max_terms as i64 {
        let mut boundary: f64 = 0.0;
        for k in shell(r, inner, m) {
            let t = plan.term(k.entries(), mode)?;
            if k.max_abs() == m {
                boundary = boundary.max(mag(&t));
            }
            sum = sum.add(&t);
            terms += 1;
        }
        let scale = mag(&sum);
        if let Some(p) = &previous {
            let change = mag(&sum.sub(p));
            if change <= cfg.epsilon_tail * scale.max(1.0) && boundary <= cfg.epsilon_tail * scale {
                return Ok((sum, Truncation { terms, window: Some(m), tail: change.max(boundary) }));
            }
        }
        previous = Some(sum.clone());
        inner = m;
        m *= 2;
    }
    Err(Error::NoConvergence { terms, reason: format!("window half-width would exceed {}", cfg.max_terms) })
}
