//! Registry of summation identities, their evaluation and verification.

mod catalog;
pub mod classify;
pub mod degenerate;
mod params;
mod plan;
pub mod sample;
mod sum;

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{Backend, Field, Float, NumericConfig, Scalar};

pub use catalog::{build, DomainKind, Id, IdentityDescriptor};
pub use classify::{classify, Flags, Kind, SeriesClassifier};
pub use degenerate::check_degenerations;
pub use params::{ParameterAssignment, Params, Slot};
pub use plan::{Eval, Idx, RIdx, RhsPlan, SeriesPlan};
pub use sample::{sample_parameters, SampleConfig};
pub use sum::{sum_series, Truncation};

/// Runs `$body` with `$t` bound to the field type of `$backend`.
macro_rules! with_field {
    ($backend:expr, $t:ident => $body:expr) => {
        match $backend {
            Backend::Exact => {
                type $t = BigRational;
                $body
            }
            Backend::Float { .. } => {
                type $t = Float;
                $body
            }
        }
    };
}
pub(crate) use with_field;

/// Checks `p` against the schema and standing hypotheses of `id`.
pub fn validate(id: Id, p: &ParameterAssignment) -> Result<()> {
    let desc = id.descriptor();
    if !desc.admits_r(p.r) {
        return Err(Error::Schema(format!("{} is not defined for r = {}", desc.name, p.r)));
    }
    let mut want = desc.schema.to_vec();
    want.sort();
    let have = p.present();
    if want != have {
        let names = |v: &[Slot]| v.iter().map(|s| s.name()).collect::<Vec<_>>().join(",");
        return Err(Error::Schema(format!("{} takes {{{}}}, got {{{}}}", desc.name, names(&want), names(&have))));
    }
    let backend = p.backend();
    let mut scalars: Vec<&Scalar> = [&p.a, &p.b, &p.c, &p.d, &p.z].into_iter().flatten().collect();
    for v in [&p.c_vec, &p.e_vec, &p.x_vec].into_iter().flatten() {
        if v.len() != p.r {
            return Err(Error::Schema(format!("vector parameter of length {} with r = {}", v.len(), p.r)));
        }
        scalars.extend(v.iter());
    }
    if let Some(s) = scalars.iter().find(|s| s.backend() != backend) {
        return Err(Error::BackendMismatch(format!("q is {} but a parameter is {}", backend, s.backend())));
    }
    if let Some(n) = &p.n_vec {
        if n.r() != p.r || n.entries().iter().any(|&v| v < 0) {
            return Err(Error::Schema(format!("n_vec {n} must have {} nonnegative entries", p.r)));
        }
    }
    let lq = p.q.log2_abs();
    if p.q.is_zero() || lq >= 0.0 {
        return Err(Error::ConstraintViolated(format!("need 0 < |q| < 1, got q = {}", p.q)));
    }
    if !desc.terminating() && backend.is_exact() {
        return Err(Error::BackendMismatch(format!(
            "{} is nonterminating and is evaluated in the float backend only",
            desc.name
        )));
    }
    Ok(())
}

/// Validated plans for `id` at `p`, with the convergence condition checked.
pub fn plans<T: Field>(id: Id, p: &ParameterAssignment, cfg: &NumericConfig) -> Result<(SeriesPlan<T>, RhsPlan<T>)> {
    validate(id, p)?;
    let typed = p.typed::<T>()?;
    let (series, rhs) = build(id, &typed, cfg)?;
    if !id.descriptor().terminating() {
        if let Some(z) = series.argument() {
            if z.log2_abs() >= 0.0 {
                return Err(Error::ConstraintViolated(format!(
                    "{}: series argument {} has modulus >= 1",
                    id,
                    z.render()
                )));
            }
        }
    }
    Ok((series, rhs))
}

/// Sum of the left-hand side with truncation metadata.
pub fn eval_lhs_with(id: Id, p: &ParameterAssignment, cfg: &NumericConfig, mode: Eval) -> Result<(Scalar, Truncation)> {
    with_field!(p.backend(), T => {
        let (mut s, _) = plans::<T>(id, p, cfg)?;
        let (v, t) = sum_series(&mut s, cfg, mode)?;
        Ok((v.into_scalar(), t))
    })
}

pub fn eval_lhs(id: Id, p: &ParameterAssignment, cfg: &NumericConfig) -> Result<Scalar> {
    eval_lhs_with(id, p, cfg, Eval::Cached).map(|(v, _)| v)
}

/// The closed-form product, and the largest number of factors any infinite
/// product needed.
pub fn eval_rhs_with(id: Id, p: &ParameterAssignment, cfg: &NumericConfig) -> Result<(Scalar, usize)> {
    with_field!(p.backend(), T => {
        let (_, r) = plans::<T>(id, p, cfg)?;
        let (v, n) = r.eval(cfg)?;
        Ok((v.into_scalar(), n))
    })
}

pub fn eval_rhs(id: Id, p: &ParameterAssignment, cfg: &NumericConfig) -> Result<Scalar> {
    eval_rhs_with(id, p, cfg).map(|(v, _)| v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

/// One verified instance. Field order is alphabetical so the serialized
/// form is stable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub backend: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub id: String,
    pub lhs: Option<String>,
    pub params: BTreeMap<String, String>,
    pub r: usize,
    pub residual: Option<f64>,
    pub rhs: Option<String>,
    pub seed: Option<u64>,
    pub tail: f64,
    pub terms: usize,
    pub trial: Option<usize>,
    pub verdict: Verdict,
    pub window: Option<i64>,
}

impl VerificationReport {
    pub fn new(id: &str, r: usize, backend: Backend) -> Self {
        VerificationReport {
            backend: backend.to_string(),
            error: None,
            id: id.to_string(),
            lhs: None,
            params: BTreeMap::new(),
            r,
            residual: None,
            rhs: None,
            seed: None,
            tail: 0.0,
            terms: 0,
            trial: None,
            verdict: Verdict::Fail,
            window: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed_with(mut self, e: &Error) -> Self {
        self.verdict = Verdict::Fail;
        self.error = Some(e.to_string());
        self
    }

    /// Sets values, residual and verdict from the two sides. Float sides
    /// pass when the residual is below `tol`; exact sides must be equal.
    pub fn compare(&mut self, lhs: &Scalar, rhs: &Scalar, tol: f64) -> Result<()> {
        let res = residual(lhs, rhs)?;
        self.lhs = Some(lhs.render());
        self.rhs = Some(rhs.render());
        self.residual = Some(res);
        let ok = match lhs.backend() {
            Backend::Exact => lhs == rhs,
            Backend::Float { .. } => res < tol,
        };
        self.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        Ok(())
    }
}

/// `|lhs - rhs| / max(1, |rhs|)`, and exactly 0 for equal values.
pub fn residual(lhs: &Scalar, rhs: &Scalar) -> Result<f64> {
    if lhs == rhs {
        return Ok(0.0);
    }
    let diff = lhs.try_sub(rhs)?;
    Ok((diff.log2_abs() - rhs.log2_abs().max(0.0)).exp2())
}

/// Float acceptance threshold: `100 epsilon_tail`, but never below the
/// rounding level `2^-(precision-16)` of the working precision.
pub fn tolerance(backend: Backend, cfg: &NumericConfig) -> f64 {
    match backend {
        Backend::Exact => 0.0,
        Backend::Float { precision_bits } => (100.0 * cfg.epsilon_tail).max((-(precision_bits as f64 - 16.0)).exp2()),
    }
}

/// Evaluates both sides and compares them. Errors become failed reports.
pub fn verify_instance(id: Id, p: &ParameterAssignment, cfg: &NumericConfig) -> VerificationReport {
    let backend = p.backend();
    let mut report = VerificationReport::new(id.name(), p.r, backend);
    report.params = p.render();
    let run = |report: &mut VerificationReport| -> Result<()> {
        let (lhs, trunc) = eval_lhs_with(id, p, cfg, Eval::Cached)?;
        report.terms = trunc.terms;
        report.window = trunc.window;
        report.tail = trunc.tail;
        let (rhs, _) = eval_rhs_with(id, p, cfg)?;
        report.compare(&lhs, &rhs, tolerance(backend, cfg))
    };
    match run(&mut report) {
        Ok(()) => report,
        Err(e) => report.failed_with(&e),
    }
}

/// Ids that can be evaluated in `backend`.
pub fn ids_for(backend: Backend) -> Vec<Id> {
    Id::ALL.iter().copied().filter(|id| !backend.is_exact() || id.descriptor().terminating()).collect()
}
