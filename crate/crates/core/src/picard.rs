//! Picard iteration `xₙ₊₁ = T(ω, xₙ)` with certified error bounds.
//!
//! # Contraction ratio
//!
//! Applying the Hardy-Rogers inequality to the iterate pair `(xₙ, xₙ₋₁)` and
//! writing `dₙ = ‖xₙ₊₁ − xₙ‖` gives, since `‖xₙ − T xₙ₋₁‖ = 0` and
//! `‖xₙ₋₁ − T xₙ‖ ≤ dₙ₋₁ + dₙ`,
//!
//! ```text
//! dₙ (1 − a2 − a5) ≤ (a1 + a3 + a5) dₙ₋₁
//! ```
//!
//! and the swapped pair gives `dₙ (1 − a3 − a4) ≤ (a1 + a2 + a4) dₙ₋₁`.
//! Adding both:
//!
//! ```text
//! dₙ ≤ k dₙ₋₁,   k = (a1 + s + t) / (1 − s − t),   s = (a2+a3)/2,  t = (a4+a5)/2
//! ```
//!
//! and `k < 1` exactly when `Σaᵢ < 1`. The usual geometric tail bounds
//! follow: `‖xₙ − x*‖ ≤ kⁿ/(1−k)·d₀` and `‖xₙ₊₁ − x*‖ ≤ k/(1−k)·dₙ`.

use serde::Serialize;
use thiserror::Error;

use crate::contraction::{ConditionKind, ContractionCertificate, HRCoefficients};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::space::{apply, NormKind, OmegaSample, RandomOperator, Vector};

/// Window and growth factor of the divergence guard.
pub const DIVERGENCE_WINDOW: usize = 20;
pub const DIVERGENCE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardConfig<T> {
    /// Target a-posteriori error.
    pub tol: T,
    pub max_iter: usize,
    pub norm: NormKind<T>,
}

impl<T: Real> PicardConfig<T> {
    pub fn new(tol: T, max_iter: usize, norm: NormKind<T>) -> Self {
        Self {
            tol,
            max_iter,
            norm,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero()) || !self.tol.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "tol = {} must be positive",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PicardStatus {
    /// Certified stopping rule met.
    Converged,
    /// Ran out of iterations, or ran without a valid certificate.
    MaxIter,
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardReport<T> {
    pub fixed_point: Vector<T>,
    pub iterations: usize,
    /// `‖xₙ₊₁ − xₙ‖` for `n = 0 … iterations−1`.
    pub step_norms: Vec<T>,
    /// `step_norms[n] / step_norms[n−1]` for `n ≥ 1`.
    pub ratio_estimates: Vec<T>,
    /// Derived contraction ratio; absent without a valid certificate.
    pub k_bound: Option<T>,
    pub apriori_bound: Option<T>,
    pub aposteriori_bound: Option<T>,
    /// `‖T(ω, x*) − x*‖` at the returned point.
    pub residual: T,
    pub status: PicardStatus,
    pub certified: bool,
}

impl<T: Real> PicardReport<T> {
    pub fn converged(&self) -> bool {
        self.status == PicardStatus::Converged
    }

    pub fn last_step(&self) -> Option<T> {
        self.step_norms.last().copied()
    }

    /// A-priori bound `kⁿ/(1−k)·d₀` on `‖xₙ − x*‖` after `n` iterations.
    pub fn apriori_at(&self, n: usize) -> Option<T> {
        let k = self.k_bound?;
        let d0 = *self.step_norms.first()?;
        Some(apriori(k, n, d0))
    }

    /// CSV with columns `iter, step_norm, ratio`. The ratio of the first row is
    /// empty.
    pub fn steps_csv(&self) -> String {
        let mut out = String::from("iter,step_norm,ratio\n");
        for (i, s) in self.step_norms.iter().enumerate() {
            let ratio = if i == 0 {
                String::new()
            } else {
                crate::export::format_float(self.ratio_estimates[i - 1].as_f64())
            };
            out.push_str(&format!(
                "{},{},{}\n",
                i,
                crate::export::format_float(s.as_f64()),
                ratio
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PicardError<T: Real> {
    #[error("Picard iteration diverged after {} iterations", .0.iterations)]
    Diverged(Box<PicardReport<T>>),
    #[error("Picard iteration stopped by observer at iteration {iteration}")]
    Stopped {
        iteration: usize,
        report: Box<PicardReport<T>>,
    },
    #[error(transparent)]
    Invalid(#[from] Error),
}

impl<T: Real> PicardError<T> {
    pub fn partial_report(&self) -> Option<&PicardReport<T>> {
        match self {
            PicardError::Diverged(r) => Some(r),
            PicardError::Stopped { report, .. } => Some(report),
            PicardError::Invalid(_) => None,
        }
    }
}

/// `k = (a1 + s + t)/(1 − s − t)` with `s = (a2+a3)/2`, `t = (a4+a5)/2`.
pub fn hr_contraction_ratio<T: Real>(c: &HRCoefficients<T>) -> Result<T> {
    if !c.is_feasible() {
        return Err(Error::InfeasibleCoefficients {
            kind: ConditionKind::HardyRogers,
            reason: format!(
                "need nonnegative coefficients with sum below 1, got sum {}",
                c.sum()
            ),
        });
    }
    let half = T::lit(0.5);
    let s = (c.a2 + c.a3) * half;
    let t = (c.a4 + c.a5) * half;
    Ok((c.a1 + s + t) / (T::one() - s - t))
}

fn apriori<T: Real>(k: T, n: usize, d0: T) -> T {
    let n = i32::try_from(n).unwrap_or(i32::MAX);
    k.powi(n) / (T::one() - k) * d0
}

/// Contraction ratio backed by `cert`, if the certificate is usable.
pub fn certified_ratio<T: Real>(cert: Option<&ContractionCertificate<T>>) -> Option<T> {
    let cert = cert?;
    if !cert.passes() {
        return None;
    }
    hr_contraction_ratio(&cert.hardy_rogers()?).ok()
}

/// Runs the iteration from `x0`. See [`picard_solve_observed`].
pub fn picard_solve<T: Real, O: RandomOperator<T> + ?Sized>(
    op: &O,
    omega: &OmegaSample,
    x0: &Vector<T>,
    cert: Option<&ContractionCertificate<T>>,
    cfg: &PicardConfig<T>,
) -> std::result::Result<PicardReport<T>, PicardError<T>> {
    picard_solve_observed(op, omega, x0, cert, cfg, |_, _| true)
}

/// Runs the iteration from `x0`, calling `observe(n, xₙ)` on every iterate
/// including `x0`. Returning `false` from the observer stops the run with
/// [`PicardError::Stopped`].
///
/// With a passing Hardy-Rogers-family certificate the run stops once
/// `k·dₙ ≤ tol·(1−k)`, i.e. once the a-posteriori error is at most `tol`.
/// Without one there is no certified stopping rule: the iteration runs to
/// `max_iter` and the report is flagged as not converged.
pub fn picard_solve_observed<T, O, F>(
    op: &O,
    omega: &OmegaSample,
    x0: &Vector<T>,
    cert: Option<&ContractionCertificate<T>>,
    cfg: &PicardConfig<T>,
    mut observe: F,
) -> std::result::Result<PicardReport<T>, PicardError<T>>
where
    T: Real,
    O: RandomOperator<T> + ?Sized,
    F: FnMut(usize, &Vector<T>) -> bool,
{
    cfg.validate()?;
    if x0.dim() != op.dim() {
        return Err(Error::Shape {
            expected: op.dim(),
            found: x0.dim(),
        }
        .into());
    }
    cfg.norm.validate(op.dim())?;
    if let Some(c) = cert {
        if c.omega.index != omega.index {
            return Err(Error::InvalidConfig(format!(
                "certificate for sample {} used at sample {}",
                c.omega.index, omega.index
            ))
            .into());
        }
    }
    let k = certified_ratio(cert);
    let dist =
        |a: &Vector<T>, b: &Vector<T>| cfg.norm.distance_unchecked(a.as_slice(), b.as_slice());

    let mut x = x0.clone();
    let mut steps: Vec<T> = Vec::new();
    let mut ratios: Vec<T> = Vec::new();
    let mut status = PicardStatus::MaxIter;

    let finish = |x: Vector<T>, steps: Vec<T>, ratios: Vec<T>, status, residual: T| {
        let iterations = steps.len();
        let (apriori_bound, aposteriori_bound) = match (k, steps.first(), steps.last()) {
            (Some(k), Some(&d0), Some(&dn)) => (
                Some(apriori(k, iterations, d0)),
                Some(k / (T::one() - k) * dn),
            ),
            _ => (None, None),
        };
        PicardReport {
            fixed_point: x,
            iterations,
            step_norms: steps,
            ratio_estimates: ratios,
            k_bound: k,
            apriori_bound,
            aposteriori_bound,
            residual,
            status,
            certified: k.is_some(),
        }
    };

    if !observe(0, &x) {
        let report = finish(x, steps, ratios, PicardStatus::MaxIter, T::nan());
        return Err(PicardError::Stopped {
            iteration: 0,
            report: Box::new(report),
        });
    }

    for n in 0..cfg.max_iter {
        let next = match apply(op, omega, &x) {
            Ok(v) => v,
            Err(Error::Evaluation(_)) => {
                let report = finish(x, steps, ratios, PicardStatus::Diverged, T::infinity());
                return Err(PicardError::Diverged(Box::new(report)));
            }
            Err(e) => return Err(e.into()),
        };
        let step = dist(&next, &x);
        if let Some(&prev) = steps.last() {
            let r = if step == T::zero() {
                T::zero()
            } else if prev == T::zero() {
                T::infinity()
            } else {
                step / prev
            };
            ratios.push(r);
        }
        steps.push(step);
        x = next;

        if !observe(n + 1, &x) {
            let report = finish(x, steps, ratios, PicardStatus::MaxIter, T::nan());
            return Err(PicardError::Stopped {
                iteration: n + 1,
                report: Box::new(report),
            });
        }

        let len = steps.len();
        if !step.is_finite()
            || (len > DIVERGENCE_WINDOW && {
                let past = steps[len - 1 - DIVERGENCE_WINDOW];
                past > T::zero() && step > T::lit(DIVERGENCE_FACTOR) * past
            })
        {
            let report = finish(x, steps, ratios, PicardStatus::Diverged, T::infinity());
            return Err(PicardError::Diverged(Box::new(report)));
        }

        if let Some(k) = k {
            if k * step <= cfg.tol * (T::one() - k) {
                status = PicardStatus::Converged;
                break;
            }
        }
    }

    let residual = match apply(op, omega, &x) {
        Ok(tx) => dist(&tx, &x),
        Err(Error::Evaluation(_)) => T::infinity(),
        Err(e) => return Err(e.into()),
    };
    Ok(finish(x, steps, ratios, status, residual))
}
