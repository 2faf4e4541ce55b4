//! Monte Carlo realization of a random fixed point.
//!
//! Every sampled outcome ω gets its own coefficient check (or fit), its own
//! Picard solve, and the results are reduced in ω order. "Almost surely" is
//! read as "for every sampled ω", with the failing fraction reported instead
//! of assumed away.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::contraction::{
    certify_measured, fit_measured, measure_pairs, Coefficients, ConditionKind,
    ContractionCertificate, HRCoefficients,
};
use crate::error::{Error, Result};
use crate::export::{format_float, CsvTable};
use crate::picard::{picard_solve, PicardConfig, PicardError, PicardReport, PicardStatus};
use crate::scalar::Real;
use crate::space::{apply, OmegaSample, ProbabilitySpace, RandomOperator, Vector};

/// Stream id used for pair sampling, kept apart from user streams.
const PAIR_STREAM: u64 = 0x7061_6972;

pub type CoefficientGenerator<T> = Arc<dyn Fn(&OmegaSample) -> HRCoefficients<T> + Send + Sync>;

#[derive(Clone)]
pub enum CoefficientSource<T> {
    /// User-supplied `ω ↦ (α₁(ω), …, α₅(ω))`, checked on the pair sample.
    Declared(CoefficientGenerator<T>),
    /// Minimal-sum coefficients fitted on the pair sample.
    Fitted,
}

/// How the per-ω pair sample is drawn: `count` pairs uniform in the box of
/// half-width `radius` around the start, plus `(y, Ty)` and `(Ty, y)` orbit
/// pairs for the first `orbit_pairs` sampled points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSampling<T> {
    pub count: usize,
    pub radius: T,
    pub orbit_pairs: usize,
}

impl<T: Real> Default for PairSampling<T> {
    fn default() -> Self {
        Self {
            count: 64,
            radius: T::lit(10.0),
            orbit_pairs: 32,
        }
    }
}

#[derive(Clone)]
pub struct RandomCoefficientSpec<T> {
    pub source: CoefficientSource<T>,
    /// The caller's claim that every generated tuple has `Σαᵢ < 1`.
    pub declared_feasible: bool,
    pub pairs: PairSampling<T>,
}

impl<T: Real> RandomCoefficientSpec<T> {
    pub fn declared(
        generator: impl Fn(&OmegaSample) -> HRCoefficients<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            source: CoefficientSource::Declared(Arc::new(generator)),
            declared_feasible: true,
            pairs: PairSampling::default(),
        }
    }

    pub fn fitted() -> Self {
        Self {
            source: CoefficientSource::Fitted,
            declared_feasible: false,
            pairs: PairSampling::default(),
        }
    }

    pub fn with_pairs(mut self, pairs: PairSampling<T>) -> Self {
        self.pairs = pairs;
        self
    }
}

/// Draws the per-ω pair sample around `center`.
pub fn sample_pairs<T: Real, O: RandomOperator<T> + ?Sized>(
    op: &O,
    omega: &OmegaSample,
    center: &Vector<T>,
    sampling: &PairSampling<T>,
) -> Result<Vec<(Vector<T>, Vector<T>)>> {
    let mut rng = omega.rng_stream(PAIR_STREAM);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
        Vector::new(
            center
                .iter()
                .map(|&c| c + sampling.radius * T::lit(rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    };
    let mut pairs = Vec::with_capacity(sampling.count + 2 * sampling.orbit_pairs);
    let mut firsts = Vec::new();
    for _ in 0..sampling.count {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        firsts.push(x.clone());
        pairs.push((x, y));
    }
    for i in 0..sampling.orbit_pairs {
        let y = if i < firsts.len() {
            firsts[i].clone()
        } else {
            draw(&mut rng)
        };
        let ty = apply(op, omega, &y)?;
        pairs.push((y.clone(), ty.clone()));
        pairs.push((ty, y));
    }
    Ok(pairs)
}

/// Coefficients and certificate for one outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaCertificate<T> {
    pub coefficients: HRCoefficients<T>,
    pub feasible: bool,
    pub certificate: Option<ContractionCertificate<T>>,
}

/// Validates or fits the coefficients at `omega` and certifies them.
pub fn certify_omega<T: Real, O: RandomOperator<T> + ?Sized>(
    op: &O,
    omega: &OmegaSample,
    spec: &RandomCoefficientSpec<T>,
    center: &Vector<T>,
    cfg: &PicardConfig<T>,
) -> Result<OmegaCertificate<T>> {
    let pairs = sample_pairs(op, omega, center, &spec.pairs)?;
    let measured = measure_pairs(op, omega, &pairs, &cfg.norm)?;
    let coefficients = match &spec.source {
        CoefficientSource::Declared(g) => g(omega),
        CoefficientSource::Fitted => fit_measured(ConditionKind::HardyRogers, &measured)?,
    };
    let feasible = coefficients.is_feasible();
    let certificate = if feasible {
        Some(certify_measured(
            ConditionKind::HardyRogers,
            *omega,
            Coefficients::HardyRogers(coefficients),
            &measured,
        )?)
    } else {
        None
    };
    Ok(OmegaCertificate {
        coefficients,
        feasible,
        certificate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaStatus {
    Converged,
    NotConverged,
    Diverged,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaOutcome<T: Real> {
    pub omega: OmegaSample,
    pub status: OmegaStatus,
    pub coefficients: Option<HRCoefficients<T>>,
    pub coefficients_feasible: bool,
    pub certificate: Option<ContractionCertificate<T>>,
    pub report: Option<PicardReport<T>>,
    pub message: Option<String>,
}

impl<T: Real> OmegaOutcome<T> {
    fn failed(omega: OmegaSample, e: &Error) -> Self {
        Self {
            omega,
            status: OmegaStatus::Failed,
            coefficients: None,
            coefficients_feasible: false,
            certificate: None,
            report: None,
            message: Some(e.to_string()),
        }
    }

    pub fn certified(&self) -> bool {
        self.certificate.as_ref().is_some_and(|c| c.passes())
    }
}

/// Result of a Picard solve folded into an outcome record.
pub(crate) fn outcome_from_solve<T: Real>(
    omega: OmegaSample,
    cert: Option<OmegaCertificate<T>>,
    solved: std::result::Result<PicardReport<T>, PicardError<T>>,
) -> std::result::Result<OmegaOutcome<T>, Error> {
    let (coefficients, coefficients_feasible, certificate) = match cert {
        Some(c) => (Some(c.coefficients), c.feasible, c.certificate),
        None => (None, false, None),
    };
    let (status, report, message) = match solved {
        Ok(r) => {
            let status = if r.status == PicardStatus::Converged {
                OmegaStatus::Converged
            } else {
                OmegaStatus::NotConverged
            };
            (status, Some(r), None)
        }
        Err(PicardError::Diverged(r)) => (
            OmegaStatus::Diverged,
            Some(*r),
            Some("divergence detected".to_string()),
        ),
        Err(PicardError::Stopped { report, iteration }) => (
            OmegaStatus::Failed,
            Some(*report),
            Some(format!("stopped at iteration {iteration}")),
        ),
        Err(PicardError::Invalid(e)) => return Err(e),
    };
    Ok(OmegaOutcome {
        omega,
        status,
        coefficients,
        coefficients_feasible,
        certificate,
        report,
        message,
    })
}

/// Cross-ω summary of a random fixed-point solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomSolveSummary<T: Real> {
    pub master_seed: u64,
    pub n_samples: u64,
    pub tol: T,
    /// Fraction of ω whose returned point has residual ≤ tol.
    pub residual_census: T,
    /// `sqrt(mean ‖x*(ω)‖²)` over ω that did not diverge or fail.
    pub meansq_norm: T,
    pub max_residual: T,
    pub converged: usize,
    pub not_converged: usize,
    pub diverged: usize,
    pub failed: usize,
    /// Fraction of ω whose coefficients violate `Σαᵢ < 1`.
    pub feasibility_violation_fraction: T,
    /// Set when the violation fraction is positive despite a feasibility
    /// declaration.
    pub feasibility_warning: bool,
    pub per_omega: Vec<OmegaOutcome<T>>,
}

impl<T: Real> RandomSolveSummary<T> {
    pub(crate) fn reduce(
        space: &ProbabilitySpace,
        tol: T,
        declared_feasible: bool,
        per_omega: Vec<OmegaOutcome<T>>,
        norm_of: impl Fn(&Vector<T>) -> T,
    ) -> Self {
        let n = per_omega.len();
        let nf = T::from_usize_lossy(n.max(1));
        let mut census = 0usize;
        let mut sq_sum = T::zero();
        let mut counted = 0usize;
        let mut max_residual = T::zero();
        let mut violations = 0usize;
        let (mut converged, mut not_converged, mut diverged, mut failed) = (0, 0, 0, 0);

        for o in &per_omega {
            if o.coefficients.is_some() && !o.coefficients_feasible {
                violations += 1;
            }
            match o.status {
                OmegaStatus::Converged => converged += 1,
                OmegaStatus::NotConverged => not_converged += 1,
                OmegaStatus::Diverged => diverged += 1,
                OmegaStatus::Failed => failed += 1,
            }
            if matches!(o.status, OmegaStatus::Diverged | OmegaStatus::Failed) {
                continue;
            }
            if let Some(r) = &o.report {
                if r.residual <= tol {
                    census += 1;
                }
                max_residual = max_residual.max(r.residual);
                let nx = norm_of(&r.fixed_point);
                sq_sum = sq_sum + nx * nx;
                counted += 1;
            }
        }
        let meansq_norm = if counted == 0 {
            T::nan()
        } else {
            (sq_sum / T::from_usize_lossy(counted)).sqrt()
        };
        let violation_fraction = T::from_usize_lossy(violations) / nf;
        Self {
            master_seed: space.master_seed(),
            n_samples: space.n_samples(),
            tol,
            residual_census: T::from_usize_lossy(census) / nf,
            meansq_norm,
            max_residual,
            converged,
            not_converged,
            diverged,
            failed,
            feasibility_violation_fraction: violation_fraction,
            feasibility_warning: declared_feasible && violations > 0,
            per_omega,
        }
    }

    /// The lone report when the space has a single outcome.
    pub fn single_report(&self) -> Option<&PicardReport<T>> {
        match self.per_omega.as_slice() {
            [only] => only.report.as_ref(),
            _ => None,
        }
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = (&OmegaSample, &Vector<T>)> {
        self.per_omega
            .iter()
            .filter_map(|o| o.report.as_ref().map(|r| (&o.omega, &r.fixed_point)))
    }

    /// CSV with columns `omega_index, residual, iterations, norm_of_fixed_point`.
    pub fn omega_table_csv(&self, norm_of: impl Fn(&Vector<T>) -> T) -> String {
        let mut table = CsvTable::new(&[
            "omega_index",
            "residual",
            "iterations",
            "norm_of_fixed_point",
        ]);
        for o in &self.per_omega {
            let (res, iters, nx) = match &o.report {
                Some(r) => (
                    format_float(r.residual.as_f64()),
                    r.iterations.to_string(),
                    format_float(norm_of(&r.fixed_point).as_f64()),
                ),
                None => (String::new(), String::new(), String::new()),
            };
            table.row(&[o.omega.index.to_string(), res, iters, nx]);
        }
        table.finish()
    }
}

/// Where the iteration starts at each ω.
pub enum StartPoint<'a, T> {
    Shared(&'a Vector<T>),
    PerOmega(&'a (dyn Fn(&OmegaSample) -> Vector<T> + Sync)),
}

impl<T: Real> StartPoint<'_, T> {
    fn at(&self, omega: &OmegaSample) -> Vector<T> {
        match self {
            StartPoint::Shared(x) => (*x).clone(),
            StartPoint::PerOmega(f) => f(omega),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub parallel: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { parallel: true }
    }
}

pub(crate) fn map_omegas<T, R, F>(space: &ProbabilitySpace, opts: &RunOptions, f: F) -> Vec<R>
where
    T: Real,
    R: Send,
    F: Fn(OmegaSample) -> R + Sync + Send,
{
    let omegas: Vec<OmegaSample> = space.samples().collect();
    if opts.parallel {
        omegas.into_par_iter().map(f).collect()
    } else {
        omegas.into_iter().map(f).collect()
    }
}

fn solve_at<T: Real, O: RandomOperator<T> + ?Sized>(
    op: &O,
    omega: OmegaSample,
    spec: &RandomCoefficientSpec<T>,
    x0: &Vector<T>,
    cfg: &PicardConfig<T>,
) -> Result<OmegaOutcome<T>> {
    let cert = match certify_omega(op, &omega, spec, x0, cfg) {
        Ok(c) => c,
        Err(e @ (Error::Shape { .. } | Error::InvalidWeights | Error::EmptyVector)) => {
            return Err(e)
        }
        Err(e) => return Ok(OmegaOutcome::failed(omega, &e)),
    };
    let solved = picard_solve(op, &omega, x0, cert.certificate.as_ref(), cfg);
    outcome_from_solve(omega, Some(cert), solved)
}

/// Solves at every sampled outcome from a shared start. Runs in parallel;
/// results do not depend on the schedule.
pub fn solve_random_fixed_point<T: Real, O: RandomOperator<T> + ?Sized>(
    op: &O,
    space: &ProbabilitySpace,
    coeffs: &RandomCoefficientSpec<T>,
    x0: &Vector<T>,
    cfg: &PicardConfig<T>,
) -> Result<RandomSolveSummary<T>> {
    solve_random_fixed_point_with(
        op,
        space,
        coeffs,
        &StartPoint::Shared(x0),
        cfg,
        &RunOptions::default(),
    )
}

pub fn solve_random_fixed_point_with<T: Real, O: RandomOperator<T> + ?Sized>(
    op: &O,
    space: &ProbabilitySpace,
    coeffs: &RandomCoefficientSpec<T>,
    start: &StartPoint<'_, T>,
    cfg: &PicardConfig<T>,
    opts: &RunOptions,
) -> Result<RandomSolveSummary<T>> {
    cfg.validate()?;
    cfg.norm.validate(op.dim())?;
    let outcomes = map_omegas::<T, _, _>(space, opts, |omega| {
        let x0 = start.at(&omega);
        solve_at(op, omega, coeffs, &x0, cfg)
    });
    let per_omega = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let norm = cfg.norm.clone();
    Ok(RandomSolveSummary::reduce(
        space,
        cfg.tol,
        coeffs.declared_feasible,
        per_omega,
        |x| norm.norm_unchecked(x.as_slice()),
    ))
}

/// Worst-case spread of fixed points reached from several starts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport<T> {
    /// Max over ω of the max pairwise distance between returned points.
    pub spread: T,
    pub per_omega_spread: Vec<T>,
    /// True when every ω was certified and every solve converged.
    pub certified: bool,
    pub non_converged: usize,
    pub diverged: usize,
}

pub fn uniqueness_probe<T: Real, O: RandomOperator<T> + ?Sized>(
    op: &O,
    space: &ProbabilitySpace,
    coeffs: &RandomCoefficientSpec<T>,
    starts: &[Vector<T>],
    cfg: &PicardConfig<T>,
) -> Result<UniquenessReport<T>> {
    if starts.len() < 2 {
        return Err(Error::TooFewStarts {
            needed: 2,
            got: starts.len(),
        });
    }
    cfg.validate()?;
    cfg.norm.validate(op.dim())?;

    struct PerOmega<T> {
        spread: T,
        certified: bool,
        non_converged: usize,
        diverged: usize,
    }

    let rows = map_omegas::<T, _, _>(
        space,
        &RunOptions::default(),
        |omega| -> Result<PerOmega<T>> {
            let cert = certify_omega(op, &omega, coeffs, &starts[0], cfg).ok();
            let passing = cert.as_ref().and_then(|c| c.certificate.as_ref());
            let mut points = Vec::with_capacity(starts.len());
            let mut non_converged = 0;
            let mut diverged = 0;
            for x0 in starts {
                match picard_solve(op, &omega, x0, passing, cfg) {
                    Ok(r) => {
                        if !r.converged() {
                            non_converged += 1;
                        }
                        points.push(r.fixed_point);
                    }
                    Err(PicardError::Diverged(_)) | Err(PicardError::Stopped { .. }) => {
                        diverged += 1
                    }
                    Err(PicardError::Invalid(e)) => return Err(e),
                }
            }
            let mut spread = T::zero();
            for (i, a) in points.iter().enumerate() {
                for b in &points[i + 1..] {
                    spread = spread.max(cfg.norm.distance_unchecked(a.as_slice(), b.as_slice()));
                }
            }
            if diverged > 0 {
                spread = T::infinity();
            }
            Ok(PerOmega {
                spread,
                certified: passing.is_some_and(|c| c.passes()),
                non_converged,
                diverged,
            })
        },
    );

    let mut report = UniquenessReport {
        spread: T::zero(),
        per_omega_spread: Vec::new(),
        certified: true,
        non_converged: 0,
        diverged: 0,
    };
    for row in rows {
        let row = row?;
        report.spread = report.spread.max(row.spread);
        report.per_omega_spread.push(row.spread);
        report.certified &= row.certified && row.non_converged == 0 && row.diverged == 0;
        report.non_converged += row.non_converged;
        report.diverged += row.diverged;
    }
    Ok(report)
}
