//! Stochastic Hammerstein equations
//!
//! ```text
//! x(t; ω) = h(t; ω) + ∫₀¹ k(t, s; ω) f(s, x(s; ω)) ds
//! ```
//!
//! discretized by the Nyström method on a quadrature grid and solved per ω by
//! Picard iteration of `U x = h + K f(·, x)`.
//!
//! # Ball invariance
//!
//! With `l = ‖K‖` and coefficients `α` for `f`, applying the five-term
//! inequality to the pair `(x, 0)` and the triangle inequality gives
//!
//! ```text
//! ‖f(x)‖ (1 − α2 − α5) ≤ (1 + α3 + α4) ‖f(0)‖ + (α1 + α2 + α4) ‖x‖
//! ```
//!
//! so `‖x‖ ≤ ρ` implies `‖U x‖ ≤ ρ` as soon as
//!
//! ```text
//! ‖h‖ + l ‖f(0)‖ (1 + α3 + α4)/(1 − α2 − α5) ≤ ρ (1 − l (α1 + α2 + α4)/(1 − α2 − α5)).
//! ```
//!
//! This "derived" inequality gates solving. The commonly quoted "stated"
//! form has `1 − l/(1 − α2 − α5)` on the right, which is never weaker since
//! `α1 + α2 + α4 ≤ 1`; it is reported alongside.

use std::sync::Arc;

use serde::Serialize;

use crate::contraction::{ConditionKind, HRCoefficients};
use crate::error::{Error, Result};
use crate::export::{format_float, CsvTable};
use crate::linalg::Matrix;
use crate::picard::{picard_solve_observed, PicardConfig, PicardError};
use crate::quadrature::QuadratureGrid;
use crate::randomfp::{
    certify_omega, map_omegas, outcome_from_solve, OmegaStatus, PairSampling,
    RandomCoefficientSpec, RandomSolveSummary, RunOptions,
};
use crate::scalar::Real;
use crate::space::{NormKind, OmegaSample, ProbabilitySpace, RandomOperator, Vector};

/// Slack allowed on `‖xₙ‖ ≤ ρ` before an iterate counts as escaped.
pub const INVARIANCE_TOL: f64 = 1e-9;

/// Relative tolerance of the power iteration behind L2 operator norms.
pub const OPERATOR_NORM_REL_TOL: f64 = 1e-10;

pub type KernelFn<T> = Arc<dyn Fn(&OmegaSample, T, T) -> T + Send + Sync>;
pub type FreeTermFn<T> = Arc<dyn Fn(&OmegaSample, T) -> T + Send + Sync>;
pub type NonlinearityFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

#[derive(Clone)]
pub struct HammersteinProblem<T> {
    pub grid: QuadratureGrid<T>,
    /// `k(t, s; ω)`
    pub kernel: KernelFn<T>,
    /// `h(t; ω)`
    pub free_term: FreeTermFn<T>,
    /// `f(t, x)`
    pub nonlinearity: NonlinearityFn<T>,
    pub rho: T,
    /// Coefficients of the five-term condition satisfied by `f`.
    pub f_coeffs: HRCoefficients<T>,
}

impl<T: Real> HammersteinProblem<T> {
    pub fn new(
        grid: QuadratureGrid<T>,
        kernel: impl Fn(&OmegaSample, T, T) -> T + Send + Sync + 'static,
        free_term: impl Fn(&OmegaSample, T) -> T + Send + Sync + 'static,
        nonlinearity: impl Fn(T, T) -> T + Send + Sync + 'static,
        rho: T,
        f_coeffs: HRCoefficients<T>,
    ) -> Result<Self> {
        let p = Self {
            grid,
            kernel: Arc::new(kernel),
            free_term: Arc::new(free_term),
            nonlinearity: Arc::new(nonlinearity),
            rho,
            f_coeffs,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if !(self.rho > T::zero()) || !self.rho.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "rho = {} must be positive",
                self.rho
            )));
        }
        if !self.f_coeffs.is_feasible() {
            return Err(Error::InfeasibleCoefficients {
                kind: ConditionKind::HardyRogers,
                reason: "f coefficients must be non-negative with sum below one".into(),
            });
        }
        Ok(())
    }

    pub fn free_term_values(&self, omega: &OmegaSample) -> Result<Vector<T>> {
        let v = Vector::new(
            self.grid
                .nodes
                .iter()
                .map(|&t| (self.free_term)(omega, t))
                .collect(),
        );
        if !v.is_finite() {
            return Err(Error::Evaluation(format!(
                "free term at sample {}",
                omega.index
            )));
        }
        Ok(v)
    }

    /// `f(tᵢ, 0)` at every node.
    pub fn f_at_zero(&self) -> Result<Vector<T>> {
        let v = Vector::new(
            self.grid
                .nodes
                .iter()
                .map(|&t| (self.nonlinearity)(t, T::zero()))
                .collect(),
        );
        if !v.is_finite() {
            return Err(Error::Evaluation("nonlinearity at x = 0".into()));
        }
        Ok(v)
    }
}

/// Nyström matrix `K[i][j] = k(tᵢ, tⱼ; ω)·wⱼ`.
pub fn discretize_operator<T: Real>(
    p: &HammersteinProblem<T>,
    omega: &OmegaSample,
) -> Result<Matrix<T>> {
    let g = &p.grid;
    g.validate()?;
    let m = g.len();
    let k = Matrix::from_fn(m, m, |i, j| {
        (p.kernel)(omega, g.nodes[i], g.nodes[j]) * g.weights[j]
    });
    if !k.is_finite() {
        return Err(Error::Evaluation(format!(
            "kernel at sample {}",
            omega.index
        )));
    }
    Ok(k)
}

/// Norm of `K` induced by the vector norm `norm`.
pub fn operator_norm<T: Real>(k: &Matrix<T>, norm: &NormKind<T>) -> Result<T> {
    if k.rows() != k.cols() {
        return Err(Error::Shape {
            expected: k.rows(),
            found: k.cols(),
        });
    }
    norm.validate(k.rows())?;
    let tol = T::lit(OPERATOR_NORM_REL_TOL).max(T::epsilon() * T::lit(16.0));
    Ok(match norm {
        NormKind::Sup => k.max_abs_row_sum(),
        NormKind::Euclidean => k.spectral_norm(tol, 20_000),
        NormKind::WeightedL2(w) => {
            let d: Vec<T> = w.iter().map(|v| v.sqrt()).collect();
            k.diagonal_similarity(&d)?.spectral_norm(tol, 20_000)
        }
    })
}

/// `x ↦ h + K f(·, x)` at one outcome.
#[derive(Clone)]
pub struct DiscreteHammerstein<T> {
    pub k: Matrix<T>,
    pub h: Vector<T>,
    pub nodes: Vec<T>,
    pub nonlinearity: NonlinearityFn<T>,
}

impl<T: Real> DiscreteHammerstein<T> {
    pub fn new(p: &HammersteinProblem<T>, omega: &OmegaSample) -> Result<Self> {
        Ok(Self {
            k: discretize_operator(p, omega)?,
            h: p.free_term_values(omega)?,
            nodes: p.grid.nodes.clone(),
            nonlinearity: p.nonlinearity.clone(),
        })
    }
}

impl<T: Real> RandomOperator<T> for DiscreteHammerstein<T> {
    fn dim(&self) -> usize {
        self.nodes.len()
    }

    fn eval(&self, _omega: &OmegaSample, x: &Vector<T>) -> Vector<T> {
        let fx: Vec<T> = self
            .nodes
            .iter()
            .zip(x.iter())
            .map(|(&t, &v)| (self.nonlinearity)(t, v))
            .collect();
        let kfx = self.k.matvec(&fx).expect("dimension checked by caller");
        Vector::new(
            kfx.iter()
                .zip(self.h.iter())
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }
}

/// Both sides of the feasibility inequality in each variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityReport<T> {
    pub omega_index: u64,
    pub l_omega: T,
    pub h_norm: T,
    pub f0_norm: T,
    pub lhs: T,
    /// Left side with `1 − α2 + α5` in the denominator, a variant that
    /// circulates in print. Informational only.
    pub lhs_stated_denominator: T,
    pub rhs_stated: T,
    pub rhs_derived: T,
    pub feasible_stated: bool,
    pub feasible_derived: bool,
}

/// Feasibility from precomputed norms.
pub fn feasibility_from_parts<T: Real>(
    h_norm: T,
    f0_norm: T,
    l: T,
    rho: T,
    c: &HRCoefficients<T>,
) -> Result<FeasibilityReport<T>> {
    let den = T::one() - c.a2 - c.a5;
    if !(den > T::zero()) {
        return Err(Error::InfeasibleCoefficients {
            kind: ConditionKind::HardyRogers,
            reason: format!("1 - a2 - a5 = {den} must be positive"),
        });
    }
    let growth = T::one() + c.a3 + c.a4;
    let lhs = h_norm + l * f0_norm * growth / den;
    let lhs_stated_denominator = h_norm + l * f0_norm * growth / (T::one() - c.a2 + c.a5);
    let rhs_stated = rho * (T::one() - l / den);
    let rhs_derived = rho * (T::one() - l * (c.a1 + c.a2 + c.a4) / den);
    Ok(FeasibilityReport {
        omega_index: 0,
        l_omega: l,
        h_norm,
        f0_norm,
        lhs,
        lhs_stated_denominator,
        rhs_stated,
        rhs_derived,
        feasible_stated: lhs <= rhs_stated,
        feasible_derived: lhs <= rhs_derived,
    })
}

fn feasibility_of<T: Real>(
    p: &HammersteinProblem<T>,
    omega: &OmegaSample,
    op: &DiscreteHammerstein<T>,
    norm: &NormKind<T>,
) -> Result<FeasibilityReport<T>> {
    norm.validate(p.grid.len())?;
    let l = operator_norm(&op.k, norm)?;
    let h_norm = norm.norm_unchecked(op.h.as_slice());
    let f0_norm = norm.norm_unchecked(p.f_at_zero()?.as_slice());
    let mut r = feasibility_from_parts(h_norm, f0_norm, l, p.rho, &p.f_coeffs)?;
    r.omega_index = omega.index;
    Ok(r)
}

pub fn check_feasibility<T: Real>(
    p: &HammersteinProblem<T>,
    omega: &OmegaSample,
    norm: &NormKind<T>,
) -> Result<FeasibilityReport<T>> {
    let op = DiscreteHammerstein::new(p, omega)?;
    feasibility_of(p, omega, &op, norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HammersteinOptions {
    /// Solve even where the derived feasibility inequality fails.
    pub force: bool,
    pub run: RunOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HammersteinSolution<T: Real> {
    pub nodes: Vec<T>,
    pub feasibility: Vec<FeasibilityReport<T>>,
    pub summary: RandomSolveSummary<T>,
}

impl<T: Real> HammersteinSolution<T> {
    /// Columns `t, mean, meansq` (mean of `x²`) over ω that produced a point,
    /// then one `omega_XXXXX` column per sample when `per_omega` is set.
    pub fn solution_csv(&self, per_omega: bool) -> String {
        let points: Vec<(u64, &Vector<T>)> = self
            .summary
            .per_omega
            .iter()
            .filter(|o| matches!(o.status, OmegaStatus::Converged | OmegaStatus::NotConverged))
            .filter_map(|o| o.report.as_ref().map(|r| (o.omega.index, &r.fixed_point)))
            .collect();
        let mut header = vec!["t".to_string(), "mean".into(), "meansq".into()];
        if per_omega {
            header.extend(points.iter().map(|(i, _)| format!("omega_{i:05}")));
        }
        let mut table = CsvTable::new(&header);
        let n = T::from_usize_lossy(points.len());
        for (i, &t) in self.nodes.iter().enumerate() {
            let (mean, meansq) = if points.is_empty() {
                (T::nan(), T::nan())
            } else {
                let s: T = points.iter().map(|(_, x)| x[i]).sum();
                let s2: T = points.iter().map(|(_, x)| x[i] * x[i]).sum();
                (s / n, s2 / n)
            };
            let mut row = vec![
                format_float(t.as_f64()),
                format_float(mean.as_f64()),
                format_float(meansq.as_f64()),
            ];
            if per_omega {
                row.extend(points.iter().map(|(_, x)| format_float(x[i].as_f64())));
            }
            table.row(&row);
        }
        table.finish()
    }
}

/// Coefficients for `U` at one outcome: the exact transfer `l·α1` when `f`
/// is Lipschitz, otherwise fitted on pairs drawn from the ball.
fn coefficient_spec<T: Real>(p: &HammersteinProblem<T>, l: T) -> RandomCoefficientSpec<T> {
    let c = &p.f_coeffs;
    let zero = T::lit(1e-12);
    let lipschitz_only = [c.a2, c.a3, c.a4, c.a5].iter().all(|v| v.abs() <= zero);
    let pairs = PairSampling {
        count: 64,
        radius: p.rho,
        orbit_pairs: 32,
    };
    let transfer = l * c.a1;
    if lipschitz_only && transfer < T::one() {
        let mut spec = RandomCoefficientSpec::declared(move |_| HRCoefficients::banach(transfer));
        spec.declared_feasible = false;
        spec.with_pairs(pairs)
    } else {
        RandomCoefficientSpec::fitted().with_pairs(pairs)
    }
}

/// Solves the discretized equation at every sampled outcome from `x₀ = h`.
///
/// Where the derived feasibility inequality holds, every iterate is checked
/// against the ball `‖x‖ ≤ ρ`; an escape is an error, not a warning.
/// Where it fails the run is refused with [`Error::Infeasible`] unless
/// `opts.force` is set.
pub fn solve_hammerstein<T: Real>(
    p: &HammersteinProblem<T>,
    space: &ProbabilitySpace,
    cfg: &PicardConfig<T>,
    opts: &HammersteinOptions,
) -> Result<HammersteinSolution<T>> {
    p.validate()?;
    cfg.validate()?;
    cfg.norm.validate(p.grid.len())?;
    let rho = p.rho;
    let limit = rho + T::lit(INVARIANCE_TOL);

    let rows = map_omegas::<T, _, _>(space, &opts.run, |omega| {
        let op = DiscreteHammerstein::new(p, &omega)?;
        let feas = feasibility_of(p, &omega, &op, &cfg.norm)?;
        if !feas.feasible_derived && !opts.force {
            return Err(Error::Infeasible {
                omega_index: omega.index,
            });
        }
        let spec = coefficient_spec(p, feas.l_omega);
        let center = Vector::zeros(p.grid.len());
        let cert = certify_omega(&op, &omega, &spec, &center, cfg)?;
        let check = feas.feasible_derived;
        let mut escaped: Option<(usize, T)> = None;
        let solved = picard_solve_observed(
            &op,
            &omega,
            &op.h,
            cert.certificate.as_ref(),
            cfg,
            |n, x| {
                if !check {
                    return true;
                }
                let nx = cfg.norm.norm_unchecked(x.as_slice());
                if nx > limit {
                    escaped = Some((n, nx));
                    false
                } else {
                    true
                }
            },
        );
        if let (Err(PicardError::Stopped { .. }), Some((iteration, nx))) = (&solved, escaped) {
            return Err(Error::InvarianceViolation {
                omega_index: omega.index,
                iteration,
                norm: nx.as_f64(),
                rho: rho.as_f64(),
            });
        }
        Ok((feas, outcome_from_solve(omega, Some(cert), solved)?))
    });

    let mut feasibility = Vec::with_capacity(rows.len());
    let mut per_omega = Vec::with_capacity(rows.len());
    for row in rows {
        let (f, o) = row?;
        feasibility.push(f);
        per_omega.push(o);
    }
    let norm = cfg.norm.clone();
    let summary = RandomSolveSummary::reduce(space, cfg.tol, false, per_omega, |x| {
        norm.norm_unchecked(x.as_slice())
    });
    Ok(HammersteinSolution {
        nodes: p.grid.nodes.clone(),
        feasibility,
        summary,
    })
}
