//! Minimal coefficients consistent with a pair sample.

use super::{
    measure_pairs, Coefficients, ConditionKind, GregusBound, GregusParams, HRCoefficients,
    PairDistances, ZamfirescuParams,
};
use crate::error::{Error, Result};
use crate::lp::CoveringLp;
use crate::scalar::Real;
use crate::space::{NormKind, OmegaSample, RandomOperator, Vector};

/// Free directions of a Hardy-Rogers-family kind, as multipliers of the five
/// slots. Ćirić ties `a4 = a5` into one direction.
fn directions(kind: ConditionKind) -> &'static [[u8; 5]] {
    const E1: [u8; 5] = [1, 0, 0, 0, 0];
    const E2: [u8; 5] = [0, 1, 0, 0, 0];
    const E3: [u8; 5] = [0, 0, 1, 0, 0];
    const E4: [u8; 5] = [0, 0, 0, 1, 0];
    const E5: [u8; 5] = [0, 0, 0, 0, 1];
    const TIED: [u8; 5] = [0, 0, 0, 1, 1];
    match kind {
        ConditionKind::Banach => &[E1],
        ConditionKind::Kannan => &[E2, E3],
        ConditionKind::Reich => &[E1, E2, E3],
        ConditionKind::Ciric => &[E1, E2, E3, TIED],
        ConditionKind::Chatterjea => &[E4, E5],
        _ => &[E1, E2, E3, E4, E5],
    }
}

/// Fits Hardy-Rogers-family coefficients for `kind` on measured pairs.
///
/// Minimizes the coefficient sum subject to every pair inequality, then
/// breaks ties toward the lexicographically smallest `(a1, …, a5)` by a
/// sequence of follow-up programs that cap the earlier optima.
///
/// The result is returned even when its sum is not below one; callers decide
/// feasibility.
pub fn fit_measured<T: Real>(
    kind: ConditionKind,
    measured: &[PairDistances<T>],
) -> Result<HRCoefficients<T>> {
    if !kind.is_hardy_rogers_family() {
        return Err(Error::CoefficientMismatch { kind });
    }
    if measured.is_empty() {
        return Err(Error::EmptyPairs);
    }
    let dirs = directions(kind);
    let to_t = |v: u8| if v == 0 { T::zero() } else { T::one() };

    let mut rows: Vec<Vec<T>> = Vec::with_capacity(measured.len());
    let mut rhs: Vec<T> = Vec::with_capacity(measured.len());
    for (i, p) in measured.iter().enumerate() {
        let row: Vec<T> = dirs
            .iter()
            .map(|dir| {
                dir.iter()
                    .zip(&p.reference)
                    .map(|(&m, &d)| to_t(m) * d)
                    .sum()
            })
            .collect();
        if p.image > T::zero() && row.iter().all(|&g| g <= T::zero()) {
            return Err(Error::NotContractive { pair_index: i });
        }
        if p.image > T::zero() {
            rows.push(row);
            rhs.push(p.image);
        }
    }

    if rows.is_empty() {
        return Ok(HRCoefficients::zero());
    }

    let sum_cost: Vec<T> = dirs
        .iter()
        .map(|dir| dir.iter().map(|&m| to_t(m)).sum())
        .collect();
    let base = CoveringLp {
        costs: &sum_cost,
        cover_rows: &rows,
        cover_rhs: &rhs,
        caps: Vec::new(),
    };
    let first = base.solve()?;
    let slack = |v: T| v + T::epsilon() * T::lit(1.0e4) * (T::one() + v.abs());

    let mut caps: Vec<(Vec<T>, T)> = vec![(sum_cost.clone(), slack(first.objective))];
    let mut x = first.x;
    for slot in 0..5 {
        let cost: Vec<T> = dirs.iter().map(|dir| to_t(dir[slot])).collect();
        if cost.iter().all(|&c| c == T::zero()) {
            continue;
        }
        let lp = CoveringLp {
            costs: &cost,
            cover_rows: &rows,
            cover_rhs: &rhs,
            caps: caps.clone(),
        };
        // The caps leave only roundoff-sized room, so a capped program can
        // look infeasible numerically. Any earlier solution is still optimal
        // for the sum; stop refining instead of failing.
        let Ok(sol) = lp.solve() else { break };
        caps.push((cost, slack(sol.objective)));
        x = sol.x;
    }

    let mut out = [T::zero(); 5];
    for (dir, &v) in dirs.iter().zip(&x) {
        for (slot, &m) in dir.iter().enumerate() {
            if m != 0 {
                out[slot] = out[slot] + v;
            }
        }
    }
    Ok(HRCoefficients::from_array(out))
}

fn check_sample<T: Real>(pairs: &[(Vector<T>, Vector<T>)]) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::EmptyPairs);
    }
    if pairs.iter().all(|(a, b)| a == b) {
        return Err(Error::DegenerateSample);
    }
    Ok(())
}

/// Minimal-sum Hardy-Rogers coefficients consistent with the pair sample.
pub fn fit_hr_coefficients<T: Real, O: RandomOperator<T> + ?Sized>(
    op: &O,
    omega: &OmegaSample,
    pairs: &[(Vector<T>, Vector<T>)],
    norm: &NormKind<T>,
) -> Result<HRCoefficients<T>> {
    fit_kind(op, omega, ConditionKind::HardyRogers, pairs, norm)
}

/// Minimal-sum coefficients for a Hardy-Rogers-family kind.
pub fn fit_kind<T: Real, O: RandomOperator<T> + ?Sized>(
    op: &O,
    omega: &OmegaSample,
    kind: ConditionKind,
    pairs: &[(Vector<T>, Vector<T>)],
    norm: &NormKind<T>,
) -> Result<HRCoefficients<T>> {
    check_sample(pairs)?;
    let measured = measure_pairs(op, omega, pairs, norm)?;
    fit_measured(kind, &measured)
}

fn ratio<T: Real>(num: T, den: T) -> T {
    if num <= T::zero() {
        T::zero()
    } else if den <= T::zero() {
        T::infinity()
    } else {
        num / den
    }
}

/// Smallest `θ` such that every pair passes one Zamfirescu case with
/// `(α, β, γ) = (θ, θ/2, θ/2)`.
pub(crate) fn fit_zamfirescu<T: Real>(measured: &[PairDistances<T>]) -> ZamfirescuParams<T> {
    let two = T::lit(2.0);
    let theta = measured
        .iter()
        .map(|p| {
            let d = &p.reference;
            let r1 = ratio(p.image, d[0]);
            let r2 = two * ratio(p.image, d[1] + d[2]);
            let r3 = two * ratio(p.image, d[3] + d[4]);
            r1.min(r2).min(r3)
        })
        .fold(T::zero(), |m, v| m.max(v));
    ZamfirescuParams {
        alpha: theta,
        beta: theta / two,
        gamma: theta / two,
    }
}

/// Lattice search over `(a, c)` with `b = 1 − a`. Keeps the point with the
/// largest margin; ties go to the smaller `a`, then the smaller `c`.
pub(crate) fn search_gregus<T: Real>(
    kind: ConditionKind,
    bound: GregusBound,
    step: f64,
    measured: &[PairDistances<T>],
) -> Option<(GregusParams<T>, T)> {
    let steps = (1.0 / step).round() as usize;
    let mut best: Option<(GregusParams<T>, T)> = None;
    for ia in 1..steps {
        let a = T::lit(ia as f64 * step);
        let b = T::one() - a;
        let cmax = bound.max_c(a, b);
        let mut ic = 0usize;
        loop {
            let c = T::lit(ic as f64 * step);
            if c > cmax {
                break;
            }
            let params = GregusParams { a, b, c, bound };
            let coeffs = Coefficients::Gregus(params);
            let margin = measured
                .iter()
                .map(|p| coeffs.slack(kind, p))
                .fold(T::infinity(), |m, s| m.min(s));
            if best.as_ref().map_or(true, |(_, m)| margin > *m) {
                best = Some((params, margin));
            }
            ic += 1;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::{certify_measured, CERT_TOL};
    use crate::space::FnOperator;

    fn scalar_pairs(points: &[(f64, f64)]) -> Vec<(Vector<f64>, Vector<f64>)> {
        points
            .iter()
            .map(|&(a, b)| (Vector::scalar(a), Vector::scalar(b)))
            .collect()
    }

    #[test]
    fn identity_needs_unit_sum() {
        let op = FnOperator::new(1, |_: &OmegaSample, x: &Vector<f64>| x.clone());
        let omega = OmegaSample::from_seed(0, 0);
        let c = fit_hr_coefficients(
            &op,
            &omega,
            &scalar_pairs(&[(0.0, 1.0), (2.0, 5.0)]),
            &NormKind::Euclidean,
        )
        .unwrap();
        assert!(c.sum() >= 1.0 - 1e-12);
        assert!(!c.is_feasible());
        // lexicographic tie-break pushes the weight to the last slot
        assert!(c.a1 < 1e-9);
        assert!((c.a5 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn affine_scalar_map() {
        let op = FnOperator::new(1, |_: &OmegaSample, x: &Vector<f64>| {
            Vector::scalar(0.5 * x[0] + 1.0)
        });
        let omega = OmegaSample::from_seed(0, 0);
        let pairs = scalar_pairs(&[(0.0, 1.0), (-3.0, 4.0), (2.0, 2.5), (10.0, -10.0)]);
        let c = fit_hr_coefficients(&op, &omega, &pairs, &NormKind::Euclidean).unwrap();
        assert!(c.sum() <= 0.5 + 1e-9);
        let m = measure_pairs(&op, &omega, &pairs, &NormKind::Euclidean).unwrap();
        let cert = certify_measured(
            ConditionKind::HardyRogers,
            omega,
            Coefficients::HardyRogers(c),
            &m,
        )
        .unwrap();
        assert!(cert.margin >= -CERT_TOL);
    }

    #[test]
    fn degenerate_and_empty_samples() {
        let op = FnOperator::new(1, |_: &OmegaSample, x: &Vector<f64>| x.scale(0.5));
        let omega = OmegaSample::from_seed(0, 0);
        assert_eq!(
            fit_hr_coefficients(&op, &omega, &scalar_pairs(&[(1.0, 1.0)]), &NormKind::Sup),
            Err(Error::DegenerateSample)
        );
        assert_eq!(
            fit_hr_coefficients(&op, &omega, &[], &NormKind::Sup),
            Err(Error::EmptyPairs)
        );
    }

    #[test]
    fn not_contractive_evidence() {
        let p = PairDistances {
            image: 1.0,
            reference: [0.0, 0.0, 0.0, 0.0, 0.0],
        };
        assert_eq!(
            fit_measured(ConditionKind::HardyRogers, &[p]),
            Err(Error::NotContractive { pair_index: 0 })
        );
    }

    #[test]
    fn banach_fit_is_max_ratio() {
        let op = FnOperator::new(1, |_: &OmegaSample, x: &Vector<f64>| {
            Vector::scalar(0.25 * x[0].sin())
        });
        let omega = OmegaSample::from_seed(0, 0);
        let pairs = scalar_pairs(&[(0.0, 0.1), (1.0, 2.0), (-0.5, 0.5)]);
        let m = measure_pairs(&op, &omega, &pairs, &NormKind::Euclidean).unwrap();
        let expected = m
            .iter()
            .map(|p| p.image / p.reference[0])
            .fold(0.0f64, f64::max);
        let c = fit_measured(ConditionKind::Banach, &m).unwrap();
        assert!((c.a1 - expected).abs() < 1e-12);
        assert_eq!(c.a2 + c.a3 + c.a4 + c.a5, 0.0);
    }
}
