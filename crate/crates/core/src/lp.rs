//! Small dense linear programs.
//!
//! Coefficient fitting only ever needs `min cᵀv` over `v ≥ 0` with a
//! nonnegative cost vector. The all-slack basis is then dual feasible, so a
//! dual simplex needs no phase one. Covering constraints (`G v ≥ h`, one row
//! per sampled pair) are handled by constraint generation so the tableau
//! stays at a handful of rows even for large pair samples.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Optimal point of a linear program.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    pub pivots: usize,
}

const PIVOT_REL_TOL: f64 = 1e-9;

fn tolerance<T: Real>() -> T {
    T::epsilon() * T::lit(1024.0)
}

/// Solves `min cᵀx  s.t.  A x ≤ b,  x ≥ 0` with `c ≥ 0` by the dual simplex
/// method started from the slack basis.
///
/// Leaving row: most negative basic value, lowest row on ties. Entering
/// column: minimum dual ratio; near-ties go to the largest pivot, then the
/// lowest column.
pub fn dual_simplex<T: Real>(costs: &[T], rows: &[Vec<T>], rhs: &[T]) -> Result<LpSolution<T>> {
    let n = costs.len();
    let m = rows.len();
    if rhs.len() != m {
        return Err(Error::LinearProgram(format!(
            "{} rows but {} right-hand sides",
            m,
            rhs.len()
        )));
    }
    if let Some(r) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::LinearProgram(format!("row {r} has wrong width")));
    }
    if costs.iter().any(|&c| c < T::zero() || !c.is_finite()) {
        return Err(Error::LinearProgram(
            "costs must be finite and nonnegative".into(),
        ));
    }

    let width = n + m;
    let mut tab: Vec<Vec<T>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = Vec::with_capacity(width);
            row.extend_from_slice(r);
            row.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
            row
        })
        .collect();
    let mut b: Vec<T> = rhs.to_vec();
    let mut reduced: Vec<T> = costs
        .iter()
        .copied()
        .chain((0..m).map(|_| T::zero()))
        .collect();
    let mut basis: Vec<usize> = (n..width).collect();

    let eps = tolerance::<T>();
    let scale = b.iter().fold(T::one(), |s, &v| s.max(v.abs()));
    let max_pivots = 64 * (width + 1);
    let mut pivots = 0usize;

    loop {
        let mut leave: Option<usize> = None;
        for (i, &v) in b.iter().enumerate() {
            if v < -eps * scale && leave.map_or(true, |l| v < b[l]) {
                leave = Some(i);
            }
        }
        let Some(r) = leave else { break };

        // Entries below `pivot_tol` relative to the row are treated as zero;
        // pivoting on them loses most of the precision of the tableau.
        let row_scale = tab[r].iter().fold(T::zero(), |m, &a| m.max(a.abs()));
        let pivot_tol = row_scale * T::lit(PIVOT_REL_TOL);
        let candidates = || {
            tab[r]
                .iter()
                .enumerate()
                .filter(|&(_, &a)| a < -pivot_tol)
                .map(|(j, &a)| (j, reduced[j].max(T::zero()) / -a))
        };
        // Two-pass ratio test: among columns within roundoff of the minimum
        // ratio, take the largest pivot.
        let min_ratio = candidates().fold(T::infinity(), |m, (_, t)| m.min(t));
        let slack = eps * (T::one() + min_ratio.abs());
        let enter = candidates().filter(|&(_, t)| t <= min_ratio + slack).fold(
            None::<(usize, T)>,
            |best, (j, _)| {
                let a = tab[r][j].abs();
                match best {
                    Some((_, b)) if b >= a => best,
                    _ => Some((j, a)),
                }
            },
        );
        let Some((q, _)) = enter else {
            return Err(Error::LinearProgram("primal infeasible".into()));
        };

        pivot(&mut tab, &mut b, &mut reduced, r, q);
        basis[r] = q;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::LinearProgram("pivot limit exceeded".into()));
        }
    }

    let mut x = vec![T::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = b[i].max(T::zero());
        }
    }
    let objective = costs.iter().zip(&x).map(|(&c, &v)| c * v).sum();
    Ok(LpSolution {
        x,
        objective,
        pivots,
    })
}

fn pivot<T: Real>(tab: &mut [Vec<T>], b: &mut [T], reduced: &mut [T], r: usize, q: usize) {
    let p = tab[r][q];
    for v in tab[r].iter_mut() {
        *v = *v / p;
    }
    b[r] = b[r] / p;
    let pivot_row = tab[r].clone();
    let pivot_b = b[r];
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r {
            continue;
        }
        let f = row[q];
        if f != T::zero() {
            for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                *v = *v - f * pv;
            }
            row[q] = T::zero();
            b[i] = b[i] - f * pivot_b;
        }
    }
    let f = reduced[q];
    if f != T::zero() {
        for (v, &pv) in reduced.iter_mut().zip(&pivot_row) {
            *v = *v - f * pv;
        }
        reduced[q] = T::zero();
    }
}

/// `min cᵀv` over `v ≥ 0` subject to many covering rows `gᵢ·v ≥ hᵢ`
/// (`gᵢ ≥ 0`) and a few packing rows `pⱼ·v ≤ qⱼ`.
#[derive(Debug, Clone)]
pub struct CoveringLp<'a, T> {
    pub costs: &'a [T],
    pub cover_rows: &'a [Vec<T>],
    pub cover_rhs: &'a [T],
    pub caps: Vec<(Vec<T>, T)>,
}

const BATCH: usize = 16;

impl<'a, T: Real> CoveringLp<'a, T> {
    /// Solves by constraint generation: start from the rows with the largest
    /// right-hand side, add the most violated rows until none remain.
    pub fn solve(&self) -> Result<LpSolution<T>> {
        let n = self.costs.len();
        let count = self.cover_rows.len();
        if self.cover_rhs.len() != count {
            return Err(Error::LinearProgram(
                "cover rows/rhs length mismatch".into(),
            ));
        }

        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by(|&a, &b| {
            self.cover_rhs[b]
                .partial_cmp(&self.cover_rhs[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mut in_work = vec![false; count];
        let mut work: Vec<usize> = Vec::new();
        for &i in order.iter().take(BATCH) {
            in_work[i] = true;
            work.push(i);
        }

        let eps = tolerance::<T>();
        let mut total_pivots = 0;
        loop {
            let mut rows: Vec<Vec<T>> = Vec::with_capacity(work.len() + self.caps.len());
            let mut rhs: Vec<T> = Vec::with_capacity(rows.capacity());
            for &i in &work {
                rows.push(self.cover_rows[i].iter().map(|&g| -g).collect());
                rhs.push(-self.cover_rhs[i]);
            }
            for (p, q) in &self.caps {
                rows.push(p.clone());
                rhs.push(*q);
            }
            let sol = dual_simplex(self.costs, &rows, &rhs)?;
            total_pivots += sol.pivots;

            let mut violated: Vec<(usize, T)> = (0..count)
                .filter(|&i| !in_work[i])
                .filter_map(|i| {
                    let lhs: T = self.cover_rows[i]
                        .iter()
                        .zip(&sol.x)
                        .map(|(&g, &v)| g * v)
                        .sum();
                    let gap = self.cover_rhs[i] - lhs;
                    (gap > eps * (T::one() + self.cover_rhs[i].abs())).then_some((i, gap))
                })
                .collect();
            if violated.is_empty() {
                debug_assert_eq!(sol.x.len(), n);
                return Ok(LpSolution {
                    pivots: total_pivots,
                    ..sol
                });
            }
            violated.sort_by(|a, b| {
                b.1.partial_cmp(&a.1)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.0.cmp(&b.0))
            });
            for &(i, _) in violated.iter().take(BATCH) {
                in_work[i] = true;
                work.push(i);
            }
        }
    }
}
