//! Small dense matrices: just enough for Nyström operators and norm estimates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Shape {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r);
        }
        Ok(Self {
            rows: n,
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::Shape {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect())
    }

    fn matvec_t(&self, y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.cols];
        for (i, &yi) in y.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a * yi;
            }
        }
        out
    }

    /// Induced sup norm: the largest absolute row sum.
    pub fn max_abs_row_sum(&self) -> T {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Largest singular value by power iteration on `AᵀA`, stopping once the
    /// estimate changes by less than `rel_tol` (relative).
    pub fn spectral_norm(&self, rel_tol: T, max_iter: usize) -> T {
        if self.rows == 0 || self.cols == 0 {
            return T::zero();
        }
        // Deterministic, generic start: not orthogonal to any fixed
        // coordinate direction.
        let mut v: Vec<T> = (0..self.cols)
            .map(|j| T::one() + T::lit(0.1) * T::lit(((j * 7919) % 97) as f64 / 97.0))
            .collect();
        let mut sigma = T::zero();
        for _ in 0..max_iter {
            let nv = v.iter().map(|&a| a * a).sum::<T>().sqrt();
            if nv == T::zero() {
                return T::zero();
            }
            v.iter_mut().for_each(|a| *a = *a / nv);
            let av = self.matvec(&v).expect("square shapes");
            let next = av.iter().map(|&a| a * a).sum::<T>().sqrt();
            let w = self.matvec_t(&av);
            let converged = (next - sigma).abs() <= rel_tol * next;
            sigma = next;
            if converged || sigma == T::zero() {
                break;
            }
            v = w;
        }
        sigma
    }

    /// `D A D⁻¹` for the diagonal `D = diag(d)`.
    pub fn diagonal_similarity(&self, d: &[T]) -> Result<Self> {
        if d.len() != self.rows || self.rows != self.cols {
            return Err(Error::Shape {
                expected: self.rows,
                found: d.len(),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            d[i] * self.get(i, j) / d[j]
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_sum_and_spectral() {
        let a = Matrix::from_rows(vec![vec![3.0, 0.0], vec![4.0, 5.0]]).unwrap();
        assert_eq!(a.max_abs_row_sum(), 9.0);
        // singular values of [[3,0],[4,5]] are 3√5 and √5
        let s = a.spectral_norm(1e-14, 10_000);
        assert!((s - 45f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn matvec_shape() {
        let a = Matrix::<f64>::identity(3);
        assert_eq!(a.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(a.matvec(&[1.0]).is_err());
    }
}
