//! Quadrature rules on `[0, 1]`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    Trapezoid,
    GaussLegendre,
}

impl FromStr for QuadratureRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trapezoid" => Ok(Self::Trapezoid),
            "gauss-legendre" => Ok(Self::GaussLegendre),
            other => Err(Error::InvalidGrid(format!("unknown rule {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureGrid<T> {
    pub rule: QuadratureRule,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> QuadratureGrid<T> {
    pub fn new(rule: QuadratureRule, m: usize) -> Result<Self> {
        let (nodes, weights) = match rule {
            QuadratureRule::Trapezoid => trapezoid(m)?,
            QuadratureRule::GaussLegendre => gauss_legendre(m)?,
        };
        let grid = Self {
            rule,
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn trapezoid(m: usize) -> Result<Self> {
        Self::new(QuadratureRule::Trapezoid, m)
    }

    pub fn gauss_legendre(m: usize) -> Result<Self> {
        Self::new(QuadratureRule::GaussLegendre, m)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() || self.nodes.len() != self.weights.len() {
            return Err(Error::InvalidGrid(
                "nodes and weights must be non-empty and equal in length".into(),
            ));
        }
        if self.weights.iter().any(|&w| !(w > T::zero())) {
            return Err(Error::InvalidGrid("weights must be positive".into()));
        }
        if self.nodes.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::InvalidGrid(
                "nodes must be strictly increasing".into(),
            ));
        }
        if self.nodes[0] < T::zero() || *self.nodes.last().unwrap() > T::one() {
            return Err(Error::InvalidGrid("nodes must lie in [0, 1]".into()));
        }
        let total: T = self.weights.iter().copied().sum();
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(4.0) * T::from_usize_lossy(self.len()));
        if (total - T::one()).abs() > tol {
            return Err(Error::InvalidGrid(format!("weights sum to {total}, not 1")));
        }
        Ok(())
    }

    /// `Σ wᵢ f(tᵢ)`.
    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

fn trapezoid(m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if m < 2 {
        return Err(Error::InvalidGrid(format!(
            "trapezoid rule needs m ≥ 2, got {m}"
        )));
    }
    let h = 1.0 / (m - 1) as f64;
    let nodes = (0..m).map(|i| i as f64 * h).collect();
    let weights = (0..m)
        .map(|i| if i == 0 || i == m - 1 { h / 2.0 } else { h })
        .collect();
    Ok((nodes, weights))
}

/// `(Pₙ(x), Pₙ'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gauss_legendre(m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if m == 0 {
        return Err(Error::InvalidGrid("Gauss-Legendre rule needs m ≥ 1".into()));
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(m, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(m, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1, 1] to [0, 1]; the root x is the i-th largest.
        nodes[m - 1 - i] = 0.5 * (1.0 + x);
        nodes[i] = 0.5 * (1.0 - x);
        weights[m - 1 - i] = 0.5 * w;
        weights[i] = 0.5 * w;
    }
    Ok((nodes, weights))
}
