//! Sampled probability spaces, vectors and norms.
//!
//! The probability space is never represented as a measure. It is a seeded
//! enumeration of outcomes: outcome `i` carries a seed derived from
//! `(master_seed, i)` and every random quantity evaluated "at ω" is a pure
//! function of that seed.

use std::ops::{Add, Index, Mul, Sub};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (Steele, Lea & Flood 2014). A bijection on `u64`.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of outcome `index` from the master seed.
///
/// `mix(m, i) = splitmix64(m + (i + 1) * 0x9E3779B97F4A7C15)` with wrapping
/// arithmetic. For a fixed master seed the map `i -> mix(m, i)` is a
/// composition of bijections on `u64` (odd multiplier, translation,
/// finalizer), so distinct indices never collide.
#[inline]
pub fn mix(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// A finite, seeded stand-in for the probability space `(Ω, β, μ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbabilitySpace {
    master_seed: u64,
    n_samples: u64,
}

impl ProbabilitySpace {
    pub fn new(master_seed: u64, n_samples: u64) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::EmptySpace);
        }
        Ok(Self {
            master_seed,
            n_samples,
        })
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn n_samples(&self) -> u64 {
        self.n_samples
    }

    /// The deterministic `index`-th outcome.
    pub fn sample(&self, index: u64) -> Result<OmegaSample> {
        if index >= self.n_samples {
            return Err(Error::OutOfRange {
                index,
                n_samples: self.n_samples,
            });
        }
        Ok(OmegaSample {
            index,
            derived_seed: mix(self.master_seed, index),
        })
    }

    /// All outcomes in index order.
    pub fn samples(&self) -> impl Iterator<Item = OmegaSample> + '_ {
        (0..self.n_samples).map(move |index| OmegaSample {
            index,
            derived_seed: mix(self.master_seed, index),
        })
    }
}

/// Free-function form of [`ProbabilitySpace::sample`].
pub fn sample_omega(space: &ProbabilitySpace, index: u64) -> Result<OmegaSample> {
    space.sample(index)
}

/// One outcome ω. All randomness evaluated at ω flows from `derived_seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OmegaSample {
    pub index: u64,
    pub derived_seed: u64,
}

impl OmegaSample {
    /// Builds an outcome directly from a seed, for single-ω use.
    pub fn from_seed(index: u64, derived_seed: u64) -> Self {
        Self {
            index,
            derived_seed,
        }
    }

    /// Uniform draw in `[0, 1)` on an independent named stream.
    ///
    /// Stream `s` uses the top 53 bits of `mix(derived_seed, s)`.
    pub fn uniform(&self, stream: u64) -> f64 {
        (mix(self.derived_seed, stream) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[lo, hi)` on stream `stream`.
    pub fn uniform_in(&self, stream: u64, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform(stream)
    }

    /// A ChaCha generator for bulk draws tied to this outcome.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.derived_seed)
    }

    /// A ChaCha generator on a sub-stream, so independent consumers do not
    /// share draws.
    pub fn rng_stream(&self, stream: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(mix(self.derived_seed, stream ^ 0x5EED_0000_0000_0000))
    }
}

/// A point of the finite-dimensional stand-in for the Banach space `X`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector<T>(Vec<T>);

impl<T: Real> Vector<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![T::zero(); dim])
    }

    pub fn from_f64(coords: &[f64]) -> Self {
        Self(coords.iter().map(|&c| T::lit(c)).collect())
    }

    pub fn scalar(v: T) -> Self {
        Self(vec![v])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, a: T) -> Self {
        Self(self.0.iter().map(|&v| a * v).collect())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T: Real> From<Vec<T>> for Vector<T> {
    fn from(v: Vec<T>) -> Self {
        Self(v)
    }
}

impl<T: Real> Add for &Vector<T> {
    type Output = Vector<T>;
    fn add(self, rhs: &Vector<T>) -> Vector<T> {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        Vector(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a + b).collect())
    }
}

impl<T: Real> Sub for &Vector<T> {
    type Output = Vector<T>;
    fn sub(self, rhs: &Vector<T>) -> Vector<T> {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        Vector(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a - b).collect())
    }
}

impl<T: Real> Mul<T> for &Vector<T> {
    type Output = Vector<T>;
    fn mul(self, a: T) -> Vector<T> {
        self.scale(a)
    }
}

/// Which norm realizes `‖·‖` on the discretized space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind<T> {
    Euclidean,
    Sup,
    /// `sqrt(Σ wᵢ vᵢ²)`, the quadrature realization of the L2 norm.
    WeightedL2(Vec<T>),
}

impl<T: Real> NormKind<T> {
    /// Checks that the norm applies to vectors of dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        if let NormKind::WeightedL2(w) = self {
            if w.len() != dim {
                return Err(Error::Shape {
                    expected: dim,
                    found: w.len(),
                });
            }
            if w.iter().any(|&x| !(x > T::zero()) || !x.is_finite()) {
                return Err(Error::InvalidWeights);
            }
        }
        Ok(())
    }

    /// Norm of the difference `a - b` without allocating.
    ///
    /// Callers are expected to have validated the shapes.
    #[inline]
    pub fn distance_unchecked(&self, a: &[T], b: &[T]) -> T {
        debug_assert_eq!(a.len(), b.len());
        match self {
            NormKind::Euclidean => a
                .iter()
                .zip(b)
                .map(|(&x, &y)| (x - y) * (x - y))
                .sum::<T>()
                .sqrt(),
            NormKind::Sup => a
                .iter()
                .zip(b)
                .fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs())),
            NormKind::WeightedL2(w) => a
                .iter()
                .zip(b)
                .zip(w)
                .map(|((&x, &y), &wi)| wi * (x - y) * (x - y))
                .sum::<T>()
                .sqrt(),
        }
    }

    #[inline]
    pub fn norm_unchecked(&self, v: &[T]) -> T {
        match self {
            NormKind::Euclidean => v.iter().map(|&x| x * x).sum::<T>().sqrt(),
            NormKind::Sup => v.iter().fold(T::zero(), |m, &x| m.max(x.abs())),
            NormKind::WeightedL2(w) => v
                .iter()
                .zip(w)
                .map(|(&x, &wi)| wi * x * x)
                .sum::<T>()
                .sqrt(),
        }
    }

    pub fn distance(&self, a: &Vector<T>, b: &Vector<T>) -> Result<T> {
        if a.dim() != b.dim() {
            return Err(Error::Shape {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        self.validate(a.dim())?;
        Ok(self.distance_unchecked(a.as_slice(), b.as_slice()))
    }
}

/// `‖v‖` for the chosen norm kind.
pub fn norm<T: Real>(v: &Vector<T>, kind: &NormKind<T>) -> Result<T> {
    kind.validate(v.dim())?;
    Ok(kind.norm_unchecked(v.as_slice()))
}

/// A random operator `T : Ω × X → X`. Implementations must be pure: the same
/// `(ω, x)` always yields the same output.
pub trait RandomOperator<T: Real>: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, omega: &OmegaSample, x: &Vector<T>) -> Vector<T>;
}

impl<T: Real, O: RandomOperator<T> + ?Sized> RandomOperator<T> for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, omega: &OmegaSample, x: &Vector<T>) -> Vector<T> {
        (**self).eval(omega, x)
    }
}

impl<T: Real, O: RandomOperator<T> + ?Sized + Send> RandomOperator<T> for Box<O> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, omega: &OmegaSample, x: &Vector<T>) -> Vector<T> {
        (**self).eval(omega, x)
    }
}

/// Closure-backed random operator.
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T, F> RandomOperator<T> for FnOperator<F>
where
    T: Real,
    F: Fn(&OmegaSample, &Vector<T>) -> Vector<T> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, omega: &OmegaSample, x: &Vector<T>) -> Vector<T> {
        (self.f)(omega, x)
    }
}

/// Evaluates `op` and rejects wrong shapes or non-finite output.
pub fn apply<T: Real, O: RandomOperator<T> + ?Sized>(
    op: &O,
    omega: &OmegaSample,
    x: &Vector<T>,
) -> Result<Vector<T>> {
    if x.dim() != op.dim() {
        return Err(Error::Shape {
            expected: op.dim(),
            found: x.dim(),
        });
    }
    let y = op.eval(omega, x);
    if y.dim() != op.dim() {
        return Err(Error::Shape {
            expected: op.dim(),
            found: y.dim(),
        });
    }
    if !y.is_finite() {
        return Err(Error::Evaluation(format!(
            "T(ω#{}, x) has non-finite coordinates",
            omega.index
        )));
    }
    Ok(y)
}
