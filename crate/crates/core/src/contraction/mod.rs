//! Contractive conditions checked over finite pair samples.
//!
//! Every condition is evaluated on the same six distances per pair
//! `(x₁, x₂)`: the image distance `‖Tx₁ − Tx₂‖` and the five reference
//! distances `‖x₁−x₂‖, ‖x₁−Tx₁‖, ‖x₂−Tx₂‖, ‖x₁−Tx₂‖, ‖x₂−Tx₁‖`.
//! A certificate is evidence over the sample, not a proof over the space.

mod classify;
mod fit;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::space::{apply, NormKind, OmegaSample, RandomOperator, Vector};

pub use classify::{classify, Classification, ClassifyOptions, KindOutcome};
pub use fit::{fit_hr_coefficients, fit_kind, fit_measured};

/// Slack below which a sampled inequality counts as violated.
pub const CERT_TOL: f64 = 1e-9;

/// Gap used to test the strict inequality `Σ < 1` as `Σ ≤ 1 − FEAS_GAP`.
pub const FEAS_GAP: f64 = 1e-9;

/// Tolerance for `a + b = 1` in the Gregus-type conditions.
pub const GREGUS_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConditionKind {
    Banach,
    Kannan,
    Reich,
    Ciric,
    Chatterjea,
    Zamfirescu,
    HardyRogers,
    GregusCiric,
    SahaGanguly,
}

impl ConditionKind {
    pub const ALL: [ConditionKind; 9] = [
        ConditionKind::Banach,
        ConditionKind::Kannan,
        ConditionKind::Reich,
        ConditionKind::Ciric,
        ConditionKind::Chatterjea,
        ConditionKind::Zamfirescu,
        ConditionKind::HardyRogers,
        ConditionKind::GregusCiric,
        ConditionKind::SahaGanguly,
    ];

    /// Kinds whose coefficients embed into the five Hardy-Rogers slots.
    pub fn is_hardy_rogers_family(self) -> bool {
        !matches!(
            self,
            ConditionKind::Zamfirescu | ConditionKind::GregusCiric | ConditionKind::SahaGanguly
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ConditionKind::Banach => "Banach",
            ConditionKind::Kannan => "Kannan",
            ConditionKind::Reich => "Reich",
            ConditionKind::Ciric => "Ciric",
            ConditionKind::Chatterjea => "Chatterjea",
            ConditionKind::Zamfirescu => "Zamfirescu",
            ConditionKind::HardyRogers => "HardyRogers",
            ConditionKind::GregusCiric => "GregusCiric",
            ConditionKind::SahaGanguly => "SahaGanguly",
        }
    }
}

impl std::str::FromStr for ConditionKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ConditionKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown condition kind {s:?}"))
    }
}

/// Values of `α₁(ω) … α₅(ω)` at one outcome.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HRCoefficients<T> {
    pub a1: T,
    pub a2: T,
    pub a3: T,
    pub a4: T,
    pub a5: T,
}

impl<T: Real> HRCoefficients<T> {
    pub fn new(a1: T, a2: T, a3: T, a4: T, a5: T) -> Self {
        Self { a1, a2, a3, a4, a5 }
    }

    pub fn from_array(a: [T; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn to_array(self) -> [T; 5] {
        [self.a1, self.a2, self.a3, self.a4, self.a5]
    }

    pub fn zero() -> Self {
        Self::from_array([T::zero(); 5])
    }

    pub fn banach(alpha: T) -> Self {
        Self::new(alpha, T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn kannan(b: T, c: T) -> Self {
        Self::new(T::zero(), b, c, T::zero(), T::zero())
    }

    pub fn reich(a: T, b: T, c: T) -> Self {
        Self::new(a, b, c, T::zero(), T::zero())
    }

    pub fn ciric(a: T, b: T, c: T, d: T) -> Self {
        Self::new(a, b, c, d, d)
    }

    pub fn chatterjea(d: T, e: T) -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), d, e)
    }

    pub fn sum(&self) -> T {
        self.a1 + self.a2 + self.a3 + self.a4 + self.a5
    }

    pub fn is_nonnegative(&self) -> bool {
        self.to_array()
            .iter()
            .all(|&a| a >= T::zero() && a.is_finite())
    }

    /// `Σαᵢ < 1` tested as `Σαᵢ ≤ 1 − FEAS_GAP`, with every `αᵢ ≥ 0`.
    pub fn is_feasible(&self) -> bool {
        self.is_nonnegative() && self.sum() <= T::one() - T::lit(FEAS_GAP)
    }

    /// Right-hand side of the Hardy-Rogers inequality for the given reference
    /// distances.
    #[inline]
    pub fn bound(&self, d: &[T; 5]) -> T {
        self.a1 * d[0] + self.a2 * d[1] + self.a3 * d[2] + self.a4 * d[3] + self.a5 * d[4]
    }

    /// Averages the mirrored slots: `(a1, s, s, t, t)` with `s = (a2+a3)/2`,
    /// `t = (a4+a5)/2`. Valid on symmetric pair samples.
    pub fn symmetrized(&self) -> Self {
        let half = T::lit(0.5);
        let s = (self.a2 + self.a3) * half;
        let t = (self.a4 + self.a5) * half;
        Self::new(self.a1, s, s, t, t)
    }
}

/// Parameters of the three-case Zamfirescu condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZamfirescuParams<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

/// Upper bound on `c` in the Gregus-type conditions. The two variants use
/// different denominators; both are available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GregusBound {
    /// `c ≤ (4 − a)/(8 − b)`
    CiricGregus,
    /// `c ≤ (4 − a)/(8 − a)`
    SahaGanguly,
}

impl GregusBound {
    pub fn max_c<T: Real>(self, a: T, b: T) -> T {
        let four = T::lit(4.0);
        let eight = T::lit(8.0);
        match self {
            GregusBound::CiricGregus => (four - a) / (eight - b),
            GregusBound::SahaGanguly => (four - a) / (eight - a),
        }
    }
}

/// `a(ω), b(ω), c(ω)` of the Gregus-type conditions, plus which `c` bound
/// applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GregusParams<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub bound: GregusBound,
}

impl<T: Real> GregusParams<T> {
    pub fn new(a: T, c: T, bound: GregusBound) -> Self {
        Self {
            a,
            b: T::one() - a,
            c,
            bound,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        let zero = T::zero();
        if !(self.a > zero && self.a < T::one()) {
            return Err(format!("a = {} must lie in (0, 1)", self.a));
        }
        if self.b < zero || (self.a + self.b - T::one()).abs() > T::lit(GREGUS_SUM_TOL) {
            return Err(format!("a + b = {} must equal 1", self.a + self.b));
        }
        if self.c < zero {
            return Err(format!("c = {} must be nonnegative", self.c));
        }
        let cmax = self.bound.max_c(self.a, self.b);
        if self.c > cmax {
            return Err(format!("c = {} exceeds bound {}", self.c, cmax));
        }
        Ok(())
    }
}

/// Coefficients for any condition kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficients<T> {
    HardyRogers(HRCoefficients<T>),
    Zamfirescu(ZamfirescuParams<T>),
    Gregus(GregusParams<T>),
}

impl<T: Real> Coefficients<T> {
    pub fn as_hardy_rogers(&self) -> Option<&HRCoefficients<T>> {
        match self {
            Coefficients::HardyRogers(c) => Some(c),
            _ => None,
        }
    }

    /// Slack `RHS − LHS` of `kind`'s inequality on one measured pair.
    pub fn slack(&self, kind: ConditionKind, p: &PairDistances<T>) -> T {
        let d = &p.reference;
        match (self, kind) {
            (Coefficients::HardyRogers(c), _) => c.bound(d) - p.image,
            (Coefficients::Zamfirescu(z), _) => {
                let s1 = z.alpha * d[0] - p.image;
                let s2 = z.beta * (d[1] + d[2]) - p.image;
                let s3 = z.gamma * (d[3] + d[4]) - p.image;
                s1.max(s2).max(s3)
            }
            (Coefficients::Gregus(g), ConditionKind::SahaGanguly) => {
                g.a * d[0].max(g.c * (d[3] + d[4])) + g.b * d[1].max(d[2]) - p.image
            }
            (Coefficients::Gregus(g), _) => {
                g.a * d[0] + g.b * d[1].max(d[2]) + g.c * (d[3] + d[4]) - p.image
            }
        }
    }
}

fn is_zero<T: Real>(v: T) -> bool {
    v.abs() <= T::lit(1e-12)
}

/// Checks that `coeffs` has the shape and parameter range `kind` requires.
pub fn validate_coefficients<T: Real>(kind: ConditionKind, coeffs: &Coefficients<T>) -> Result<()> {
    let infeasible = |reason: String| Err(Error::InfeasibleCoefficients { kind, reason });
    let gap = T::lit(FEAS_GAP);
    match (kind, coeffs) {
        (k, Coefficients::HardyRogers(c)) if k.is_hardy_rogers_family() => {
            if !c.is_nonnegative() {
                return infeasible("coefficients must be finite and nonnegative".into());
            }
            let structural = match k {
                ConditionKind::Banach => {
                    is_zero(c.a2) && is_zero(c.a3) && is_zero(c.a4) && is_zero(c.a5)
                }
                ConditionKind::Kannan => is_zero(c.a1) && is_zero(c.a4) && is_zero(c.a5),
                ConditionKind::Reich => is_zero(c.a4) && is_zero(c.a5),
                ConditionKind::Ciric => is_zero(c.a4 - c.a5),
                ConditionKind::Chatterjea => is_zero(c.a1) && is_zero(c.a2) && is_zero(c.a3),
                _ => true,
            };
            if !structural {
                return Err(Error::CoefficientMismatch { kind });
            }
            if c.sum() > T::one() - gap {
                return infeasible(format!("coefficient sum {} is not below 1", c.sum()));
            }
            Ok(())
        }
        (ConditionKind::Zamfirescu, Coefficients::Zamfirescu(z)) => {
            let half = T::lit(0.5);
            let ok = z.alpha >= T::zero()
                && z.beta >= T::zero()
                && z.gamma >= T::zero()
                && z.alpha <= T::one() - gap
                && z.beta <= half - gap
                && z.gamma <= half - gap;
            if ok {
                Ok(())
            } else {
                infeasible(format!(
                    "need 0 ≤ α < 1, 0 ≤ β < 1/2, 0 ≤ γ < 1/2; got ({}, {}, {})",
                    z.alpha, z.beta, z.gamma
                ))
            }
        }
        (ConditionKind::GregusCiric | ConditionKind::SahaGanguly, Coefficients::Gregus(g)) => {
            g.validate().or_else(|reason| infeasible(reason))
        }
        _ => Err(Error::CoefficientMismatch { kind }),
    }
}

/// Image distance and the five reference distances of one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDistances<T> {
    pub image: T,
    pub reference: [T; 5],
}

impl<T: Real> PairDistances<T> {
    /// Swaps the roles of `x₁` and `x₂`.
    pub fn swapped(&self) -> Self {
        let d = self.reference;
        Self {
            image: self.image,
            reference: [d[0], d[2], d[1], d[4], d[3]],
        }
    }
}

/// Evaluates the operator on every pair point and records the distances.
pub fn measure_pairs<T: Real, O: RandomOperator<T> + ?Sized>(
    op: &O,
    omega: &OmegaSample,
    pairs: &[(Vector<T>, Vector<T>)],
    norm: &NormKind<T>,
) -> Result<Vec<PairDistances<T>>> {
    if pairs.is_empty() {
        return Err(Error::EmptyPairs);
    }
    norm.validate(op.dim())?;
    pairs
        .iter()
        .map(|(x1, x2)| {
            let t1 = apply(op, omega, x1)?;
            let t2 = apply(op, omega, x2)?;
            let d =
                |a: &Vector<T>, b: &Vector<T>| norm.distance_unchecked(a.as_slice(), b.as_slice());
            Ok(PairDistances {
                image: d(&t1, &t2),
                reference: [d(x1, x2), d(x1, &t1), d(x2, &t2), d(x1, &t2), d(x2, &t1)],
            })
        })
        .collect()
}

/// Evidence that `kind` holds with `coefficients` on the sampled pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionCertificate<T> {
    pub kind: ConditionKind,
    pub omega: OmegaSample,
    pub coefficients: Coefficients<T>,
    /// Smallest `RHS − LHS` over the pairs; negative means violated.
    pub margin: T,
    pub pairs_checked: usize,
}

#[derive(Serialize)]
struct CertificateRecord<'a, T> {
    kind: ConditionKind,
    coefficients: &'a Coefficients<T>,
    margin: &'a T,
    pairs_checked: usize,
    omega_index: u64,
}

impl<T: Real + Serialize> Serialize for ContractionCertificate<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateRecord {
            kind: self.kind,
            coefficients: &self.coefficients,
            margin: &self.margin,
            pairs_checked: self.pairs_checked,
            omega_index: self.omega.index,
        }
        .serialize(s)
    }
}

impl<T: Real> ContractionCertificate<T> {
    pub fn passes(&self) -> bool {
        self.margin >= -T::lit(CERT_TOL)
    }

    /// The certificate's coefficients in Hardy-Rogers form (zero-padded),
    /// when the kind embeds.
    pub fn hardy_rogers(&self) -> Option<HRCoefficients<T>> {
        if self.kind.is_hardy_rogers_family() {
            self.coefficients.as_hardy_rogers().copied()
        } else {
            None
        }
    }

    /// The Gregus-type reading of a Hardy-Rogers certificate with
    /// `a2 = 0` or `a3 = 0` and `a4 = a5`.
    pub fn gregus_annotation(&self) -> Option<GregusAnnotation<T>> {
        if self.kind != ConditionKind::HardyRogers || !self.passes() {
            return None;
        }
        gregus_reduction(self.coefficients.as_hardy_rogers()?)
    }
}

/// Gregus-compatible parameters implied by Hardy-Rogers coefficients.
///
/// With `a3 = 0` (or `a2 = 0`) and `a4 = a5 = c`, the Hardy-Rogers bound is
/// dominated by `a1 d(x,y) + (1 − a1) max{d(x,Tx), d(y,Ty)} + c[d(x,Ty) + d(y,Tx)]`
/// because `1 − a1 ≥ a2 + a3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GregusAnnotation<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    /// `0 < a < 1`, required by both Gregus-type conditions.
    pub a_in_open_unit: bool,
    pub within_ciric_gregus_bound: bool,
    pub within_saha_ganguly_bound: bool,
}

pub fn gregus_reduction<T: Real>(hr: &HRCoefficients<T>) -> Option<GregusAnnotation<T>> {
    if !(is_zero(hr.a2) || is_zero(hr.a3)) || !is_zero(hr.a4 - hr.a5) {
        return None;
    }
    let a = hr.a1;
    let b = T::one() - a;
    let c = hr.a4.max(hr.a5);
    Some(GregusAnnotation {
        a,
        b,
        c,
        a_in_open_unit: a > T::zero() && a < T::one(),
        within_ciric_gregus_bound: c <= GregusBound::CiricGregus.max_c(a, b),
        within_saha_ganguly_bound: c <= GregusBound::SahaGanguly.max_c(a, b),
    })
}

/// Builds a certificate from already measured pairs. Minimum is taken in pair
/// order so the result does not depend on scheduling.
pub fn certify_measured<T: Real>(
    kind: ConditionKind,
    omega: OmegaSample,
    coefficients: Coefficients<T>,
    measured: &[PairDistances<T>],
) -> Result<ContractionCertificate<T>> {
    validate_coefficients(kind, &coefficients)?;
    if measured.is_empty() {
        return Err(Error::EmptyPairs);
    }
    let margin = measured
        .iter()
        .map(|p| coefficients.slack(kind, p))
        .fold(T::infinity(), |m, s| m.min(s));
    Ok(ContractionCertificate {
        kind,
        omega,
        coefficients,
        margin,
        pairs_checked: measured.len(),
    })
}

/// Checks `kind` with `coeffs` on every pair and reports the smallest slack.
pub fn check_condition<T: Real, O: RandomOperator<T> + ?Sized>(
    op: &O,
    omega: &OmegaSample,
    kind: ConditionKind,
    coeffs: Coefficients<T>,
    pairs: &[(Vector<T>, Vector<T>)],
    norm: &NormKind<T>,
) -> Result<ContractionCertificate<T>> {
    validate_coefficients(kind, &coeffs)?;
    let measured = measure_pairs(op, omega, pairs, norm)?;
    certify_measured(kind, *omega, coeffs, &measured)
}
