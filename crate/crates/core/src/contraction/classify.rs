use serde::Serialize;

use super::fit::{fit_measured, fit_zamfirescu, search_gregus};
use super::{
    certify_measured, measure_pairs, Coefficients, ConditionKind, ContractionCertificate,
    GregusAnnotation, GregusBound,
};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::space::{NormKind, OmegaSample, RandomOperator, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Lattice step for the Gregus-type `(a, c)` search.
    pub lattice_step: f64,
    /// `c` bound used when testing the `GregusCiric` kind.
    pub gregus_bound: GregusBound,
    /// `c` bound used when testing the `SahaGanguly` kind.
    pub saha_ganguly_bound: GregusBound,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            lattice_step: 0.01,
            gregus_bound: GregusBound::CiricGregus,
            saha_ganguly_bound: GregusBound::SahaGanguly,
        }
    }
}

/// Result of testing one kind.
#[derive(Debug, Clone, PartialEq)]
pub struct KindOutcome<T> {
    pub kind: ConditionKind,
    /// Best coefficients found, whether or not they are admissible.
    pub best: Option<Coefficients<T>>,
    /// Present when the best coefficients are admissible and pass.
    pub certificate: Option<ContractionCertificate<T>>,
    pub reason: Option<String>,
}

impl<T: Real> KindOutcome<T> {
    pub fn certified(&self) -> bool {
        self.certificate.as_ref().is_some_and(|c| c.passes())
    }
}

#[derive(Serialize)]
struct OutcomeRecord<'a, T> {
    kind: ConditionKind,
    certified: bool,
    coefficients: Option<&'a Coefficients<T>>,
    margin: Option<&'a T>,
    reason: Option<&'a str>,
}

impl<T: Real + Serialize> Serialize for KindOutcome<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OutcomeRecord {
            kind: self.kind,
            certified: self.certified(),
            coefficients: self.best.as_ref(),
            margin: self.certificate.as_ref().map(|c| &c.margin),
            reason: self.reason.as_deref(),
        }
        .serialize(s)
    }
}

/// Membership of one operator at one outcome in each condition class.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct Classification<T> {
    pub omega_index: u64,
    pub pairs_checked: usize,
    pub certified_kinds: Vec<ConditionKind>,
    pub outcomes: Vec<KindOutcome<T>>,
    /// Emitted when the Hardy-Rogers certificate has `a2 = 0` or `a3 = 0`
    /// and `a4 = a5`.
    pub gregus_annotation: Option<GregusAnnotation<T>>,
}

impl<T: Real> Classification<T> {
    pub fn contains(&self, kind: ConditionKind) -> bool {
        self.certified_kinds.contains(&kind)
    }

    pub fn outcome(&self, kind: ConditionKind) -> &KindOutcome<T> {
        self.outcomes
            .iter()
            .find(|o| o.kind == kind)
            .expect("every kind is tested")
    }

    pub fn certificates(&self) -> impl Iterator<Item = &ContractionCertificate<T>> {
        self.outcomes
            .iter()
            .filter(|o| o.certified())
            .filter_map(|o| o.certificate.as_ref())
    }
}

fn outcome_from<T: Real>(
    kind: ConditionKind,
    omega: OmegaSample,
    best: Coefficients<T>,
    measured: &[super::PairDistances<T>],
) -> KindOutcome<T> {
    match certify_measured(kind, omega, best, measured) {
        Ok(cert) if cert.passes() => KindOutcome {
            kind,
            best: Some(best),
            certificate: Some(cert),
            reason: None,
        },
        Ok(cert) => KindOutcome {
            kind,
            best: Some(best),
            reason: Some(format!("margin {} is negative", cert.margin)),
            certificate: Some(cert),
        },
        Err(e) => KindOutcome {
            kind,
            best: Some(best),
            certificate: None,
            reason: Some(e.to_string()),
        },
    }
}

/// Tests every condition kind on the pair sample.
pub fn classify<T: Real, O: RandomOperator<T> + ?Sized>(
    op: &O,
    omega: &OmegaSample,
    pairs: &[(Vector<T>, Vector<T>)],
    norm: &NormKind<T>,
    options: &ClassifyOptions,
) -> Result<Classification<T>> {
    if pairs.is_empty() {
        return Err(Error::EmptyPairs);
    }
    if pairs.iter().all(|(a, b)| a == b) {
        return Err(Error::DegenerateSample);
    }
    if !(options.lattice_step > 0.0 && options.lattice_step < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "lattice step {} must lie in (0, 1)",
            options.lattice_step
        )));
    }
    let measured = measure_pairs(op, omega, pairs, norm)?;

    let mut outcomes = Vec::with_capacity(ConditionKind::ALL.len());
    for kind in ConditionKind::ALL {
        let outcome = match kind {
            k if k.is_hardy_rogers_family() => match fit_measured(k, &measured) {
                Ok(c) => outcome_from(k, *omega, Coefficients::HardyRogers(c), &measured),
                Err(e) => KindOutcome {
                    kind: k,
                    best: None,
                    certificate: None,
                    reason: Some(e.to_string()),
                },
            },
            ConditionKind::Zamfirescu => {
                let z = fit_zamfirescu(&measured);
                outcome_from(kind, *omega, Coefficients::Zamfirescu(z), &measured)
            }
            ConditionKind::GregusCiric | ConditionKind::SahaGanguly => {
                let bound = if kind == ConditionKind::GregusCiric {
                    options.gregus_bound
                } else {
                    options.saha_ganguly_bound
                };
                match search_gregus(kind, bound, options.lattice_step, &measured) {
                    Some((g, _)) => outcome_from(kind, *omega, Coefficients::Gregus(g), &measured),
                    None => KindOutcome {
                        kind,
                        best: None,
                        certificate: None,
                        reason: Some("empty parameter lattice".into()),
                    },
                }
            }
            _ => unreachable!(),
        };
        outcomes.push(outcome);
    }

    let certified_kinds = outcomes
        .iter()
        .filter(|o| o.certified())
        .map(|o| o.kind)
        .collect();
    let gregus_annotation = outcomes
        .iter()
        .find(|o| o.kind == ConditionKind::HardyRogers)
        .and_then(|o| o.certificate.as_ref())
        .and_then(|c| c.gregus_annotation());

    Ok(Classification {
        omega_index: omega.index,
        pairs_checked: measured.len(),
        certified_kinds,
        outcomes,
        gregus_annotation,
    })
}
