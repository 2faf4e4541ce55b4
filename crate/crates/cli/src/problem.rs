//! Problem documents: parsing, preset merging, overrides and validation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use randfix_core::contraction::{Coefficients, GregusBound, GregusParams, ZamfirescuParams};
use randfix_core::hammerstein::HammersteinProblem;
use randfix_core::randomfp::{PairSampling, RandomCoefficientSpec};
use randfix_core::{
    ConditionKind, HRCoefficients, NormKind, OmegaSample, PicardConfig, ProbabilitySpace,
    QuadratureGrid, QuadratureRule, RandomOperator, Vector,
};

use crate::error::CliError;
use crate::expr::{Env, Expr, Scope};
use crate::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NormChoice {
    Sup,
    L2,
}

impl NormChoice {
    pub fn name(self) -> &'static str {
        match self {
            NormChoice::Sup => "sup",
            NormChoice::L2 => "l2",
        }
    }
}

/// A number or an expression string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Expr(String),
}

impl Scalar {
    fn source(&self) -> String {
        match self {
            Scalar::Number(v) => format!("{v:?}"),
            Scalar::Expr(s) => s.clone(),
        }
    }

    fn parse(&self, scope: Scope) -> Result<Expr, CliError> {
        Ok(Expr::parse(&self.source(), scope)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Scalar(Scalar),
    Preset {
        preset: String,
        #[serde(default)]
        params: BTreeMap<String, Scalar>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    /// One expression per output coordinate.
    pub components: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum CoefficientsSpec {
    Fitted,
    Declared { values: Vec<Scalar> },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub count: Option<usize>,
    pub radius: Option<f64>,
    pub orbit_pairs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionSpec {
    pub kind: ConditionKind,
    /// Five Hardy-Rogers slots, `(α, β, γ)` for Zamfirescu, or `(a, c)` for
    /// the Gregus-type kinds.
    pub values: Vec<Scalar>,
    pub bound: Option<GregusBound>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub rule: QuadratureRule,
    pub m: usize,
}

/// The on-disk problem document. Every field is optional so that presets can
/// be partially overridden.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub n_samples: Option<u64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub norm: Option<NormChoice>,
    pub operator: Option<OperatorSpec>,
    pub coefficients: Option<CoefficientsSpec>,
    pub start: Option<Vec<f64>>,
    pub pairs: Option<PairSpec>,
    pub condition: Option<ConditionSpec>,
    pub grid: Option<GridSpec>,
    pub kernel: Option<FunctionSpec>,
    pub free_term: Option<FunctionSpec>,
    pub nonlinearity: Option<FunctionSpec>,
    pub rho: Option<f64>,
    pub f_coeffs: Option<[f64; 5]>,
}

/// Command-line overrides applied on top of the document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub n_samples: Option<u64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub grid_m: Option<usize>,
    pub norm: Option<NormChoice>,
}

/// Reads the document at `path` (or the named preset), merges it over its
/// preset and applies overrides.
pub fn load(
    path: Option<&Path>,
    preset: Option<&str>,
    ov: &Overrides,
) -> Result<ProblemFile, CliError> {
    let mut doc = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str::<serde_json::Value>(&text).map_err(|e| {
                CliError::Validation(format!("malformed JSON in {}: {e}", p.display()))
            })?
        }
        None => serde_json::json!({}),
    };
    if let Some(name) = preset {
        doc["preset"] = serde_json::Value::String(name.to_string());
    }
    if !doc.is_object() {
        return Err(CliError::Validation(
            "problem document must be a JSON object".into(),
        ));
    }
    if let Some(name) = doc
        .get("preset")
        .and_then(|v| v.as_str())
        .map(str::to_string)
    {
        let mut base = presets::problem(&name)?;
        for (k, v) in doc.as_object().unwrap() {
            base[k.as_str()] = v.clone();
        }
        doc = base;
    }
    if doc.as_object().is_some_and(|o| o.is_empty()) {
        return Err(CliError::Validation(
            "no problem given: pass --input or --preset".into(),
        ));
    }
    let mut file: ProblemFile = serde_json::from_value(doc)
        .map_err(|e| CliError::Validation(format!("invalid problem: {e}")))?;
    file.seed = ov.seed.or(file.seed);
    file.n_samples = ov.n_samples.or(file.n_samples);
    file.tol = ov.tol.or(file.tol);
    file.max_iter = ov.max_iter.or(file.max_iter);
    file.norm = ov.norm.or(file.norm);
    if let Some(m) = ov.grid_m {
        let rule = file
            .grid
            .as_ref()
            .map_or(QuadratureRule::Trapezoid, |g| g.rule);
        file.grid = Some(GridSpec { rule, m });
    }
    Ok(file)
}

/// Settings shared by every subcommand, after defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSettings {
    pub preset: Option<String>,
    pub seed: u64,
    pub n_samples: u64,
    pub tol: f64,
    pub max_iter: usize,
    pub norm: NormChoice,
}

impl RunSettings {
    pub fn space(&self) -> Result<ProbabilitySpace, CliError> {
        Ok(ProbabilitySpace::new(self.seed, self.n_samples)?)
    }
}

fn settings(file: &ProblemFile, default_norm: NormChoice) -> Result<RunSettings, CliError> {
    let s = RunSettings {
        preset: file.preset.clone(),
        seed: file.seed.unwrap_or(0),
        n_samples: file.n_samples.unwrap_or(100),
        tol: file.tol.unwrap_or(1e-10),
        max_iter: file.max_iter.unwrap_or(10_000),
        norm: file.norm.unwrap_or(default_norm),
    };
    if s.n_samples == 0 {
        return Err(CliError::Validation("n_samples must be at least 1".into()));
    }
    if !(s.tol > 0.0 && s.tol.is_finite()) {
        return Err(CliError::Validation(format!(
            "tol = {} must be positive",
            s.tol
        )));
    }
    if s.max_iter == 0 {
        return Err(CliError::Validation("max_iter must be at least 1".into()));
    }
    Ok(s)
}

/// Operator on ℝⁿ given by one expression per coordinate.
#[derive(Debug, Clone)]
pub struct ExprOperator {
    components: Vec<Expr>,
}

impl ExprOperator {
    pub fn new(spec: &OperatorSpec) -> Result<Self, CliError> {
        let dim = spec.components.len();
        if dim == 0 {
            return Err(CliError::Validation(
                "operator needs at least one component".into(),
            ));
        }
        let components = spec
            .components
            .iter()
            .map(|c| Expr::parse(c, Scope::Operator { dim }))
            .collect::<Result<_, _>>()?;
        Ok(Self { components })
    }
}

impl RandomOperator<f64> for ExprOperator {
    fn dim(&self) -> usize {
        self.components.len()
    }

    fn eval(&self, omega: &OmegaSample, x: &Vector<f64>) -> Vector<f64> {
        let mut env = Env::new(Some(omega));
        env.x = x.as_slice();
        Vector::new(self.components.iter().map(|c| c.eval(&env)).collect())
    }
}

/// Condition kind with per-ω coefficient expressions.
#[derive(Debug, Clone)]
pub struct ConditionChoice {
    pub kind: ConditionKind,
    values: Vec<Expr>,
    bound: GregusBound,
}

impl ConditionChoice {
    fn new(spec: &ConditionSpec) -> Result<Self, CliError> {
        let want = match spec.kind {
            ConditionKind::Zamfirescu => 3,
            ConditionKind::GregusCiric | ConditionKind::SahaGanguly => 2,
            _ => 5,
        };
        if spec.values.len() != want {
            return Err(CliError::Validation(format!(
                "{:?} takes {want} values, got {}",
                spec.kind,
                spec.values.len()
            )));
        }
        let values = spec
            .values
            .iter()
            .map(|v| v.parse(Scope::Coefficient))
            .collect::<Result<_, _>>()?;
        let bound = spec.bound.unwrap_or(match spec.kind {
            ConditionKind::SahaGanguly => GregusBound::SahaGanguly,
            _ => GregusBound::CiricGregus,
        });
        Ok(Self {
            kind: spec.kind,
            values,
            bound,
        })
    }

    pub fn at(&self, omega: &OmegaSample) -> Coefficients<f64> {
        let env = Env::new(Some(omega));
        let v: Vec<f64> = self.values.iter().map(|e| e.eval(&env)).collect();
        match self.kind {
            ConditionKind::Zamfirescu => Coefficients::Zamfirescu(ZamfirescuParams {
                alpha: v[0],
                beta: v[1],
                gamma: v[2],
            }),
            ConditionKind::GregusCiric | ConditionKind::SahaGanguly => {
                Coefficients::Gregus(GregusParams::new(v[0], v[1], self.bound))
            }
            _ => Coefficients::HardyRogers(HRCoefficients::new(v[0], v[1], v[2], v[3], v[4])),
        }
    }
}

/// A random operator on ℝⁿ with everything needed to solve or classify it.
pub struct FixedPointSetup {
    pub settings: RunSettings,
    pub operator: ExprOperator,
    pub coefficients: RandomCoefficientSpec<f64>,
    pub start: Vector<f64>,
    pub pairs: PairSampling<f64>,
    pub condition: Option<ConditionChoice>,
}

impl FixedPointSetup {
    pub fn from_file(file: &ProblemFile) -> Result<Self, CliError> {
        let settings = settings(file, NormChoice::L2)?;
        let spec = file
            .operator
            .as_ref()
            .ok_or_else(|| CliError::Validation("missing \"operator\"".into()))?;
        let operator = ExprOperator::new(spec)?;
        let dim = operator.dim();
        let start = match &file.start {
            Some(s) if s.len() != dim => {
                return Err(CliError::Validation(format!(
                    "start has {} coordinates, operator has {dim}",
                    s.len()
                )))
            }
            Some(s) => Vector::new(s.clone()),
            None => Vector::zeros(dim),
        };
        if !start.is_finite() {
            return Err(CliError::Validation("start must be finite".into()));
        }
        let defaults = PairSampling::<f64>::default();
        let p = file.pairs.clone().unwrap_or_default();
        let pairs = PairSampling {
            count: p.count.unwrap_or(defaults.count),
            radius: p.radius.unwrap_or(defaults.radius),
            orbit_pairs: p.orbit_pairs.unwrap_or(defaults.orbit_pairs),
        };
        if pairs.count + pairs.orbit_pairs == 0 {
            return Err(CliError::Validation("pair sample is empty".into()));
        }
        if !(pairs.radius > 0.0 && pairs.radius.is_finite()) {
            return Err(CliError::Validation("pairs.radius must be positive".into()));
        }
        let coefficients = match &file.coefficients {
            None | Some(CoefficientsSpec::Fitted) => RandomCoefficientSpec::fitted(),
            Some(CoefficientsSpec::Declared { values }) => {
                if values.len() != 5 {
                    return Err(CliError::Validation(format!(
                        "declared coefficients need 5 values, got {}",
                        values.len()
                    )));
                }
                let exprs: Vec<Expr> = values
                    .iter()
                    .map(|v| v.parse(Scope::Coefficient))
                    .collect::<Result<_, _>>()?;
                RandomCoefficientSpec::declared(move |w: &OmegaSample| {
                    let env = Env::new(Some(w));
                    let v: Vec<f64> = exprs.iter().map(|e| e.eval(&env)).collect();
                    HRCoefficients::new(v[0], v[1], v[2], v[3], v[4])
                })
            }
        }
        .with_pairs(pairs);
        let condition = file
            .condition
            .as_ref()
            .map(ConditionChoice::new)
            .transpose()?;
        Ok(Self {
            settings,
            operator,
            coefficients,
            start,
            pairs,
            condition,
        })
    }

    pub fn norm(&self) -> NormKind<f64> {
        match self.settings.norm {
            NormChoice::Sup => NormKind::Sup,
            NormChoice::L2 => NormKind::Euclidean,
        }
    }

    pub fn picard(&self) -> PicardConfig<f64> {
        PicardConfig::new(self.settings.tol, self.settings.max_iter, self.norm())
    }
}

fn kernel_source(spec: &FunctionSpec) -> Result<String, CliError> {
    match spec {
        FunctionSpec::Scalar(s) => Ok(s.source()),
        FunctionSpec::Preset { preset, params } => presets::kernel(preset, params),
    }
}

fn plain_source(spec: &FunctionSpec, what: &str) -> Result<String, CliError> {
    match spec {
        FunctionSpec::Scalar(s) => Ok(s.source()),
        FunctionSpec::Preset { preset, .. } => Err(CliError::Validation(format!(
            "{what} does not take presets (got {preset:?})"
        ))),
    }
}

pub struct HammersteinSetup {
    pub settings: RunSettings,
    pub problem: HammersteinProblem<f64>,
    pub grid: GridSpec,
}

impl HammersteinSetup {
    pub fn from_file(file: &ProblemFile) -> Result<Self, CliError> {
        let settings = settings(file, NormChoice::Sup)?;
        let missing = |f: &str| CliError::Validation(format!("missing \"{f}\""));
        let grid_spec = file.grid.clone().unwrap_or(GridSpec {
            rule: QuadratureRule::Trapezoid,
            m: 129,
        });
        let grid = QuadratureGrid::new(grid_spec.rule, grid_spec.m)?;
        let kernel = Expr::parse(
            &kernel_source(file.kernel.as_ref().ok_or_else(|| missing("kernel"))?)?,
            Scope::Kernel,
        )?;
        let free_term = Expr::parse(
            &plain_source(
                file.free_term
                    .as_ref()
                    .ok_or_else(|| missing("free_term"))?,
                "free_term",
            )?,
            Scope::FreeTerm,
        )?;
        let nonlinearity = Expr::parse(
            &plain_source(
                file.nonlinearity
                    .as_ref()
                    .ok_or_else(|| missing("nonlinearity"))?,
                "nonlinearity",
            )?,
            Scope::Nonlinearity,
        )?;
        let rho = file.rho.ok_or_else(|| missing("rho"))?;
        let c = file.f_coeffs.ok_or_else(|| missing("f_coeffs"))?;
        let problem = HammersteinProblem::new(
            grid,
            move |w: &OmegaSample, t: f64, s: f64| {
                let mut env = Env::new(Some(w));
                env.t = t;
                env.s = s;
                kernel.eval(&env)
            },
            move |w: &OmegaSample, t: f64| {
                let mut env = Env::new(Some(w));
                env.t = t;
                free_term.eval(&env)
            },
            move |t: f64, x: f64| {
                let xs = [x];
                let mut env = Env::new(None);
                env.t = t;
                env.x = &xs;
                nonlinearity.eval(&env)
            },
            rho,
            HRCoefficients::from_array(c),
        )?;
        Ok(Self {
            settings,
            problem,
            grid: grid_spec,
        })
    }

    pub fn norm(&self) -> NormKind<f64> {
        match self.settings.norm {
            NormChoice::Sup => NormKind::Sup,
            NormChoice::L2 => NormKind::WeightedL2(self.problem.grid.weights.clone()),
        }
    }

    pub fn picard(&self) -> PicardConfig<f64> {
        PicardConfig::new(self.settings.tol, self.settings.max_iter, self.norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(v: serde_json::Value) -> Result<ProblemFile, serde_json::Error> {
        serde_json::from_value(v)
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(parse(serde_json::json!({"sed": 1})).is_err());
        assert!(parse(serde_json::json!({"pairs": {"cnt": 1}})).is_err());
    }

    #[test]
    fn scalar_forms() {
        let f = parse(serde_json::json!({
            "coefficients": {"mode": "declared", "values": [0.5, "0.1*u1", 0, 0, 0]},
            "kernel": {"preset": "separable", "params": {"scale": "1+u1"}},
            "free_term": "t",
            "nonlinearity": 0.5
        }))
        .unwrap();
        assert!(matches!(f.kernel, Some(FunctionSpec::Preset { .. })));
        assert_eq!(
            f.nonlinearity,
            Some(FunctionSpec::Scalar(Scalar::Number(0.5)))
        );
    }

    #[test]
    fn start_dimension_checked() {
        let f = parse(serde_json::json!({
            "operator": {"components": ["0.5*x1", "0.5*x2"]},
            "start": [1.0]
        }))
        .unwrap();
        assert!(matches!(
            FixedPointSetup::from_file(&f),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides {
            seed: Some(9),
            grid_m: Some(33),
            ..Default::default()
        };
        let f = load(None, Some("separable"), &ov).unwrap();
        assert_eq!(f.seed, Some(9));
        assert_eq!(f.grid.unwrap().m, 33);
    }

    #[test]
    fn condition_arity() {
        let f = parse(serde_json::json!({
            "operator": {"components": ["0.5*x"]},
            "condition": {"kind": "Zamfirescu", "values": [0.5, 0.2]}
        }))
        .unwrap();
        assert!(FixedPointSetup::from_file(&f).is_err());
    }
}
