//! Named problems and kernel templates.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::CliError;
use crate::problem::Scalar;

pub const PROBLEMS: [&str; 7] = [
    "scalar-affine",
    "rotation-2d",
    "scaling-0.4",
    "zero-free-term",
    "separable",
    "convolution",
    "green",
];

pub const KERNELS: [&str; 3] = ["separable", "convolution", "green"];

pub fn problem(name: &str) -> Result<Value, CliError> {
    let v = match name {
        // x ↦ a(ω) x + b(ω), a ∈ [0.1, 0.9), fixed point b/(1 − a).
        "scalar-affine" => json!({
            "seed": 42,
            "n_samples": 100,
            "tol": 1e-10,
            "operator": {"components": ["(0.1 + 0.8*u1)*x + 4*(u2 - 0.5)"]},
            "coefficients": {"mode": "declared", "values": ["0.1 + 0.8*u1", 0, 0, 0, 0]},
            "start": [0.0]
        }),
        // Random rotation scaled by 1/2 plus a random shift.
        "rotation-2d" => json!({
            "seed": 7,
            "n_samples": 50,
            "tol": 1e-10,
            "operator": {"components": [
                "0.5*(cos(6*u1)*x1 - sin(6*u1)*x2) + u2",
                "0.5*(sin(6*u1)*x1 + cos(6*u1)*x2) - u3"
            ]},
            "coefficients": {"mode": "declared", "values": [0.5, 0, 0, 0, 0]},
            "start": [0.0, 0.0]
        }),
        "scaling-0.4" => json!({
            "seed": 0,
            "n_samples": 1,
            "operator": {"components": ["0.4*x"]},
            "pairs": {"count": 64, "radius": 10.0, "orbit_pairs": 32},
            "condition": {"kind": "Banach", "values": [0.4, 0, 0, 0, 0]},
            "start": [0.0]
        }),
        "zero-free-term" => json!({
            "seed": 3,
            "n_samples": 20,
            "tol": 1e-10,
            "grid": {"rule": "trapezoid", "m": 65},
            "kernel": {"preset": "convolution", "params": {"scale": "0.5 + 0.5*u1", "decay": 2}},
            "free_term": 0,
            "nonlinearity": "0.5*sin(x)",
            "rho": 1.0,
            "f_coeffs": [0.5, 0, 0, 0, 0]
        }),
        // Exact solution t(1 + aλβ), β = (1/3)/(1 − aλ/3), a = 0.5 + u1, λ = 0.05.
        "separable" => json!({
            "seed": 11,
            "n_samples": 20,
            "tol": 1e-12,
            "norm": "sup",
            "grid": {"rule": "trapezoid", "m": 129},
            "kernel": {"preset": "separable", "params": {"scale": "0.5 + u1"}},
            "free_term": "t",
            "nonlinearity": "0.05*x",
            "rho": 2.0,
            "f_coeffs": [0.05, 0, 0, 0, 0]
        }),
        "convolution" => json!({
            "seed": 5,
            "n_samples": 20,
            "tol": 1e-10,
            "grid": {"rule": "gauss-legendre", "m": 48},
            "kernel": {"preset": "convolution", "params": {"scale": "0.5 + 0.5*u1", "decay": 2}},
            "free_term": "u2*cos(3*t)",
            "nonlinearity": "0.5*sin(x) + 0.1",
            "rho": 2.0,
            "f_coeffs": [0.5, 0, 0, 0, 0]
        }),
        "green" => json!({
            "seed": 8,
            "n_samples": 20,
            "tol": 1e-10,
            "grid": {"rule": "trapezoid", "m": 101},
            "kernel": {"preset": "green", "params": {"scale": "1 + u1"}},
            "free_term": 1,
            "nonlinearity": "0.8*sin(x) + t",
            "rho": 2.0,
            "f_coeffs": [0.8, 0, 0, 0, 0]
        }),
        other => {
            return Err(CliError::Validation(format!(
                "unknown preset {other:?}; known presets: {}",
                PROBLEMS.join(", ")
            )))
        }
    };
    Ok(v)
}

/// Expression for a named kernel with parameters substituted.
pub fn kernel(name: &str, params: &BTreeMap<String, Scalar>) -> Result<String, CliError> {
    let allowed: &[&str] = match name {
        "separable" | "green" => &["scale"],
        "convolution" => &["scale", "decay"],
        other => {
            return Err(CliError::Validation(format!(
                "unknown kernel preset {other:?}; known kernels: {}",
                KERNELS.join(", ")
            )))
        }
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(CliError::Validation(format!(
            "kernel {name:?} has no parameter {k:?}"
        )));
    }
    let p = |key: &str| match params.get(key) {
        Some(Scalar::Number(v)) => format!("({v:?})"),
        Some(Scalar::Expr(e)) => format!("({e})"),
        None => "1".to_string(),
    };
    Ok(match name {
        "separable" => format!("{}*t*s", p("scale")),
        "convolution" => format!("{}*exp(-{}*abs(t - s))", p("scale"), p("decay")),
        _ => format!("{}*min(t, s)*(1 - max(t, s))", p("scale")),
    })
}
