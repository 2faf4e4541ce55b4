use thiserror::Error;

use crate::expr::ExprError;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error(transparent)]
    Core(#[from] randfix_core::Error),

    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use randfix_core::Error as E;
        match self {
            CliError::Validation(_) | CliError::Expr(_) => EXIT_VALIDATION,
            CliError::Core(e) => match e {
                E::Infeasible { .. } => EXIT_INFEASIBLE,
                E::InvarianceViolation { .. } | E::Evaluation(_) | E::LinearProgram(_) => {
                    EXIT_FAILURE
                }
                _ => EXIT_VALIDATION,
            },
            CliError::Io { .. } | CliError::Other(_) => EXIT_FAILURE,
        }
    }
}
