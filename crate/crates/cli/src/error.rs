//! Error taxonomy of the runner, mapped one-to-one onto exit codes.

use std::process::ExitCode;

/// Everything that can stop a run, sorted by who must act on it: the user's
/// config (2), the model's physics (3), a tolerance verdict (1), or the
/// filesystem (4).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed or inconsistent configuration; the message names the field.
    #[error("config error: {0}")]
    Config(String),

    /// The model refused a physically meaningful operation (broken phase,
    /// singular map, positivity loss), surfaced with grid context.
    #[error("physics error: {0}")]
    Physics(String),

    /// The run completed and wrote its outputs, but at least one configured
    /// tolerance was exceeded.
    #[error("tolerance failure: {failed} of {total} invariants exceeded their thresholds")]
    Tolerance { failed: usize, total: usize },

    /// Filesystem trouble reading configs or writing outputs.
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Tolerance { .. } => ExitCode::from(1),
            CliError::Config(_) => ExitCode::from(2),
            CliError::Physics(_) => ExitCode::from(3),
            CliError::Io(_) => ExitCode::from(4),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Library failure while interpreting user input: the config is at fault.
pub fn config_err(context: &str, err: nhh_core::Error) -> CliError {
    CliError::Config(format!("{context}: {err}"))
}

/// Library failure during computation: the physics is at fault.
pub fn physics_err(context: &str, err: nhh_core::Error) -> CliError {
    CliError::Physics(format!("{context}: {err} [{}]", err.kind()))
}

pub fn io_err(context: &str, err: std::io::Error) -> CliError {
    CliError::Io(format!("{context}: {err}"))
}
