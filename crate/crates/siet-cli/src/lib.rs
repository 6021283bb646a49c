//! Library side of the `siet` command line tool: config parsing, command
//! implementations and CSV rendering, kept separate from the binary so
//! integration tests can drive them directly.

pub mod commands;
pub mod config;

use siet::Error;

/// Command-line failure categories, each with a fixed process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Constellation constraint violations (exit 2).
    InvalidConstellation(Vec<String>),
    /// Type/composition not realizable at the block length (exit 3).
    UnrealizableType(String),
    /// A Monte Carlo check missed its closed form (exit 1).
    VerificationFailed,
    /// Unusable configuration value or section (exit 4).
    Config(String),
    /// Filesystem problem (exit 4).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed => 1,
            CliError::InvalidConstellation(_) => 2,
            CliError::UnrealizableType(_) => 3,
            CliError::Config(_) | CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::InvalidConstellation(violations) => {
                writeln!(f, "invalid constellation:")?;
                for v in violations {
                    writeln!(f, "  - {v}")?;
                }
                Ok(())
            }
            CliError::UnrealizableType(msg) => write!(f, "unrealizable type: {msg}"),
            CliError::VerificationFailed => write!(f, "verification failed"),
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::RadiusTooLarge { .. }
            | Error::DegenerateConstellation
            | Error::InfeasibleGeometry(_) => CliError::InvalidConstellation(vec![e.to_string()]),
            Error::Infeasible(_)
            | Error::CountMismatch { .. }
            | Error::NotAPmf(_)
            | Error::Exhausted { .. }
            | Error::TooManyCodewords { .. }
            | Error::ZeroTypeEntry { .. }
            | Error::TooFewMessages(_) => CliError::UnrealizableType(e.to_string()),
            Error::InvalidEpsilon(_) => CliError::Config(e.to_string()),
        }
    }
}

/// Floats at 12 significant digits, scientific notation; specials spelled
/// out.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.11e}")
    }
}
