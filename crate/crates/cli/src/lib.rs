//! Experiment harness for the dm-secrecy library: JSON configs in,
//! CSV/JSON sweep tables out.

pub mod config;
pub mod rows;
pub mod runner;

/// Exit code for configuration and I/O failures.
pub const EXIT_CONFIG: u8 = 2;
/// Exit code for numerical solver failures.
pub const EXIT_NUMERICAL: u8 = 3;

/// Harness-level error with a stable exit-code mapping.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dm_secrecy::Error> for CliError {
    fn from(err: dm_secrecy::Error) -> Self {
        match err {
            dm_secrecy::Error::Numerical(msg) => CliError::Numerical(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Environment variable consulted for the default seed when `--seed` is
/// absent.
pub const SEED_ENV_VAR: &str = "DM_SECRECY_SEED";

/// Seed precedence: `--seed` flag, then `DM_SECRECY_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(text) => text.parse().map_err(|_| {
            CliError::Config(format!(
                "{SEED_ENV_VAR} must be an unsigned integer, got '{text}'"
            ))
        }),
        Err(_) => Ok(0),
    }
}
