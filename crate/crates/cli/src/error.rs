use std::fmt;

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed input; the message names the offending key. Exit 1.
    Validation(String),
    /// Unreadable input or unwritable output. Exit 1.
    Io(String),
    /// A numerical module failed; its error is passed on verbatim. Exit 2.
    Numerical(maglev_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    /// Core error re-labelled with the scenario key it came from.
    pub fn invalid(key: &str, e: maglev_core::Error) -> Self {
        CliError::Validation(format!("{key}: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Parameter errors are validation failures; everything else is numerical.
impl From<maglev_core::Error> for CliError {
    fn from(e: maglev_core::Error) -> Self {
        match e {
            maglev_core::Error::InvalidParameter { .. } => CliError::Validation(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}
