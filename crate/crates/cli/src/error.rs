use std::fmt::Display;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or input data.
    #[error("{0}")]
    Validation(String),
    /// Failure while computing or writing results.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn read(path: &Path, e: impl Display) -> Self {
        CliError::Validation(format!("cannot read {}: {e}", path.display()))
    }

    pub fn write(path: &Path, e: impl Display) -> Self {
        CliError::Runtime(format!("cannot write {}: {e}", path.display()))
    }

    /// Prefixes the message with the file it came from.
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            CliError::Runtime(m) => CliError::Runtime(format!("{}: {m}", path.display())),
        }
    }
}

impl From<synthcorr::Error> for CliError {
    fn from(e: synthcorr::Error) -> Self {
        match e {
            synthcorr::Error::Parameter { .. } | synthcorr::Error::Input(_) => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_kind() {
        let v: CliError = synthcorr::Error::Input("line 3: bad".into()).into();
        assert_eq!(v.exit_code(), 2);
        let r: CliError = synthcorr::Error::Disconnected.into();
        assert_eq!(r.exit_code(), 1);
        assert!(v.in_file(Path::new("a.csv")).to_string().starts_with("a.csv: "));
    }
}
