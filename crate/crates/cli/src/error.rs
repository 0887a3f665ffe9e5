use std::fmt;

/// An error with its process exit code: 1 verification failure, 2 an
/// unresolvable reference, 3 invalid input, 4 a resource cap.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub const VERIFICATION: u8 = 1;
    pub const RESOLUTION: u8 = 2;
    pub const VALIDATION: u8 = 3;
    pub const CAP: u8 = 4;

    pub fn resolution(message: impl Into<String>) -> Self {
        CliError {
            code: Self::RESOLUTION,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: Self::VALIDATION,
            message: message.into(),
        }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        CliError {
            code: Self::VERIFICATION,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<malle_core::Error> for CliError {
    fn from(e: malle_core::Error) -> Self {
        let code = match e {
            malle_core::Error::CapExceeded { .. } => Self::CAP,
            _ => Self::VALIDATION,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::validation(format!("invalid JSON: {e}"))
    }
}
