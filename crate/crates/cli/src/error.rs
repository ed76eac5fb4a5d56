use std::process::ExitCode;

use serde::Serialize;

/// Error with its process exit code: 2 input, 3 numeric, 4 I/O.
#[derive(Debug)]
pub struct CliError {
    kind: &'static str,
    code: u8,
    message: String,
}

#[derive(Serialize)]
struct ErrorLine<'a> {
    error: &'a str,
    kind: &'a str,
    exit_code: u8,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            kind: "input",
            code: 2,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        CliError {
            kind: "numeric",
            code: 3,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            kind: "io",
            code: 4,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ErrorLine {
            error: &self.message,
            kind: self.kind,
            exit_code: self.code,
        })
        .expect("error line serializes")
    }
}

impl From<ratio_tail::Error> for CliError {
    fn from(e: ratio_tail::Error) -> Self {
        if e.is_input_error() {
            CliError::input(e.to_string())
        } else {
            CliError::numeric(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}
