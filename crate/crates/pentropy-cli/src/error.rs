use std::path::{Path, PathBuf};

use pentropy::classify::ClassifyError;
use pentropy::entropy::EntropyError;
use pentropy::persistence::PersistenceError;
use pentropy::signal::SignalError;
use pentropy::stability::StabilityError;
use pentropy::synth::SynthError;
use pentropy::Error;

/// Failure categories, each with its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Io,
    Input,
    Computation,
    OracleMismatch,
}

impl Kind {
    pub fn exit_code(self) -> u8 {
        match self {
            Kind::Usage => 2,
            Kind::Io => 3,
            Kind::Input => 4,
            Kind::Computation => 5,
            Kind::OracleMismatch => 6,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Kind::Usage => "usage",
            Kind::Io => "io",
            Kind::Input => "invalid_input",
            Kind::Computation => "computation",
            Kind::OracleMismatch => "oracle_mismatch",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
    pub path: Option<PathBuf>,
}

impl CliError {
    pub fn new(kind: Kind, message: impl Into<String>) -> CliError {
        CliError {
            kind,
            message: message.into(),
            path: None,
        }
    }

    pub fn io(path: &Path, e: impl ToString) -> CliError {
        CliError::new(Kind::Io, e.to_string()).at(path)
    }

    pub fn at(mut self, path: &Path) -> CliError {
        self.path.get_or_insert_with(|| path.to_path_buf());
        self
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.kind.name(),
            "exit_code": self.kind.exit_code(),
            "message": self.message,
            "path": self.path.as_ref().map(|p| p.display().to_string()),
        })
        .to_string()
    }
}

fn signal_kind(e: &SignalError) -> Kind {
    match e {
        SignalError::Io(_) => Kind::Io,
        _ => Kind::Input,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let kind = match &e {
            Error::Signal(s) => signal_kind(s),
            Error::Persistence(PersistenceError::OracleTooLarge { .. }) => Kind::Usage,
            Error::Persistence(PersistenceError::UnexpectedCycles(_)) => Kind::OracleMismatch,
            Error::Entropy(_) => Kind::Computation,
            Error::Stability(StabilityError::Signal(s)) => signal_kind(s),
            Error::Stability(_) => Kind::Computation,
            Error::Classify(ClassifyError::Stratification { .. }) => Kind::Computation,
            Error::Classify(_) => Kind::Input,
            Error::Synth(SynthError::Io { .. }) => Kind::Io,
            Error::Synth(_) => Kind::Input,
        };
        let path = match &e {
            Error::Synth(SynthError::Io { path, .. }) => Some(path.clone()),
            _ => None,
        };
        CliError {
            kind,
            message: e.to_string(),
            path,
        }
    }
}

macro_rules! from_module_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> CliError {
                Error::from(e).into()
            }
        }
    )*};
}

from_module_error!(
    SignalError,
    PersistenceError,
    EntropyError,
    StabilityError,
    ClassifyError,
    SynthError
);
