use thiserror::Error;

use crate::model::Loc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("parse error at {loc}: {msg}")]
    Parse { loc: Loc, msg: String },
    #[error("resolution error at {loc}: {msg}")]
    Resolution { loc: Loc, msg: String },
    #[error("invalid model at {loc}: {msg}")]
    Invalid { loc: Loc, msg: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("limit: {0}")]
    Limit(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Resolution { .. } | CliError::Invalid { .. } => 3,
            CliError::Limit(_) => 4,
        }
    }
}

impl From<hclosed_core::Error> for CliError {
    fn from(e: hclosed_core::Error) -> Self {
        use hclosed_core::Error as E;
        match e {
            E::SizeLimit(_) | E::FragmentEscape(_) => CliError::Limit(e.to_string()),
            E::Literal(_) => CliError::Parse { loc: Loc::default(), msg: e.to_string() },
            _ => CliError::Invalid { loc: Loc::default(), msg: e.to_string() },
        }
    }
}
