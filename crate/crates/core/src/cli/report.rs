use serde::Serialize;

use crate::error::Error;

/// Process exit status contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    PredicateFail = 1,
    Validation = 2,
    Budget = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// A failed predicate is only an error when its hypothesis held.
    pub fn for_verdict(pass: bool, hypothesis_holds: bool) -> Self {
        if !pass && hypothesis_holds {
            ExitStatus::PredicateFail
        } else {
            ExitStatus::Ok
        }
    }

    pub fn for_error(e: &Error) -> Self {
        match e {
            Error::Budget { .. } => ExitStatus::Budget,
            _ => ExitStatus::Validation,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario_hash: Option<String>,
    pub elapsed_ms: u128,
}

impl Meta {
    pub fn new(command: &'static str, scenario_hash: Option<String>, elapsed_ms: u128) -> Self {
        Meta {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            scenario_hash,
            elapsed_ms,
        }
    }
}

/// `meta` carries run-dependent fields; `body` depends on the inputs only.
#[derive(Debug, Clone, Serialize)]
pub struct Report<S: Serialize, B: Serialize> {
    pub meta: Meta,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<S>,
    pub body: B,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub required: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
}

impl From<&Error> for ErrorRecord {
    fn from(e: &Error) -> Self {
        let kind = match e {
            Error::Domain(_) => "domain",
            Error::UnboundedDomain => "unbounded_domain",
            Error::UnboundedScore(_) => "unbounded_score",
            Error::TrivialRule => "trivial_rule",
            Error::Feasibility(_) => "feasibility",
            Error::Budget { .. } => "budget",
            Error::Validation { .. } => "validation",
        };
        let (path, required, cap) = match e {
            Error::Validation { path, .. } => (Some(path.clone()), None, None),
            Error::Budget { required, cap } => (None, Some(*required), Some(*cap)),
            _ => (None, None, None),
        };
        ErrorRecord {
            kind,
            message: e.to_string(),
            path,
            required,
            cap,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub meta: Meta,
    pub error: ErrorRecord,
}
