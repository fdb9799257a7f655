//! Scripted verifications of algebraic identities, each producing a
//! [`CheckReport`].

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::ope::OpeError;

pub mod differential;
pub mod hat;
pub mod lattice;

pub use differential::{
    check_differential_general, check_differential_quintic, differential_field, verify_d_squared, verify_prop34,
    AnsatzError, GeneralAnsatz,
};
pub use hat::{verify_hat_fields, verify_hat_lj, verify_remark_beta, HatSetup};
pub use lattice::{j_field, l_field, verify_lj_descend, verify_vertop, zero_mode_weight};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Engine(#[from] OpeError),
    #[error(transparent)]
    Ansatz(#[from] AnsatzError),
    #[error("{0}")]
    Input(String),
}

/// One failed condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// What was being compared, e.g. a term pair.
    pub subject: String,
    /// The offending expression (usually a singular part or a remainder).
    pub found: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub witnesses: Vec<Witness>,
    /// Facts established along the way that are not pass/fail conditions.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub elapsed_ms: u64,
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Collects witnesses and notes for one check.
pub(crate) struct Recorder {
    check: String,
    start: Instant,
    witnesses: Vec<Witness>,
    notes: Vec<String>,
}

impl Recorder {
    pub fn new(check: &str) -> Self {
        Self {
            check: check.to_string(),
            start: Instant::now(),
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn fail(&mut self, subject: impl Into<String>, found: impl ToString) {
        self.witnesses.push(Witness {
            subject: subject.into(),
            found: found.to_string(),
        });
    }

    /// Records a failure unless `ok`.
    pub fn expect(&mut self, ok: bool, subject: impl Into<String>, found: impl ToString) {
        if !ok {
            self.fail(subject, found);
        }
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn finish(self) -> CheckReport {
        CheckReport {
            pass: self.witnesses.is_empty(),
            check: self.check,
            witnesses: self.witnesses,
            notes: self.notes,
            elapsed_ms: self.start.elapsed().as_millis() as u64,
        }
    }
}
