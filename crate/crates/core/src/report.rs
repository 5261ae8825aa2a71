//! Conclusion records shared by the theorem checkers.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

/// One checked consequence of a theorem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conclusion {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Conclusion {
    pub fn check(name: impl Into<String>, holds: bool) -> Self {
        Conclusion { name: name.into(), status: if holds { Status::Pass } else { Status::Fail }, detail: None }
    }

    pub fn not_applicable(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Conclusion { name: name.into(), status: Status::NotApplicable, detail: Some(reason.into()) }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// True when no conclusion failed.
pub fn no_failures(conclusions: &[Conclusion]) -> bool {
    conclusions.iter().all(|c| c.status != Status::Fail)
}
