use alloc::string::String;

/// Outcome of one named numerical check.
///
/// `informational` entries carry values for the record but never count
/// toward an overall pass/fail verdict.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckReport {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub abs_err: f64,
    pub tol: f64,
    pub pass: bool,
    pub informational: bool,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub note: Option<String>,
}

impl CheckReport {
    /// A check that passes iff `abs_err <= tol`.
    pub fn compare(name: impl Into<String>, value: f64, reference: f64, abs_err: f64, tol: f64) -> Self {
        CheckReport {
            name: name.into(),
            value,
            reference,
            abs_err,
            tol,
            // NaN errors fail.
            pass: abs_err <= tol,
            informational: false,
            note: None,
        }
    }

    pub fn info(name: impl Into<String>, value: f64, reference: f64) -> Self {
        CheckReport {
            name: name.into(),
            value,
            reference,
            abs_err: libm::fabs(value - reference),
            tol: 0.0,
            pass: true,
            informational: true,
            note: None,
        }
    }

    /// Marks the check as outside its hypothesis: kept for the record,
    /// excluded from verdicts.
    pub fn not_applicable(mut self, why: impl Into<String>) -> Self {
        self.informational = true;
        self.note = Some(why.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Whether this check counts as a failure in an overall verdict.
    pub fn is_failure(&self) -> bool {
        !self.informational && !self.pass
    }
}
