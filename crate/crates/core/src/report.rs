//! Structured verification outcomes shared by every suite.

use std::collections::BTreeMap;
use std::fmt::{Display, Write as _};
use std::time::Duration;

use serde::{Deserialize, Serialize};

const EXCERPT_CHARS: usize = 240;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub case: String,
    pub lhs: String,
    pub rhs: String,
}

/// Field order is the serialization order; wall time is kept out of the JSON
/// body so identical runs produce identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub anchor: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub cases: Vec<CaseResult>,
    pub failures: Vec<Failure>,
    pub max_residual: Option<f64>,
    pub exact: bool,
    pub passed: bool,
    pub case_count: usize,
    #[serde(skip)]
    pub wall_time: Option<Duration>,
}

fn excerpt(x: impl Display) -> String {
    let s = x.to_string();
    if s.chars().count() <= EXCERPT_CHARS {
        s
    } else {
        let cut: String = s.chars().take(EXCERPT_CHARS).collect();
        format!("{cut}...")
    }
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, anchor: impl Into<String>) -> Self {
        VerificationReport {
            suite: suite.into(),
            anchor: anchor.into(),
            params: BTreeMap::new(),
            cases: Vec::new(),
            failures: Vec::new(),
            max_residual: None,
            exact: true,
            passed: true,
            case_count: 0,
            wall_time: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.params.insert(key.to_string(), v);
        self
    }

    pub fn set_param(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.params.insert(key.to_string(), v);
    }

    fn push(&mut self, case: CaseResult, lhs: impl Display, rhs: impl Display) {
        if !case.passed {
            self.passed = false;
            self.failures.push(Failure {
                case: case.case.clone(),
                lhs: excerpt(lhs),
                rhs: excerpt(rhs),
            });
        }
        self.cases.push(case);
        self.case_count = self.cases.len();
    }

    /// Records an exact comparison.
    pub fn exact_case(&mut self, case: impl Into<String>, ok: bool, lhs: impl Display, rhs: impl Display) {
        let case = CaseResult { case: case.into(), passed: ok, residual: None, tolerance: None };
        self.push(case, lhs, rhs);
    }

    /// Records a numeric comparison; non-finite residuals fail.
    pub fn numeric_case(
        &mut self,
        case: impl Into<String>,
        residual: f64,
        tolerance: f64,
        lhs: impl Display,
        rhs: impl Display,
    ) {
        self.exact = false;
        let ok = residual.is_finite() && residual <= tolerance;
        let stored = residual.is_finite().then_some(residual);
        if let Some(r) = stored {
            self.max_residual = Some(self.max_residual.map_or(r, |m| m.max(r)));
        }
        let case = CaseResult { case: case.into(), passed: ok, residual: stored, tolerance: Some(tolerance) };
        self.push(case, lhs, rhs);
    }

    /// Records a failure that has no natural two-sided form.
    pub fn error_case(&mut self, case: impl Into<String>, message: impl Display) {
        let case = CaseResult { case: case.into(), passed: false, residual: None, tolerance: None };
        self.push(case, message, "");
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.exact &= other.exact;
        self.passed &= other.passed;
        if let Some(r) = other.max_residual {
            self.max_residual = Some(self.max_residual.map_or(r, |m| m.max(r)));
        }
        self.cases.extend(other.cases);
        self.failures.extend(other.failures);
        self.case_count = self.cases.len();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let status = if self.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "[{status}] {} ({})", self.suite, self.anchor);
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(s, "  params: {}", p.join(" "));
        }
        let passed = self.cases.iter().filter(|c| c.passed).count();
        if self.case_count == 0 {
            let _ = writeln!(s, "  0 cases (vacuous pass)");
        } else {
            let _ = writeln!(s, "  cases: {passed}/{} passed", self.case_count);
        }
        if self.exact {
            let _ = writeln!(s, "  exact symbolic comparison");
        } else if let Some(r) = self.max_residual {
            let _ = writeln!(s, "  max residual: {r:.3e}");
        }
        for f in &self.failures {
            let _ = writeln!(s, "  failed {}:\n    lhs: {}\n    rhs: {}", f.case, f.lhs, f.rhs);
        }
        if let Some(t) = self.wall_time {
            let _ = writeln!(s, "  wall time: {:.3}s", t.as_secs_f64());
        }
        s
    }
}
