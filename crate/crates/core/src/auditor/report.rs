//! Audit report with a fixed, versioned JSON layout.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const REPORT_SCHEMA: &str = "mps-audit";
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    ReportOnly,
    Inapplicable,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::ReportOnly => "report_only",
            CheckStatus::Inapplicable => "inapplicable",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    /// Measured margin, residual or empirical constant.
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditReport {
    pub schema: String,
    pub schema_version: u32,
    pub checks: Vec<CheckResult>,
}

impl Default for AuditReport {
    fn default() -> Self {
        AuditReport {
            schema: REPORT_SCHEMA.into(),
            schema_version: REPORT_SCHEMA_VERSION,
            checks: Vec::new(),
        }
    }
}

fn real(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.16e}"),
        _ => "null".into(),
    }
}

impl AuditReport {
    /// No check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Deterministic JSON: fixed key order, reals with 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        let q = |x: &str| serde_json::to_string(x).expect("string encodes");
        s.push_str("{\n");
        let _ = writeln!(s, "  \"schema\": {},", q(&self.schema));
        let _ = writeln!(s, "  \"schema_version\": {},", self.schema_version);
        s.push_str("  \"checks\": [");
        for (i, c) in self.checks.iter().enumerate() {
            s.push_str(if i == 0 { "\n" } else { ",\n" });
            let _ = write!(
                s,
                "    {{\"name\": {}, \"status\": \"{}\", \"value\": {}, \"tolerance\": {}, \"detail\": {}}}",
                q(&c.name),
                c.status.as_str(),
                real(c.value),
                real(c.tolerance),
                q(&c.detail)
            );
        }
        if !self.checks.is_empty() {
            s.push_str("\n  ");
        }
        s.push_str("]\n}\n");
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: AuditReport = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        if r.schema != REPORT_SCHEMA || r.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported report schema {} v{}",
                r.schema, r.schema_version
            )));
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip() {
        let r = AuditReport {
            checks: vec![
                CheckResult {
                    name: "divergence".into(),
                    status: CheckStatus::Pass,
                    value: Some(1.0 / 3.0),
                    tolerance: Some(1e-10),
                    detail: "max \"relative\" divergence".into(),
                },
                CheckResult {
                    name: "uniform_bound".into(),
                    status: CheckStatus::ReportOnly,
                    value: None,
                    tolerance: None,
                    detail: "degenerate".into(),
                },
            ],
            ..Default::default()
        };
        let text = r.to_json();
        assert!(text.contains("3.3333333333333331e-1"));
        let back = AuditReport::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), text);
        assert!(r.passed());
    }

    #[test]
    fn empty_report_and_bad_schema() {
        let r = AuditReport::default();
        assert_eq!(AuditReport::from_json(&r.to_json()).unwrap(), r);
        assert!(AuditReport::from_json("{\"schema\":\"x\",\"schema_version\":1,\"checks\":[]}").is_err());
    }
}
