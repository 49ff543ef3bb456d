//! Check results and the JSON residual report.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

/// Outcome of a single check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    Informational,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Informational => "informational",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Groups of checks selectable with `--checks`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Kummer,
    Reduction,
    Profile,
    Pde,
    Fushchich,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Kummer, Family::Reduction, Family::Profile, Family::Pde, Family::Fushchich];

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Kummer => "kummer",
            Family::Reduction => "reduction",
            Family::Profile => "profile",
            Family::Pde => "pde",
            Family::Fushchich => "fushchich",
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown check family '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub id: String,
    pub family: Family,
    pub sup_norm: Option<f64>,
    pub l2_norm: Option<f64>,
    /// Fitted convergence order, finite-difference checks only.
    pub order: Option<f64>,
    pub verdict: Verdict,
    /// Whether a failure makes the whole run fail.
    pub gating: bool,
    pub notes: String,
}

impl CheckResult {
    pub fn new(id: impl Into<String>, family: Family, verdict: Verdict, gating: bool) -> Self {
        CheckResult {
            id: id.into(),
            family,
            sup_norm: None,
            l2_norm: None,
            order: None,
            verdict,
            gating,
            notes: String::new(),
        }
    }

    pub fn norms(mut self, sup: f64, l2: f64) -> Self {
        self.sup_norm = Some(sup);
        self.l2_norm = Some(l2);
        self
    }

    pub fn order(mut self, q: Option<f64>) -> Self {
        self.order = q;
        self
    }

    pub fn notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    /// A check whose computation itself raised an error.
    pub fn errored(id: impl Into<String>, family: Family, gating: bool, err: &Error) -> Self {
        let verdict = if gating { Verdict::Fail } else { Verdict::Inconclusive };
        CheckResult::new(id, family, verdict, gating).notes(format!("error: {err}"))
    }

    pub fn failed(&self) -> bool {
        self.gating && self.verdict == Verdict::Fail
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("id".into(), json!(self.id));
        m.insert("family".into(), json!(self.family.as_str()));
        m.insert("sup_norm".into(), self.sup_norm.map_or(Value::Null, |v| json!(format_norm(v))));
        m.insert("l2_norm".into(), self.l2_norm.map_or(Value::Null, |v| json!(format_norm(v))));
        if let Some(q) = self.order {
            m.insert("order".into(), json!(format_norm(q)));
        }
        m.insert("verdict".into(), json!(self.verdict.as_str()));
        m.insert("gating".into(), json!(self.gating));
        m.insert("notes".into(), json!(self.notes));
        Value::Object(m)
    }
}

/// Decimal string with ten significant digits; `inf`/`nan` spelled out.
pub fn format_norm(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.9e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportMeta {
    pub version: String,
    pub timestamp: String,
    pub precision_digits: u32,
    pub assumptions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub params: Value,
    pub grid: Value,
    pub checks: Vec<CheckResult>,
    pub meta: ReportMeta,
}

impl ResidualReport {
    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.checks.iter().map(|c| c.id.as_str()).collect()
    }

    /// True when some gating check failed.
    pub fn has_failures(&self) -> bool {
        self.checks.iter().any(CheckResult::failed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "params": self.params,
            "grid": self.grid,
            "checks": self.checks.iter().map(CheckResult::to_json).collect::<Vec<_>>(),
            "meta": {
                "version": self.meta.version,
                "timestamp": self.meta.timestamp,
                "precision_digits": self.meta.precision_digits,
                "assumptions": self.meta.assumptions,
            },
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let r = ResidualReport {
            params: json!({"nu": "1"}),
            grid: json!({}),
            checks: vec![
                CheckResult::new("a", Family::Kummer, Verdict::Pass, true).norms(1e-40, 2e-41),
                CheckResult::new("b", Family::Pde, Verdict::Informational, false).order(Some(2.01)),
            ],
            meta: ReportMeta {
                version: "0".into(),
                timestamp: "t".into(),
                precision_digits: 40,
                assumptions: vec![],
            },
        };
        let v = r.to_json();
        assert_eq!(v["checks"][0]["sup_norm"], "1.000000000e-40");
        assert!(v["checks"][0].get("order").is_none());
        assert_eq!(v["checks"][1]["order"], "2.010000000e0");
        assert_eq!(v["checks"][1]["sup_norm"], Value::Null);
        assert!(!r.has_failures());
        for key in ["params", "grid", "checks", "meta"] {
            assert!(v.get(key).is_some());
        }
    }

    #[test]
    fn gating_failures_only() {
        let mut c = CheckResult::new("x", Family::Pde, Verdict::Fail, false);
        assert!(!c.failed());
        c.gating = true;
        assert!(c.failed());
        assert_eq!("pde".parse::<Family>().unwrap(), Family::Pde);
        assert!("nope".parse::<Family>().is_err());
    }
}
