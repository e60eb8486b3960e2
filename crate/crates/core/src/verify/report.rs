use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Which way the checked inequality points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs ≤ rhs`
    Le,
    /// `lhs ≥ rhs`
    Ge,
    /// `lhs = rhs`
    Eq,
}

impl Relation {
    /// Signed slack: non-negative when the relation holds exactly.
    pub fn slack(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Relation::Le => rhs - lhs,
            Relation::Ge => lhs - rhs,
            Relation::Eq => -(lhs - rhs).abs(),
        }
    }
}

/// A named inequality with both sides, its slack and a pass flag that can be
/// recomputed from `slack ≥ −tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub lhs: f64,
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub rhs: f64,
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub slack: f64,
    pub tolerance: f64,
    pub stderr: f64,
    pub pass: bool,
    pub relation: Relation,
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, relation: Relation, lhs: f64, rhs: f64, tolerance: f64, stderr: f64) -> Self {
        let slack = relation.slack(lhs, rhs);
        let tolerance = tolerance.max(0.0);
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack,
            tolerance,
            stderr: stderr.max(0.0),
            pass: slack >= -tolerance,
            relation,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.metadata.insert(key.to_owned(), v);
        self
    }

    /// Recomputes the pass flag from the numeric fields.
    pub fn recomputed_pass(&self) -> bool {
        self.relation.slack(self.lhs, self.rhs) >= -self.tolerance
    }

    pub fn csv_header() -> &'static str {
        "name,lhs,rhs,slack,stderr,pass"
    }

    pub fn csv_row(&self) -> String {
        let name = if self.name.contains([',', '"']) {
            format!("\"{}\"", self.name.replace('"', "\"\""))
        } else {
            self.name.clone()
        };
        format!("{name},{},{},{},{},{}", self.lhs, self.rhs, self.slack, self.stderr, self.pass)
    }
}

/// CSV flattening of a batch of reports, header included.
pub fn to_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from(VerificationReport::csv_header());
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_slack() {
        let r = VerificationReport::new("x", Relation::Le, 1.0, 0.9, 0.05, 0.0);
        assert!(!r.pass);
        assert!((r.slack + 0.1).abs() < 1e-15);
        let r = VerificationReport::new("x", Relation::Le, 1.0, 0.9, 0.2, 0.0);
        assert!(r.pass && r.recomputed_pass());
        let r = VerificationReport::new("x", Relation::Ge, 1.0, 0.9, 0.0, 0.0);
        assert!(r.pass);
        let r = VerificationReport::new("x", Relation::Eq, 1.0, 1.0 + 1e-9, 1e-8, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn csv_layout() {
        let r = VerificationReport::new("a,b", Relation::Le, 1.0, 2.0, 0.0, 0.5);
        let csv = to_csv(&[r]);
        assert_eq!(csv, "name,lhs,rhs,slack,stderr,pass\n\"a,b\",1,2,1,0.5,true\n");
    }

    #[test]
    fn json_keeps_non_finite_sides() {
        let r = VerificationReport::new("inf", Relation::Ge, f64::NEG_INFINITY, 0.0, 0.0, 0.0);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains(r#""lhs":"-inf""#));
        let back: VerificationReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back.lhs, f64::NEG_INFINITY);
        assert!(!back.pass);
    }
}
