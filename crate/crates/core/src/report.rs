//! Verification reports.
//!
//! Every check produces a [`Report`]: a named verdict, the first
//! counterexample in canonical input order when one exists, and the number of
//! instances examined. Reports serialize to stable JSON.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub check: String,
    pub holds: bool,
    pub counterexample: Option<Value>,
    pub pairs_checked: u64,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "is_zero")]
    pub skipped: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn is_zero(v: &u64) -> bool {
    *v == 0
}

impl Report {
    pub fn pass(check: impl Into<String>, pairs_checked: u64) -> Self {
        Report {
            check: check.into(),
            holds: true,
            counterexample: None,
            pairs_checked,
            seed: None,
            skipped: 0,
            notes: Vec::new(),
        }
    }

    pub fn fail(check: impl Into<String>, pairs_checked: u64, counterexample: Value) -> Self {
        Report {
            check: check.into(),
            holds: false,
            counterexample: Some(counterexample),
            pairs_checked,
            seed: None,
            skipped: 0,
            notes: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_skipped(mut self, skipped: u64) -> Self {
        self.skipped = skipped;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Folds sub-reports into one verdict named `check`; keeps the first failing
/// sub-report as the counterexample.
pub fn combine(check: impl Into<String>, reports: &[Report]) -> Report {
    let pairs = reports.iter().map(|r| r.pairs_checked).sum();
    let skipped = reports.iter().map(|r| r.skipped).sum();
    let seed = reports.iter().find_map(|r| r.seed);
    match reports.iter().find(|r| !r.holds) {
        None => Report::pass(check, pairs).with_seed(seed).with_skipped(skipped),
        Some(bad) => Report::fail(
            check,
            pairs,
            serde_json::json!({
                "failed_check": bad.check,
                "counterexample": bad.counterexample,
            }),
        )
        .with_seed(seed)
        .with_skipped(skipped),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combine_keeps_first_failure() {
        let a = Report::pass("a", 3);
        let b = Report::fail("b", 1, serde_json::json!({"u": 1}));
        let c = Report::fail("c", 1, serde_json::json!({"u": 2}));
        let all = combine("all", &[a, b, c]);
        assert!(!all.holds);
        assert_eq!(all.pairs_checked, 5);
        assert_eq!(all.counterexample.unwrap()["failed_check"], "b");
    }

    #[test]
    fn json_shape() {
        let r = Report::pass("x", 10).with_seed(Some(42));
        let js = serde_json::to_value(&r).unwrap();
        assert_eq!(js["check"], "x");
        assert_eq!(js["holds"], true);
        assert_eq!(js["counterexample"], serde_json::Value::Null);
        assert_eq!(js["pairs_checked"], 10);
        assert_eq!(js["seed"], 42);
        // skipped / notes are omitted when empty
        assert!(js.get("skipped").is_none());
        assert!(js.get("notes").is_none());
    }
}
