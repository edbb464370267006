//! JSON serialization of verification reports.
//!
//! Schema (version 1):
//!
//! ```json
//! {
//!   "version": 1,
//!   "seed": 42,
//!   "checks": [
//!     {"name": "...", "residual": 0.0, "tolerance": 0.0, "passed": true, "detail": "..."}
//!   ],
//!   "timings": {"stage": 0.001}
//! }
//! ```
//!
//! Output is byte-deterministic for a fixed report: struct fields serialize in
//! order and the timings object is key-sorted. Wall-clock timings are only
//! included on request since they vary run to run.

use fst_core::metrics::VerificationReport;
use serde::Serialize;
use serde_json::{Map, Number, Value};

pub const REPORT_VERSION: u32 = 1;

#[derive(Serialize)]
struct CheckJson<'a> {
    name: &'a str,
    residual: f64,
    tolerance: f64,
    passed: bool,
    detail: &'a str,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    version: u32,
    seed: u64,
    checks: Vec<CheckJson<'a>>,
    timings: Map<String, Value>,
}

fn finite_number(v: f64) -> f64 {
    // JSON has no Inf/NaN; an unmeasurable residual saturates instead so the
    // schema stays numeric (the check is failed either way).
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

/// Renders a report as pretty-printed JSON with a trailing newline.
pub fn report_to_json(report: &VerificationReport, seed: u64, include_timings: bool) -> String {
    let checks = report
        .entries()
        .iter()
        .map(|e| CheckJson {
            name: e.name,
            residual: finite_number(e.residual),
            tolerance: e.tolerance,
            passed: e.passed,
            detail: &e.detail,
        })
        .collect();

    let mut timings = Map::new();
    if include_timings {
        for t in report.timings() {
            let mut key = t.stage.clone();
            let mut n = 1;
            while timings.contains_key(&key) {
                n += 1;
                key = format!("{}#{n}", t.stage);
            }
            let number = Number::from_f64(finite_number(t.seconds))
                .unwrap_or_else(|| Number::from(0));
            timings.insert(key, Value::Number(number));
        }
    }

    let json = ReportJson {
        version: REPORT_VERSION,
        seed,
        checks,
        timings,
    };
    let mut out = serde_json::to_string_pretty(&json).expect("report serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use fst_core::metrics::timing_probe;

    #[test]
    fn deterministic_without_timings() {
        let mut report = VerificationReport::new();
        report.push_check("alpha", 1e-12, 1e-9, "fine");
        timing_probe(&mut report, "stage", || ());
        let a = report_to_json(&report, 7, false);
        let b = report_to_json(&report, 7, false);
        assert_eq!(a, b);
        assert!(a.contains("\"version\": 1"));
        assert!(!a.contains("stage"));
    }

    #[test]
    fn repeated_stages_get_distinct_keys() {
        let mut report = VerificationReport::new();
        timing_probe(&mut report, "fft", || ());
        timing_probe(&mut report, "fft", || ());
        let json = report_to_json(&report, 0, true);
        assert!(json.contains("\"fft\""));
        assert!(json.contains("\"fft#2\""));
    }

    #[test]
    fn infinite_residual_serializes_as_a_number() {
        let mut report = VerificationReport::new();
        report.push_check("broken", f64::INFINITY, 1e-9, "");
        let json = report_to_json(&report, 0, false);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(value["checks"][0]["residual"].is_f64());
    }
}
