use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::ExperimentConfig;
use crate::bounds::BoundConstants;

/// A named pass/fail decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// One CSV row: `x, estimate, ci_lo, ci_hi, bound, verdict`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub x: f64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub bound: Option<f64>,
    pub verdict: String,
}

/// Fields that legitimately differ between reruns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub timestamp: String,
    pub wall_clock_ms: u64,
    pub threads: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub replicas: u64,
    /// Constants behind every bound value in the report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<BoundConstants>,
    pub tolerances: BTreeMap<String, f64>,
    pub table: Vec<Row>,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_info: Option<RunInfo>,
}

impl Report {
    pub(crate) fn new(config: &ExperimentConfig, replicas: u64) -> Self {
        Report {
            experiment: config.experiment.name().to_string(),
            config: config.clone(),
            replicas,
            constants: None,
            tolerances: BTreeMap::new(),
            table: Vec::new(),
            results: Value::Null,
            verdicts: Vec::new(),
            pass: true,
            run_info: None,
        }
    }

    pub(crate) fn tolerance(&mut self, name: &str, v: f64) {
        self.tolerances.insert(name.to_string(), v);
    }

    pub(crate) fn verdict(&mut self, v: Verdict) {
        self.pass &= v.pass;
        self.verdicts.push(v);
    }

    /// Pretty JSON with keys in sorted order.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serialises");
        serde_json::to_string_pretty(&v).expect("value serialises")
    }

    /// Canonical JSON without `run_info`; identical configs give identical
    /// bytes.
    pub fn payload_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serialises");
        if let Value::Object(m) = &mut v {
            m.remove("run_info");
        }
        serde_json::to_string(&v).expect("value serialises")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,estimate,ci_lo,ci_hi,bound,verdict\n");
        for r in &self.table {
            let bound = r.bound.map(|b| format!("{b:e}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e},{},{}",
                r.x, r.estimate, r.ci_lo, r.ci_hi, bound, r.verdict
            );
        }
        out
    }
}
