use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::Scenario;

pub const SCHEMA: &str = "zcycles.report/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub citation: String,
    pub status: Status,
    pub details: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, citation: &str) -> Self {
        CheckRecord {
            id: id.into(),
            citation: citation.to_string(),
            status: Status::Pass,
            details: Map::new(),
            wall_ms: None,
        }
    }

    pub fn detail(mut self, key: &str, value: impl Serialize) -> Self {
        self.details.insert(
            key.to_string(),
            serde_json::to_value(value).expect("detail serializes"),
        );
        self
    }

    /// Fails the check unless `ok`; failures accumulate.
    pub fn require(mut self, ok: bool) -> Self {
        if !ok {
            self.status = Status::Fail;
        }
        self
    }

    pub fn skip(mut self, reason: &str) -> Self {
        self.status = Status::Skip;
        self.detail("reason", reason)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelInfo {
    pub kind: String,
    pub universe: String,
    pub size: usize,
    pub levels: Vec<LevelInfo>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelInfo {
    pub level: u64,
    pub points: usize,
    pub group: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub scenario: Scenario,
    pub model: ModelInfo,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(scenario: Scenario, model: ModelInfo, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let mut summary = Summary {
            total: checks.len(),
            ..Summary::default()
        };
        for c in &checks {
            match c.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Skip => summary.skip += 1,
            }
        }
        Report {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            scenario,
            model,
            checks,
            summary,
        }
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "scenario {} (seed {:#x}, r_max {}, n {})",
            self.scenario.name, self.scenario.seed, self.scenario.r_max, self.scenario.n
        );
        let _ = writeln!(
            out,
            "model {} {} with {} points",
            self.model.kind, self.model.universe, self.model.size
        );
        for c in &self.checks {
            let _ = write!(out, "{} {:<32} {}", c.status.label(), c.id, c.citation);
            if let Some(ms) = c.wall_ms {
                let _ = write!(out, " [{ms} ms]");
            }
            out.push('\n');
            if c.status != Status::Pass {
                for (k, v) in &c.details {
                    let _ = writeln!(out, "     {k}: {v}");
                }
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} checks: {} passed, {} failed, {} skipped",
            s.total, s.pass, s.fail, s.skip
        );
        out
    }
}
