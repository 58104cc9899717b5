//! Report assembly: one block per task, rendered as stable line-oriented
//! text or as JSON mirroring the report fields. Identical inputs must
//! produce byte-identical output, so everything here iterates in fixed
//! order and formats through deterministic paths only.

use serde_json::json;

use crate::error::Error;
use crate::invariants::{ExactnessRecord, InvariantReport};

#[derive(Clone, Debug)]
pub enum TaskResult {
    Invariant(InvariantReport),
    Exactness(ExactnessRecord),
    Failed(Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Pass,
    Fail(String),
    Skipped(String),
}

#[derive(Clone, Debug)]
pub struct TaskOutcome {
    pub index: usize,
    pub op: String,
    pub label: String,
    pub modulus: Option<u64>,
    pub result: TaskResult,
    pub oracle: Vec<(String, OracleOutcome)>,
}

impl TaskOutcome {
    /// Whether this outcome must flip the process exit status: failed
    /// cross-checks and exactness failures do, ordinary task errors do not.
    pub fn hard_failure(&self) -> bool {
        let failed_result = matches!(
            &self.result,
            TaskResult::Failed(Error::CrossCheckFailure { .. })
                | TaskResult::Failed(Error::ExactnessFailure(_))
        );
        let failed_oracle = self
            .oracle
            .iter()
            .any(|(_, o)| matches!(o, OracleOutcome::Fail(_)));
        failed_result || failed_oracle
    }

    pub fn is_error(&self) -> bool {
        matches!(self.result, TaskResult::Failed(_))
    }
}

fn header(outcome: &TaskOutcome) -> String {
    match outcome.modulus {
        Some(n) => format!(
            "== task {}: {} {} n={}",
            outcome.index, outcome.op, outcome.label, n
        ),
        None => format!("== task {}: {} {}", outcome.index, outcome.op, outcome.label),
    }
}

pub fn render_text(outcomes: &[TaskOutcome]) -> String {
    let mut lines: Vec<String> = Vec::new();
    for outcome in outcomes {
        lines.push(header(outcome));
        match &outcome.result {
            TaskResult::Invariant(report) => {
                lines.push(format!("theorem: {}", report.theorem));
                if let Some(rank) = report.divisible_rank {
                    lines.push(format!("divisible_rank: {rank}"));
                }
                lines.push(format!("group: {}", report.group));
                for (name, value) in &report.witnesses {
                    lines.push(format!("witness {name}: {value}"));
                }
                for check in &report.checks {
                    lines.push(format!("check {check}: PASS"));
                }
            }
            TaskResult::Exactness(record) => {
                lines.push(format!("group torsion_fixed: {}", record.torsion_fixed));
                lines.push(format!("group kernel_fixed: {}", record.kernel_fixed));
                lines.push(format!(
                    "group permutation_fixed: {}",
                    record.permutation_fixed
                ));
                lines.push(format!(
                    "check injective: {}",
                    if record.injective { "PASS" } else { "FAIL" }
                ));
                lines.push(format!(
                    "check exact_at_kernel: {}",
                    if record.exact_at_kernel { "PASS" } else { "FAIL" }
                ));
            }
            TaskResult::Failed(error) => {
                lines.push(format!("error: {error}"));
            }
        }
        for (name, oracle) in &outcome.oracle {
            let rendered = match oracle {
                OracleOutcome::Pass => "PASS".to_string(),
                OracleOutcome::Fail(detail) => format!("FAIL ({detail})"),
                OracleOutcome::Skipped(reason) => format!("SKIPPED ({reason})"),
            };
            lines.push(format!("oracle {name}: {rendered}"));
        }
        lines.push(String::new());
    }
    let ok = outcomes.iter().filter(|o| !o.is_error()).count();
    lines.push(format!(
        "summary: {} tasks, {} ok, {} failed",
        outcomes.len(),
        ok,
        outcomes.len() - ok
    ));
    lines.push(String::new());
    lines.join("\n")
}

fn json_modulus(m: &Option<num_bigint::BigInt>) -> serde_json::Value {
    match m {
        None => serde_json::Value::Null,
        Some(n) => match i64::try_from(n.clone()) {
            Ok(v) => json!(v),
            Err(_) => json!(n.to_string()),
        },
    }
}

pub fn render_json(outcomes: &[TaskOutcome]) -> String {
    let tasks: Vec<serde_json::Value> = outcomes
        .iter()
        .map(|outcome| {
            let mut obj = serde_json::Map::new();
            obj.insert("task".into(), json!(outcome.index));
            obj.insert("op".into(), json!(outcome.op));
            obj.insert("module".into(), json!(outcome.label));
            obj.insert("modulus".into(), json!(outcome.modulus));
            match &outcome.result {
                TaskResult::Invariant(report) => {
                    let witnesses: Vec<serde_json::Value> = report
                        .witnesses
                        .iter()
                        .map(|(n, g)| json!([n, g.to_string()]))
                        .collect();
                    obj.insert(
                        "report".into(),
                        json!({
                            "theorem": report.theorem.as_str(),
                            "group": report.group.to_string(),
                            "modulus": json_modulus(&report.modulus),
                            "divisible_rank": report.divisible_rank,
                            "witnesses": witnesses,
                            "checks": report.checks,
                        }),
                    );
                }
                TaskResult::Exactness(record) => {
                    obj.insert(
                        "record".into(),
                        json!({
                            "torsion_fixed": record.torsion_fixed.to_string(),
                            "kernel_fixed": record.kernel_fixed.to_string(),
                            "permutation_fixed": record.permutation_fixed.to_string(),
                            "injective": record.injective,
                            "exact_at_kernel": record.exact_at_kernel,
                        }),
                    );
                }
                TaskResult::Failed(error) => {
                    obj.insert("error".into(), json!(error.to_string()));
                }
            }
            if !outcome.oracle.is_empty() {
                let oracle: Vec<serde_json::Value> = outcome
                    .oracle
                    .iter()
                    .map(|(name, o)| {
                        let (status, detail) = match o {
                            OracleOutcome::Pass => ("PASS", serde_json::Value::Null),
                            OracleOutcome::Fail(d) => ("FAIL", json!(d)),
                            OracleOutcome::Skipped(r) => ("SKIPPED", json!(r)),
                        };
                        json!({"name": name, "status": status, "detail": detail})
                    })
                    .collect();
                obj.insert("oracle".into(), json!(oracle));
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    let ok = outcomes.iter().filter(|o| !o.is_error()).count();
    let value = json!({
        "tasks": tasks,
        "summary": {"tasks": outcomes.len(), "ok": ok, "failed": outcomes.len() - ok},
        "all_checks_passed": !outcomes.iter().any(TaskOutcome::hard_failure),
    });
    let mut rendered = serde_json::to_string_pretty(&value).expect("report serializes");
    rendered.push('\n');
    rendered
}
