//! Task execution: dispatch parsed tasks to the invariant operations,
//! optionally force the brute-force oracle paths, and render the report.
//! Execution is single-threaded and in input order, which makes the output
//! bytes a pure function of the input.

use num_bigint::BigInt;

use crate::corpus;
use crate::error::Error;
use crate::galois::{h0, h0_matches_enumeration, h1_oracle, mod_n};
use crate::invariants::{
    inv0_torus_mod_n, inv0_torus_qz, inv1_mod_n, inv1_qz, pic_torus, verify_exactness,
};
use crate::lattice::FinAbGroup;
use crate::multtype::MultTypeGroup;
use crate::problem::{OpKind, ProblemFile, Task};
use crate::report::{render_json, render_text, OracleOutcome, TaskOutcome, TaskResult};

/// Largest underlying group the enumeration oracles will walk.
pub const ENUMERATION_CAP: u64 = 10_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub format: OutputFormat,
    pub oracle: bool,
    pub modulus_override: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            format: OutputFormat::Text,
            oracle: false,
            modulus_override: None,
        }
    }
}

pub struct RunOutcome {
    pub output: String,
    /// Whether any cross-check or exactness verification failed.
    pub failed: bool,
}

fn execute(module: &MultTypeGroup, op: OpKind, modulus: Option<u64>) -> TaskResult {
    let n = modulus.map(BigInt::from);
    let need = |n: &Option<BigInt>| n.clone().expect("modulus presence checked at parse time");
    let result = match op {
        OpKind::Inv1ModN => inv1_mod_n(module, &need(&n)).map(TaskResult::Invariant),
        OpKind::Inv1Qz => inv1_qz(module).map(TaskResult::Invariant),
        OpKind::Inv0TorusModN => inv0_torus_mod_n(module, &need(&n)).map(TaskResult::Invariant),
        OpKind::Inv0TorusQz => inv0_torus_qz(module).map(TaskResult::Invariant),
        OpKind::PicTorus => pic_torus(module).map(TaskResult::Invariant),
        OpKind::VerifyExactness => verify_exactness(module, &need(&n)).map(TaskResult::Exactness),
    };
    result.unwrap_or_else(TaskResult::Failed)
}

fn enumeration_outcome(claim: Option<bool>) -> OracleOutcome {
    match claim {
        Some(true) => OracleOutcome::Pass,
        Some(false) => OracleOutcome::Fail("enumeration disagrees".into()),
        None => OracleOutcome::Skipped("above enumeration bound".into()),
    }
}

fn h1_oracle_outcome(module: &MultTypeGroup, claimed: &FinAbGroup) -> OracleOutcome {
    match h1_oracle(&module.chars) {
        Ok(value) if &value == claimed => OracleOutcome::Pass,
        Ok(value) => OracleOutcome::Fail(format!("full table gives {value}, claimed {claimed}")),
        Err(Error::SizeGuard { size, bound }) => {
            OracleOutcome::Skipped(format!("size {size} above guard {bound}"))
        }
        Err(e) => OracleOutcome::Fail(e.to_string()),
    }
}

/// Independent recomputations for a successful result, forced by the
/// `oracle` subcommand.
fn oracle_checks(
    module: &MultTypeGroup,
    op: OpKind,
    modulus: Option<u64>,
    result: &TaskResult,
) -> Vec<(String, OracleOutcome)> {
    let group_of = |result: &TaskResult| match result {
        TaskResult::Invariant(r) => Some(r.group.clone()),
        _ => None,
    };
    match (op, result) {
        (OpKind::Inv1ModN | OpKind::Inv1Qz, TaskResult::Invariant(_)) => {
            let claimed = h0(&module.chars);
            vec![(
                "fixed_chars_enumeration".into(),
                enumeration_outcome(h0_matches_enumeration(
                    &module.chars,
                    &claimed,
                    ENUMERATION_CAP,
                )),
            )]
        }
        (OpKind::Inv0TorusModN, TaskResult::Invariant(_)) => {
            let n = BigInt::from(modulus.expect("checked at parse time"));
            let reduced = mod_n(&module.chars, &n);
            let claimed = group_of(result).expect("invariant result");
            vec![(
                "fixed_mod_n_enumeration".into(),
                enumeration_outcome(h0_matches_enumeration(&reduced, &claimed, ENUMERATION_CAP)),
            )]
        }
        (OpKind::Inv0TorusQz | OpKind::PicTorus, TaskResult::Invariant(_)) => {
            let claimed = group_of(result).expect("invariant result");
            vec![("h1_full_table".into(), h1_oracle_outcome(module, &claimed))]
        }
        (OpKind::VerifyExactness, TaskResult::Exactness(_)) => {
            let n = BigInt::from(modulus.expect("checked at parse time"));
            let reduced = mod_n(&module.chars, &n);
            let claimed = h0(&reduced);
            vec![(
                "fixed_mod_n_enumeration".into(),
                enumeration_outcome(h0_matches_enumeration(&reduced, &claimed, ENUMERATION_CAP)),
            )]
        }
        _ => Vec::new(),
    }
}

fn run_task(
    index: usize,
    module: &MultTypeGroup,
    task: &Task,
    oracle: bool,
    modulus_override: Option<u64>,
) -> TaskOutcome {
    let modulus = match task.op.needs_modulus() {
        true => modulus_override.or(task.modulus),
        false => None,
    };
    let result = execute(module, task.op, modulus);
    let oracle_results = if oracle {
        oracle_checks(module, task.op, modulus, &result)
    } else {
        Vec::new()
    };
    TaskOutcome {
        index,
        op: task.op.as_str().to_string(),
        label: task.module.clone(),
        modulus,
        result,
        oracle: oracle_results,
    }
}

fn render(outcomes: &[TaskOutcome], format: OutputFormat) -> RunOutcome {
    let failed = outcomes.iter().any(TaskOutcome::hard_failure);
    let output = match format {
        OutputFormat::Text => render_text(outcomes),
        OutputFormat::Json => render_json(outcomes),
    };
    RunOutcome { output, failed }
}

/// Execute the tasks of a problem file in input order.
pub fn run_problem(problem: &ProblemFile, options: &RunOptions) -> RunOutcome {
    let outcomes: Vec<TaskOutcome> = problem
        .tasks
        .iter()
        .enumerate()
        .map(|(i, task)| {
            let module = &problem.modules[&task.module];
            run_task(i, module, task, options.oracle, options.modulus_override)
        })
        .collect();
    render(&outcomes, options.format)
}

/// Moduli every exactness suite runs over.
pub const VERIFY_MODULI: [u64; 6] = [1, 2, 3, 4, 6, 12];

/// Run the exactness suites only: for every module in the file and every
/// modulus of the standard ladder, build a resolution and verify the
/// fixed-point sequence.
pub fn run_verify(problem: &ProblemFile, format: OutputFormat) -> RunOutcome {
    let mut outcomes = Vec::new();
    for (name, module) in &problem.modules {
        for &n in &VERIFY_MODULI {
            let task = Task {
                op: OpKind::VerifyExactness,
                module: name.clone(),
                modulus: Some(n),
            };
            outcomes.push(run_task(outcomes.len(), module, &task, false, None));
        }
    }
    render(&outcomes, format)
}

/// The battery the `corpus` subcommand runs: every shipped group of
/// multiplicative type through the type-one operations and the exactness
/// verifier, and every shipped torus additionally through the type-zero
/// operations and the Picard group.
pub fn corpus_outcomes(oracle: bool) -> Vec<TaskOutcome> {
    let mut outcomes = Vec::new();
    let mut push = |module: &MultTypeGroup, op: OpKind, modulus: Option<u64>, oracle: bool| {
        let task = Task {
            op,
            module: module.display_name().to_string(),
            modulus,
        };
        let index = outcomes.len();
        outcomes.push(run_task(index, module, &task, oracle, None));
    };
    for module in corpus::mult_type_corpus() {
        for n in [2u64, 6, 12] {
            push(&module, OpKind::Inv1ModN, Some(n), oracle);
        }
        push(&module, OpKind::Inv1Qz, None, oracle);
        push(&module, OpKind::VerifyExactness, Some(6), oracle);
        if module.is_torus() {
            for n in [2u64, 3] {
                push(&module, OpKind::Inv0TorusModN, Some(n), oracle);
            }
            push(&module, OpKind::Inv0TorusQz, None, oracle);
            push(&module, OpKind::PicTorus, None, oracle);
        }
    }
    outcomes
}

pub fn run_corpus(format: OutputFormat, oracle: bool) -> RunOutcome {
    render(&corpus_outcomes(oracle), format)
}
