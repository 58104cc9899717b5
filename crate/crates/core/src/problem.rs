//! Problem-file schema: JSON with top-level keys `group`, `modules`, `tasks`.
//!
//! Matrices are row-major arrays of arrays of integers (plain JSON numbers,
//! or decimal strings for values outside the 64-bit range). Groups come
//! either as a full multiplication table with an explicit generator list, or
//! as permutation generators from which the table is derived by closure;
//! both paths run through the same validation.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::galois::{FiniteGroup, GammaLattice, GammaModule};
use crate::lattice::IntMatrix;
use crate::multtype::MultTypeGroup;

/// The operations a task may request.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OpKind {
    Inv1ModN,
    Inv1Qz,
    Inv0TorusModN,
    Inv0TorusQz,
    PicTorus,
    VerifyExactness,
}

impl OpKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OpKind::Inv1ModN => "inv1_mod_n",
            OpKind::Inv1Qz => "inv1_qz",
            OpKind::Inv0TorusModN => "inv0_torus_mod_n",
            OpKind::Inv0TorusQz => "inv0_torus_qz",
            OpKind::PicTorus => "pic_torus",
            OpKind::VerifyExactness => "verify_exactness",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "inv1_mod_n" => OpKind::Inv1ModN,
            "inv1_qz" => OpKind::Inv1Qz,
            "inv0_torus_mod_n" => OpKind::Inv0TorusModN,
            "inv0_torus_qz" => OpKind::Inv0TorusQz,
            "pic_torus" => OpKind::PicTorus,
            "verify_exactness" => OpKind::VerifyExactness,
            other => {
                return Err(Error::Schema(format!(
                    "unknown operation `{other}`; expected one of inv1_mod_n, inv1_qz, \
                     inv0_torus_mod_n, inv0_torus_qz, pic_torus, verify_exactness"
                )))
            }
        })
    }

    pub fn needs_modulus(self) -> bool {
        matches!(
            self,
            OpKind::Inv1ModN | OpKind::Inv0TorusModN | OpKind::VerifyExactness
        )
    }
}

impl std::fmt::Display for OpKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct Task {
    pub op: OpKind,
    pub module: String,
    pub modulus: Option<u64>,
}

/// A fully validated problem file.
#[derive(Debug)]
pub struct ProblemFile {
    pub group: Arc<FiniteGroup>,
    pub group_name: Option<String>,
    pub modules: BTreeMap<String, MultTypeGroup>,
    pub tasks: Vec<Task>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    group: RawGroup,
    #[serde(default)]
    modules: BTreeMap<String, RawModule>,
    #[serde(default)]
    tasks: Vec<RawTask>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    #[serde(default)]
    name: Option<String>,
    order: usize,
    #[serde(default)]
    generators: Option<Vec<usize>>,
    #[serde(default)]
    mul_table: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    permutation_generators: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    element_names: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModule {
    rank: usize,
    #[serde(default)]
    generator_actions: Vec<RawMatrix>,
    #[serde(default)]
    relations: Option<RawMatrix>,
}

type RawMatrix = Vec<Vec<RawInt>>;

#[derive(Deserialize, Serialize)]
#[serde(untagged)]
enum RawInt {
    Small(i64),
    Big(String),
}

impl RawInt {
    fn to_bigint(&self) -> Result<BigInt> {
        match self {
            RawInt::Small(v) => Ok(BigInt::from(*v)),
            RawInt::Big(s) => BigInt::from_str(s)
                .map_err(|_| Error::Validation(format!("`{s}` is not an integer"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    op: String,
    module: String,
    #[serde(default)]
    modulus: Option<u64>,
}

fn parse_matrix(raw: &RawMatrix, rows: usize, cols: Option<usize>, what: &str) -> Result<IntMatrix> {
    if raw.len() != rows {
        return Err(Error::Validation(format!(
            "{what}: expected {rows} rows, got {}",
            raw.len()
        )));
    }
    let width = cols.or_else(|| raw.first().map(|r| r.len())).unwrap_or(0);
    let mut entries = Vec::with_capacity(rows * width);
    for row in raw {
        if row.len() != width {
            return Err(Error::Validation(format!(
                "{what}: ragged rows ({} vs {width})",
                row.len()
            )));
        }
        for e in row {
            entries.push(e.to_bigint()?);
        }
    }
    IntMatrix::new(rows, width, entries)
}

/// Parse and fully validate a problem file. All group axioms, action
/// relations and module invariants are checked here, at parse time.
pub fn parse_problem(bytes: &[u8]) -> Result<ProblemFile> {
    let value: serde_json::Value = serde_json::from_slice(bytes)
        .map_err(|e| Error::Parse(e.to_string()))?;
    let raw: RawProblem =
        serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;

    let group = build_group(&raw.group)?;
    if group.order() != raw.group.order {
        return Err(Error::Validation(format!(
            "declared order {} but the group has order {}",
            raw.group.order,
            group.order()
        )));
    }
    let group = Arc::new(group);

    let mut modules = BTreeMap::new();
    for (name, raw_module) in &raw.modules {
        let module = build_module(&group, raw_module)
            .map_err(|e| prefix_error(&format!("module `{name}`"), e))?;
        modules.insert(
            name.clone(),
            MultTypeGroup::new(module, Some(name.clone())),
        );
    }

    let mut tasks = Vec::new();
    for (i, raw_task) in raw.tasks.iter().enumerate() {
        let op = OpKind::parse(&raw_task.op)?;
        if !modules.contains_key(&raw_task.module) {
            return Err(Error::Validation(format!(
                "task {i}: module `{}` is not declared",
                raw_task.module
            )));
        }
        if op.needs_modulus() && raw_task.modulus.is_none() {
            return Err(Error::Schema(format!(
                "task {i}: operation {op} needs a modulus"
            )));
        }
        if !op.needs_modulus() && raw_task.modulus.is_some() {
            return Err(Error::Schema(format!(
                "task {i}: operation {op} does not take a modulus"
            )));
        }
        if let Some(0) = raw_task.modulus {
            return Err(Error::Validation(format!("task {i}: modulus must be positive")));
        }
        tasks.push(Task {
            op,
            module: raw_task.module.clone(),
            modulus: raw_task.modulus,
        });
    }

    Ok(ProblemFile {
        group,
        group_name: raw.group.name.clone(),
        modules,
        tasks,
    })
}

fn prefix_error(prefix: &str, e: Error) -> Error {
    match e {
        Error::Validation(msg) => Error::Validation(format!("{prefix}: {msg}")),
        Error::Schema(msg) => Error::Schema(format!("{prefix}: {msg}")),
        other => other,
    }
}

fn build_group(raw: &RawGroup) -> Result<FiniteGroup> {
    match (&raw.mul_table, &raw.permutation_generators) {
        (Some(_), Some(_)) => Err(Error::Schema(
            "give either `mul_table` or `permutation_generators`, not both".into(),
        )),
        (None, None) => Err(Error::Schema(
            "a group needs `mul_table` or `permutation_generators`".into(),
        )),
        (Some(table), None) => {
            let generators = raw.generators.clone().ok_or_else(|| {
                Error::Schema("`generators` is required with `mul_table`".into())
            })?;
            FiniteGroup::from_table(table, generators, raw.element_names.clone())
        }
        (None, Some(perms)) => {
            if raw.generators.is_some() {
                return Err(Error::Schema(
                    "`generators` is derived automatically from `permutation_generators`".into(),
                ));
            }
            if raw.element_names.is_some() {
                return Err(Error::Schema(
                    "`element_names` requires the `mul_table` form".into(),
                ));
            }
            FiniteGroup::from_permutations(perms)
        }
    }
}

fn build_module(group: &Arc<FiniteGroup>, raw: &RawModule) -> Result<GammaModule> {
    let rank = raw.rank;
    if raw.generator_actions.len() != group.generators().len() {
        return Err(Error::Validation(format!(
            "{} generator actions for {} group generators",
            raw.generator_actions.len(),
            group.generators().len()
        )));
    }
    let lattice = if group.generators().is_empty() {
        GammaLattice::trivial(group.clone(), rank)
    } else {
        let actions: Vec<IntMatrix> = raw
            .generator_actions
            .iter()
            .enumerate()
            .map(|(i, m)| parse_matrix(m, rank, Some(rank), &format!("generator action {i}")))
            .collect::<Result<_>>()?;
        GammaLattice::from_generator_actions(group.clone(), &actions)?
    };
    let relations = match &raw.relations {
        Some(r) => parse_matrix(r, rank, None, "relations")?,
        None => IntMatrix::zeros(rank, 0),
    };
    GammaModule::new(lattice, relations)
}

fn matrix_to_json(m: &IntMatrix) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = (0..m.rows())
        .map(|i| {
            let row: Vec<serde_json::Value> = (0..m.cols())
                .map(|j| {
                    let e = m.get(i, j);
                    match i64::try_from(e.clone()) {
                        Ok(v) => json!(v),
                        Err(_) => json!(e.to_string()),
                    }
                })
                .collect();
            json!(row)
        })
        .collect();
    json!(rows)
}

/// Serialize a group and a set of named modules back into the problem
/// schema; inverse to `parse_problem` up to equivalence of modules.
pub fn problem_to_json(
    group: &Arc<FiniteGroup>,
    group_name: Option<&str>,
    modules: &[(String, &GammaModule)],
    tasks: &[Task],
) -> serde_json::Value {
    let mut group_json = serde_json::Map::new();
    if let Some(name) = group_name {
        group_json.insert("name".into(), json!(name));
    }
    group_json.insert("order".into(), json!(group.order()));
    group_json.insert("generators".into(), json!(group.generators()));
    group_json.insert("mul_table".into(), json!(group.multiplication_table()));
    if let Some(names) = group.element_names() {
        group_json.insert("element_names".into(), json!(names));
    }

    let mut modules_json = serde_json::Map::new();
    for (name, module) in modules {
        let mut m = serde_json::Map::new();
        m.insert("rank".into(), json!(module.rank()));
        let actions: Vec<serde_json::Value> = group
            .generators()
            .iter()
            .map(|&g| matrix_to_json(module.ambient().act(g)))
            .collect();
        m.insert("generator_actions".into(), json!(actions));
        if module.relations().cols() > 0 {
            m.insert("relations".into(), matrix_to_json(module.relations()));
        }
        modules_json.insert(name.clone(), serde_json::Value::Object(m));
    }

    let tasks_json: Vec<serde_json::Value> = tasks
        .iter()
        .map(|t| {
            let mut m = serde_json::Map::new();
            m.insert("op".into(), json!(t.op.as_str()));
            m.insert("module".into(), json!(t.module));
            if let Some(n) = t.modulus {
                m.insert("modulus".into(), json!(n));
            }
            serde_json::Value::Object(m)
        })
        .collect();

    json!({
        "group": serde_json::Value::Object(group_json),
        "modules": serde_json::Value::Object(modules_json),
        "tasks": tasks_json,
    })
}
