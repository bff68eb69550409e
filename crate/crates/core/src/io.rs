//! File formats: instance and result JSON, CSV tables.
//!
//! Instance files store items inside their group, so a malformed partition
//! cannot be written down:
//!
//! ```json
//! { "schema": "gmkp/1", "capacities": [10, 10],
//!   "groups": [ { "reward": 12, "items": [6, 6] } ], "meta": {} }
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{format_rational, exceeded_ratio, Instance, NormalizationReport};
use crate::oracle::ExactSolution;
use crate::pipeline::SolveResult;

pub const INSTANCE_SCHEMA: &str = "gmkp/1";
pub const RESULT_SCHEMA: &str = "gmkp-result/1";
pub const EXACT_SCHEMA: &str = "gmkp-exact/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub reward: u64,
    pub items: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceRecord {
    pub schema: String,
    pub capacities: Vec<u64>,
    pub groups: Vec<GroupRecord>,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

impl From<&Instance> for InstanceRecord {
    fn from(inst: &Instance) -> Self {
        InstanceRecord {
            schema: INSTANCE_SCHEMA.into(),
            capacities: inst.capacities.clone(),
            groups: inst
                .groups
                .iter()
                .zip(&inst.rewards)
                .map(|(g, &reward)| GroupRecord {
                    reward,
                    items: g.iter().map(|&j| inst.item_weights[j]).collect(),
                })
                .collect(),
            meta: inst.meta.clone(),
        }
    }
}

impl InstanceRecord {
    /// Items are numbered group by group, in file order.
    pub fn into_instance(self) -> Result<Instance> {
        if self.schema != INSTANCE_SCHEMA {
            return Err(Error::InvalidArgument(format!(
                "unsupported instance schema {:?}, expected {INSTANCE_SCHEMA:?}",
                self.schema
            )));
        }
        let mut inst = Instance::from_groups(
            self.capacities,
            self.groups.into_iter().map(|g| (g.reward, g.items)).collect(),
        );
        inst.meta = self.meta;
        Ok(inst)
    }
}

pub fn instance_to_json(instance: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceRecord::from(instance)).expect("instance serializes");
    s.push('\n');
    s
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    serde_json::from_str::<InstanceRecord>(text)?.into_instance()
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let record: InstanceRecord = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.into(),
        message: e.to_string(),
    })?;
    record.into_instance().map_err(|e| Error::Parse {
        path: path.into(),
        message: e.to_string(),
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_instance(path: &Path, instance: &Instance) -> Result<()> {
    write_text(path, &instance_to_json(instance))
}

/// Items as parallel arrays: group, position inside the group, knapsack.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentRecord {
    pub group: Vec<usize>,
    pub item: Vec<usize>,
    pub knapsack: Vec<usize>,
}

fn assignment_record(instance: &Instance, placement: &[Option<usize>]) -> AssignmentRecord {
    let mut rec = AssignmentRecord {
        group: Vec::new(),
        item: Vec::new(),
        knapsack: Vec::new(),
    };
    for (l, g) in instance.groups.iter().enumerate() {
        for (pos, &j) in g.iter().enumerate() {
            if let Some(i) = placement[j] {
                rec.group.push(l);
                rec.item.push(pos);
                rec.knapsack.push(i);
            }
        }
    }
    rec
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingsRecord {
    pub selection_ms: f64,
    pub assignment_ms: f64,
    pub swap_opt_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationRecord {
    pub removed_knapsacks: Vec<usize>,
    pub removed_groups: Vec<usize>,
}

impl From<&NormalizationReport> for NormalizationRecord {
    fn from(r: &NormalizationReport) -> Self {
        NormalizationRecord {
            removed_knapsacks: r.removed_knapsacks.clone(),
            removed_groups: r.removed_groups.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema: String,
    pub algorithm: String,
    pub total_capacity: u64,
    pub reward: u64,
    pub max_exceeded: i64,
    /// `max_exceeded / c_max`, exact.
    pub max_exceeded_ratio: String,
    pub feasible: bool,
    pub selection: Vec<usize>,
    pub assignment: AssignmentRecord,
    pub loads: Vec<u64>,
    pub swap_opt_applied: bool,
    pub swap_moves: u64,
    pub timings: TimingsRecord,
    /// Indices in this record refer to the instance after these removals.
    pub normalization: NormalizationRecord,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn ms(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

pub fn result_record(instance: &Instance, result: &SolveResult, normalization: &NormalizationReport) -> ResultRecord {
    ResultRecord {
        schema: RESULT_SCHEMA.into(),
        algorithm: result.algorithm.clone(),
        total_capacity: result.total_capacity,
        reward: result.reward(),
        max_exceeded: result.max_exceeded(),
        max_exceeded_ratio: format_rational(&exceeded_ratio(instance, result.max_exceeded())),
        feasible: result.is_feasible(),
        selection: result.selection.indices(),
        assignment: assignment_record(instance, result.assignment.placement()),
        loads: result.assignment.loads().to_vec(),
        swap_opt_applied: result.swap_opt_applied,
        swap_moves: result.swap_moves,
        timings: TimingsRecord {
            selection_ms: ms(result.timings.selection),
            assignment_ms: ms(result.timings.assignment),
            swap_opt_ms: ms(result.timings.swap_opt),
            total_ms: ms(result.timings.total()),
        },
        normalization: normalization.into(),
        warnings: Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactRecord {
    pub schema: String,
    pub optimum: u64,
    pub selection: Vec<usize>,
    pub assignment: AssignmentRecord,
    pub loads: Vec<u64>,
    pub nodes: u64,
    pub normalization: NormalizationRecord,
}

pub fn exact_record(instance: &Instance, exact: &ExactSolution, normalization: &NormalizationReport) -> ExactRecord {
    ExactRecord {
        schema: EXACT_SCHEMA.into(),
        optimum: exact.value,
        selection: exact.selection.indices(),
        assignment: assignment_record(instance, exact.assignment.placement()),
        loads: exact.assignment.loads().to_vec(),
        nodes: exact.nodes,
        normalization: normalization.into(),
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("record serializes");
    s.push('\n');
    s
}

/// Serializes rows as CSV with a header line.
pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv buffer>", e))?;
    let bytes = w.into_inner().map_err(|e| Error::io("<csv buffer>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Writes `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_text(p, text),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip() {
        let mut inst = Instance::from_groups(vec![10, 7], vec![(12, vec![6, 6]), (9, vec![9])]);
        inst.meta.insert("seed".into(), "3".into());
        let text = instance_to_json(&inst);
        assert!(text.contains("\"schema\": \"gmkp/1\""));
        let back = instance_from_json(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(instance_to_json(&back), text);
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let text = r#"{"schema":"gmkp/9","capacities":[1,1],"groups":[]}"#;
        assert!(instance_from_json(text).is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"schema":"gmkp/1","capacities":[1,1],"groups":[],"extra":1}"#;
        assert!(instance_from_json(text).is_err());
    }

    #[test]
    fn assignment_uses_positions_inside_groups() {
        let inst = Instance::from_groups(vec![10, 10], vec![(12, vec![6, 6]), (9, vec![9])]);
        let rec = assignment_record(&inst, &[Some(0), Some(1), None]);
        assert_eq!(rec.group, vec![0, 0]);
        assert_eq!(rec.item, vec![0, 1]);
        assert_eq!(rec.knapsack, vec![0, 1]);
    }

    #[test]
    fn csv_has_header() {
        #[derive(Serialize)]
        struct Row {
            a: u32,
            b: String,
        }
        let s = csv_string(&[Row { a: 1, b: "x".into() }]).unwrap();
        assert_eq!(s, "a,b\n1,x\n");
    }
}
