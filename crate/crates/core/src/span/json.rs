use serde::{Deserialize, Serialize};

use super::{SpanProgram, VectorKind};
use crate::error::{Error, Result};

/// On-disk form of a span program. `j` is 1-based and `b` is 0 or 1.
/// Labels list the free vectors first, then the input groups in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramJson {
    pub n: usize,
    pub dim: usize,
    pub target: Vec<f64>,
    pub free: Vec<Vec<f64>>,
    pub inputs: Vec<InputGroup>,
    #[serde(default)]
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputGroup {
    pub j: usize,
    pub b: u8,
    pub vectors: Vec<Vec<f64>>,
}

pub fn program_to_json(program: &SpanProgram) -> ProgramJson {
    let a = program.matrix();
    let column = |i: usize| a.column(i).iter().copied().collect::<Vec<f64>>();
    let mut labels = Vec::new();
    let free = program
        .indices_of(VectorKind::Free)
        .into_iter()
        .map(|i| {
            labels.push(program.labels()[i].clone());
            column(i)
        })
        .collect();
    let mut inputs = Vec::new();
    for j in 0..program.n() {
        for b in [false, true] {
            let idx = program.indices_of(VectorKind::Input { j, b });
            if idx.is_empty() {
                continue;
            }
            labels.extend(idx.iter().map(|&i| program.labels()[i].clone()));
            inputs.push(InputGroup {
                j: j + 1,
                b: u8::from(b),
                vectors: idx.into_iter().map(column).collect(),
            });
        }
    }
    ProgramJson {
        n: program.n(),
        dim: program.dim(),
        target: program.target().iter().copied().collect(),
        free,
        inputs,
        labels,
    }
}

pub fn program_from_json(json: &ProgramJson) -> Result<SpanProgram> {
    if json.target.len() != json.dim {
        return Err(Error::Schema(format!(
            "target has {} entries but dim is {}",
            json.target.len(),
            json.dim
        )));
    }
    let mut columns = Vec::new();
    for v in &json.free {
        columns.push((VectorKind::Free, v.clone()));
    }
    for group in &json.inputs {
        if group.j == 0 || group.j > json.n {
            return Err(Error::Schema(format!(
                "input index j = {} outside 1..={}",
                group.j, json.n
            )));
        }
        if group.b > 1 {
            return Err(Error::Schema(format!("b must be 0 or 1, got {}", group.b)));
        }
        let kind = VectorKind::Input {
            j: group.j - 1,
            b: group.b == 1,
        };
        for v in &group.vectors {
            columns.push((kind, v.clone()));
        }
    }
    if let Some(v) = columns.iter().find(|(_, v)| v.len() != json.dim) {
        return Err(Error::Schema(format!(
            "vector of length {} in a program of dimension {}",
            v.1.len(),
            json.dim
        )));
    }
    let labels: Vec<String> = if json.labels.is_empty() {
        (1..=columns.len()).map(|i| format!("v{i}")).collect()
    } else if json.labels.len() == columns.len() {
        json.labels.clone()
    } else {
        return Err(Error::Schema(format!(
            "{} labels for {} vectors",
            json.labels.len(),
            columns.len()
        )));
    };
    let columns = columns
        .into_iter()
        .zip(labels)
        .map(|((kind, v), label)| (kind, label, v))
        .collect();
    SpanProgram::from_columns(json.n, json.target.clone(), columns)
}

impl SpanProgram {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&program_to_json(self)).expect("serializable")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: ProgramJson =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        program_from_json(&json)
    }
}
