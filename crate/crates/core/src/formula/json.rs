//! Tree serialization: `{"gate": NAME, "children": [...]}` or `{"var": j}`.
//! Gates unknown to the standard registry also carry `"tt"`.

use std::sync::Arc;

use serde_json::{json, Value};

use super::{format_bits, parse_bits, Expr, Formula, GateSpec, Node, Registry};
use crate::error::{Error, Result};

pub fn formula_to_json(formula: &Formula) -> Value {
    let standard = Registry::standard();
    fn go(formula: &Formula, v: usize, standard: &Registry) -> Value {
        match formula.node(v) {
            Node::Leaf { var } => json!({ "var": var }),
            Node::Gate { gate, children } => {
                let children: Vec<Value> =
                    children.iter().map(|&c| go(formula, c, standard)).collect();
                let known = standard
                    .resolve(gate.name(), gate.arity())
                    .is_ok_and(|g| g.truth_table() == gate.truth_table());
                if known {
                    json!({ "gate": gate.name(), "children": children })
                } else {
                    json!({
                        "gate": gate.name(),
                        "tt": format_bits(gate.truth_table()),
                        "children": children,
                    })
                }
            }
        }
    }
    go(formula, 0, &standard)
}

pub fn formula_from_json(value: &Value, registry: &Registry) -> Result<Formula> {
    fn go(value: &Value, registry: &Registry) -> Result<Expr> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Schema("formula node must be an object".into()))?;
        if let Some(var) = obj.get("var") {
            let var = var
                .as_u64()
                .filter(|&v| v >= 1)
                .ok_or_else(|| Error::Schema("`var` must be a positive integer".into()))?;
            return Ok(Expr::Var(var as usize));
        }
        let name = obj
            .get("gate")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Schema("node needs `gate` or `var`".into()))?;
        let children = match obj.get("children") {
            None => Vec::new(),
            Some(Value::Array(items)) => items
                .iter()
                .map(|c| go(c, registry))
                .collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(Error::Schema("`children` must be an array".into())),
        };
        let gate = match obj.get("tt").and_then(Value::as_str) {
            Some(bits) => {
                let tt = parse_bits(bits)?;
                Arc::new(GateSpec::new(name, children.len(), tt)?)
            }
            None => registry
                .resolve(name, children.len())
                .map_err(|kind| Error::Schema(kind.to_string()))?,
        };
        Ok(Expr::Gate(gate, children))
    }
    Formula::new(go(value, registry)?)
}
