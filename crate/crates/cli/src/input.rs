//! Reading formula files and span-program JSON.

use std::path::Path;

use serde_json::Value;
use spanforge::formula::{expand_fanin2, formula_from_json, parse_bits, parse_source};
use spanforge::span::{compose_formula, ComposedProgram};
use spanforge::{Formula, Registry, SpanProgram};

use crate::failure::{Failure, Outcome};

pub enum Loaded {
    Formula(Formula),
    Program(SpanProgram),
}

fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: spanforge::Error) -> Failure {
    match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    }
}

/// A JSON object with a `target` key is a span program; any other JSON
/// value is a formula tree; everything else is formula text.
pub fn load(path: &Path) -> Outcome<Loaded> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Input(format!("{}: schema error: {e}", path.display())))?;
        if value.get("target").is_some() {
            return SpanProgram::from_json_str(&text)
                .map(Loaded::Program)
                .map_err(|e| located(path, e));
        }
        return formula_from_json(&value, &Registry::standard())
            .map(Loaded::Formula)
            .map_err(|e| located(path, e));
    }
    parse_source(&text, &Registry::standard())
        .map(|p| Loaded::Formula(p.formula))
        .map_err(|e| located(path, e))
}

pub fn load_formula(path: &Path) -> Outcome<Formula> {
    match load(path)? {
        Loaded::Formula(f) => Ok(f),
        Loaded::Program(_) => Err(Failure::Usage(format!(
            "{}: this command needs a formula, not a span program",
            path.display()
        ))),
    }
}

/// Composes along the formula after splitting AND/OR gates to fan-in two.
pub fn compose(formula: &Formula) -> Outcome<(Formula, ComposedProgram)> {
    let binary = expand_fanin2(formula)?;
    let composed = compose_formula(&binary)?;
    Ok((binary, composed))
}

pub fn bits(text: &str, n: usize) -> Outcome<Vec<bool>> {
    let x = parse_bits(text.trim())?;
    if x.len() != n {
        return Err(Failure::Input(format!(
            "input `{text}` has {} bits, expected {n}",
            x.len()
        )));
    }
    Ok(x)
}

/// Costs for a bare span program: the given list or all ones.
pub fn program_costs(program: &SpanProgram, costs: Option<&[f64]>) -> Outcome<Vec<f64>> {
    match costs {
        None => Ok(vec![1.0; program.n()]),
        Some(c) if c.len() == program.n() => Ok(c.to_vec()),
        Some(c) => Err(Failure::Input(format!(
            "{} costs given for a program on {} inputs",
            c.len(),
            program.n()
        ))),
    }
}
