//! Read-once formulas over a finite gate set.

mod gate;
mod json;
mod metrics;
mod normalize;
mod parse;
mod registry;
mod transform;

use std::fmt;
use std::sync::Arc;

pub use gate::{
    bits_to_index, derived_name, format_bits, index_to_bits, parse_bits, AndOr, CostBound,
    GateSpec, MAX_ARITY,
};
pub use json::{formula_from_json, formula_to_json};
pub use metrics::{metrics, BoundMethod, BoundValue, FormulaMetrics, GateBound, StandardBounds};
pub use normalize::{normalize, Normalized};
pub use parse::{parse, parse_source, ParsedSource};
pub use registry::Registry;
pub use transform::{expand_fanin2, to_nand_form, NandForm, NandKind, NandVertex};

use crate::error::{Error, Result};

/// Formula tree used for construction; [`Formula`] is the validated,
/// arena-backed form.
#[derive(Debug, Clone)]
pub enum Expr {
    /// 1-based variable index.
    Var(usize),
    Gate(Arc<GateSpec>, Vec<Expr>),
}

impl Expr {
    pub fn var(j: usize) -> Self {
        Expr::Var(j)
    }

    pub fn gate(gate: GateSpec, children: Vec<Expr>) -> Self {
        Expr::Gate(Arc::new(gate), children)
    }

    pub fn and(children: Vec<Expr>) -> Self {
        let k = children.len();
        Expr::gate(GateSpec::and(k), children)
    }

    pub fn or(children: Vec<Expr>) -> Self {
        let k = children.len();
        Expr::gate(GateSpec::or(k), children)
    }
}

#[derive(Debug, Clone)]
pub enum Node {
    /// 1-based variable index.
    Leaf { var: usize },
    Gate {
        gate: Arc<GateSpec>,
        children: Vec<usize>,
    },
}

/// A read-once formula stored in preorder; the root is vertex 0.
#[derive(Debug, Clone)]
pub struct Formula {
    nodes: Vec<Node>,
    parents: Vec<Option<usize>>,
    num_vars: usize,
}

impl Formula {
    /// Builds a formula whose leaves use each of `x1..xn` exactly once.
    pub fn new(expr: Expr) -> Result<Self> {
        let formula = Formula::from_expr(expr, None)?;
        let mut seen = vec![false; formula.num_vars];
        for var in formula.leaf_vars() {
            seen[var - 1] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::Malformed(format!(
                "variable indices must be exactly x1..x{}; x{} is missing",
                formula.num_vars,
                missing + 1
            )));
        }
        Ok(formula)
    }

    /// Like [`Formula::new`] but over `n` variables, some of which may be
    /// unused. Produced by normalization when inputs turn out irrelevant.
    pub fn with_num_vars(expr: Expr, n: usize) -> Result<Self> {
        Formula::from_expr(expr, Some(n))
    }

    fn from_expr(expr: Expr, n: Option<usize>) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut parents = Vec::new();
        push_expr(expr, None, &mut nodes, &mut parents)?;
        let max_var = nodes
            .iter()
            .filter_map(|node| match node {
                Node::Leaf { var } => Some(*var),
                Node::Gate { .. } => None,
            })
            .max()
            .unwrap_or(0);
        let num_vars = n.unwrap_or(max_var);
        if max_var > num_vars {
            return Err(Error::Malformed(format!(
                "variable x{max_var} exceeds the declared {num_vars} variables"
            )));
        }
        let mut seen = vec![false; num_vars];
        for node in &nodes {
            if let Node::Leaf { var } = node {
                if std::mem::replace(&mut seen[var - 1], true) {
                    return Err(Error::Malformed(format!(
                        "variable x{var} appears more than once (formula is not read-once)"
                    )));
                }
            }
        }
        Ok(Formula {
            nodes,
            parents,
            num_vars,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node(&self, v: usize) -> &Node {
        &self.nodes[v]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        match &self.nodes[v] {
            Node::Leaf { .. } => &[],
            Node::Gate { children, .. } => children,
        }
    }

    pub fn gate(&self, v: usize) -> Option<&GateSpec> {
        match &self.nodes[v] {
            Node::Leaf { .. } => None,
            Node::Gate { gate, .. } => Some(gate),
        }
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        matches!(self.nodes[v], Node::Leaf { .. })
    }

    /// Variables in left-to-right leaf order.
    pub fn leaf_vars(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter_map(|node| match node {
                Node::Leaf { var } => Some(*var),
                Node::Gate { .. } => None,
            })
            .collect()
    }

    /// Variables below `v` in left-to-right order.
    pub fn subtree_vars(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            match &self.nodes[u] {
                Node::Leaf { var } => out.push(*var),
                Node::Gate { children, .. } => stack.extend(children.iter().rev()),
            }
        }
        out
    }

    /// Vertices with every child listed before its parent.
    pub fn postorder(&self) -> Vec<usize> {
        (0..self.nodes.len()).rev().collect()
    }

    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        for v in self.postorder() {
            depth[v] = self
                .children(v)
                .iter()
                .map(|&c| depth[c] + 1)
                .max()
                .unwrap_or(0);
        }
        depth[0]
    }

    pub fn max_fan_in(&self) -> usize {
        (0..self.nodes.len())
            .map(|v| self.children(v).len())
            .max()
            .unwrap_or(0)
    }

    pub fn is_and_or(&self) -> bool {
        (0..self.nodes.len()).all(|v| self.gate(v).is_none_or(|g| g.and_or().is_some()))
    }

    pub fn check_input(&self, x: &[bool]) -> Result<()> {
        if x.len() != self.num_vars {
            return Err(Error::InputLength {
                expected: self.num_vars,
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[bool]) -> Result<bool> {
        self.check_input(x)?;
        Ok(self.vertex_values(x)[0])
    }

    /// Value of every subformula on `x` (unchecked length).
    pub fn vertex_values(&self, x: &[bool]) -> Vec<bool> {
        let mut values = vec![false; self.nodes.len()];
        for v in self.postorder() {
            values[v] = match &self.nodes[v] {
                Node::Leaf { var } => x[var - 1],
                Node::Gate { gate, children } => {
                    let index = children
                        .iter()
                        .fold(0, |acc, &c| (acc << 1) | usize::from(values[c]));
                    gate.eval_index(index)
                }
            };
        }
        values
    }

    pub fn subtree_expr(&self, v: usize) -> Expr {
        match &self.nodes[v] {
            Node::Leaf { var } => Expr::Var(*var),
            Node::Gate { gate, children } => Expr::Gate(
                gate.clone(),
                children.iter().map(|&c| self.subtree_expr(c)).collect(),
            ),
        }
    }

    pub fn to_expr(&self) -> Expr {
        self.subtree_expr(0)
    }
}

fn push_expr(
    expr: Expr,
    parent: Option<usize>,
    nodes: &mut Vec<Node>,
    parents: &mut Vec<Option<usize>>,
) -> Result<usize> {
    let id = nodes.len();
    parents.push(parent);
    match expr {
        Expr::Var(var) => {
            if var == 0 {
                return Err(Error::Malformed("variable indices start at 1".into()));
            }
            nodes.push(Node::Leaf { var });
        }
        Expr::Gate(gate, children) => {
            if gate.arity() != children.len() {
                return Err(Error::Malformed(format!(
                    "gate `{}` expects {} inputs, found {}",
                    gate.name(),
                    gate.arity(),
                    children.len()
                )));
            }
            nodes.push(Node::Gate {
                gate,
                children: Vec::new(),
            });
            let ids = children
                .into_iter()
                .map(|child| push_expr(child, Some(id), nodes, parents))
                .collect::<Result<Vec<_>>>()?;
            if let Node::Gate { children, .. } = &mut nodes[id] {
                *children = ids;
            }
        }
    }
    Ok(id)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(formula: &Formula, v: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match formula.node(v) {
                Node::Leaf { var } => write!(f, "x{var}"),
                Node::Gate { gate, children } => {
                    write!(f, "{}(", gate.name())?;
                    for (i, &c) in children.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        go(formula, c, f)?;
                    }
                    f.write_str(")")
                }
            }
        }
        go(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psi() -> Formula {
        let x = Expr::var;
        Formula::new(Expr::or(vec![
            Expr::and(vec![
                Expr::or(vec![Expr::and(vec![x(1), x(2)]), x(3)]),
                x(4),
            ]),
            Expr::and(vec![x(5), Expr::or(vec![x(6), x(7)])]),
        ]))
        .unwrap()
    }

    #[test]
    fn evaluates_psi() {
        let f = psi();
        assert!(!f.evaluate(&parse_bits("0010000").unwrap()).unwrap());
        assert!(f.evaluate(&parse_bits("0011000").unwrap()).unwrap());
        assert!(f.evaluate(&[true; 6]).is_err());
    }

    #[test]
    fn structure_queries() {
        let f = psi();
        assert_eq!(f.num_vars(), 7);
        assert_eq!(f.depth(), 4);
        assert_eq!(f.leaf_vars(), (1..=7).collect::<Vec<_>>());
        assert_eq!(
            f.to_string(),
            "OR(AND(OR(AND(x1,x2),x3),x4),AND(x5,OR(x6,x7)))"
        );
        for v in 1..f.len() {
            let p = f.parent(v).unwrap();
            assert!(f.children(p).contains(&v));
        }
    }

    #[test]
    fn rejects_repeats_and_gaps() {
        assert!(Formula::new(Expr::and(vec![Expr::var(1), Expr::var(1)])).is_err());
        assert!(Formula::new(Expr::and(vec![Expr::var(1), Expr::var(3)])).is_err());
        assert!(Formula::with_num_vars(Expr::and(vec![Expr::var(1), Expr::var(3)]), 3).is_ok());
    }
}
