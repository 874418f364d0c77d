use super::{AndOr, Expr, Formula, GateSpec, Node};
use crate::error::{Error, Result};

/// Replaces every AND/OR gate of fan-in `k > 2` by a balanced binary tree of
/// the same gate; the left subtree takes `ceil(k/2)` children.
pub fn expand_fanin2(formula: &Formula) -> Result<Formula> {
    fn split(kind: AndOr, mut children: Vec<Expr>) -> Expr {
        if children.len() == 1 {
            return children.pop().expect("one child");
        }
        let right = children.split_off(children.len().div_ceil(2));
        let pair = vec![split(kind, children), split(kind, right)];
        match kind {
            AndOr::And => Expr::gate(GateSpec::and(2), pair),
            AndOr::Or => Expr::gate(GateSpec::or(2), pair),
        }
    }
    fn go(formula: &Formula, v: usize) -> Result<Expr> {
        match formula.node(v) {
            Node::Leaf { var } => Ok(Expr::Var(*var)),
            Node::Gate { gate, children } => {
                let kind = gate
                    .and_or()
                    .ok_or_else(|| Error::NotAndOr(gate.name().to_string()))?;
                let children = children
                    .iter()
                    .map(|&c| go(formula, c))
                    .collect::<Result<Vec<_>>>()?;
                if children.len() == 2 {
                    Ok(Expr::Gate(gate.clone(), children))
                } else {
                    Ok(split(kind, children))
                }
            }
        }
    }
    Formula::with_num_vars(go(formula, 0)?, formula.num_vars())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NandKind {
    /// Leaf whose NAND value is `x_var`, or its negation.
    Input { var: usize, negated: bool },
    /// Two-input NAND standing for an AND or OR gate of the formula.
    Nand,
    /// One-input NAND inserted where two gates of the same type are nested.
    Not,
}

#[derive(Debug, Clone)]
pub struct NandVertex {
    pub kind: NandKind,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
    /// Leaf count below the vertex.
    pub size: usize,
    /// Formula vertex this vertex comes from; `None` for inserted NOTs.
    pub origin: Option<usize>,
}

/// NAND representation of a fan-in-2 AND-OR formula, stored in preorder
/// with the root at 0. `OR(a,b) = NAND(!a,!b)` and `!AND(a,b) = NAND(a,b)`,
/// so OR vertices carry `phi_v` and AND vertices carry `!phi_v`; a NOT vertex
/// fixes the polarity wherever gates of one type are nested.
#[derive(Debug, Clone)]
pub struct NandForm {
    vertices: Vec<NandVertex>,
    output_negated: bool,
    num_vars: usize,
}

pub fn to_nand_form(formula: &Formula) -> Result<NandForm> {
    for v in 0..formula.len() {
        if let Some(gate) = formula.gate(v) {
            if gate.and_or().is_none() {
                return Err(Error::NotAndOr(gate.name().to_string()));
            }
            if gate.arity() != 2 {
                return Err(Error::FanIn {
                    gate: gate.name().to_string(),
                    fan_in: gate.arity(),
                });
            }
        }
    }
    let mut vertices = Vec::new();
    let root_positive = !matches!(formula.gate(0).and_then(GateSpec::and_or), Some(AndOr::And));
    convert(formula, 0, root_positive, None, &mut vertices);
    Ok(NandForm {
        vertices,
        output_negated: !root_positive,
        num_vars: formula.num_vars(),
    })
}

/// Appends vertices whose NAND value is `phi_v` if `positive`, else `!phi_v`.
fn convert(
    formula: &Formula,
    v: usize,
    positive: bool,
    parent: Option<usize>,
    out: &mut Vec<NandVertex>,
) -> usize {
    let id = out.len();
    match formula.node(v) {
        Node::Leaf { var } => {
            out.push(NandVertex {
                kind: NandKind::Input {
                    var: *var,
                    negated: !positive,
                },
                children: Vec::new(),
                parent,
                size: 1,
                origin: Some(v),
            });
            id
        }
        Node::Gate { gate, children } => {
            // OR is naturally positive, AND naturally negative.
            let natural = gate.and_or() == Some(AndOr::Or);
            let (gate_parent, gate_id) = if natural == positive {
                (parent, id)
            } else {
                out.push(NandVertex {
                    kind: NandKind::Not,
                    children: vec![id + 1],
                    parent,
                    size: 0,
                    origin: None,
                });
                (Some(id), id + 1)
            };
            out.push(NandVertex {
                kind: NandKind::Nand,
                children: Vec::new(),
                parent: gate_parent,
                size: 0,
                origin: Some(v),
            });
            let ids: Vec<usize> = children
                .iter()
                .map(|&c| convert(formula, c, !natural, Some(gate_id), out))
                .collect();
            let size = ids.iter().map(|&c| out[c].size).sum();
            out[gate_id].children = ids;
            out[gate_id].size = size;
            if gate_id != id {
                out[id].size = size;
            }
            id
        }
    }
}

impl NandForm {
    pub fn vertices(&self) -> &[NandVertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// True when the formula value is the negation of the root's NAND value.
    pub fn output_negated(&self) -> bool {
        self.output_negated
    }

    /// `NAND(v)` for every vertex.
    pub fn values(&self, x: &[bool]) -> Vec<bool> {
        let mut values = vec![false; self.vertices.len()];
        for v in (0..self.vertices.len()).rev() {
            let vertex = &self.vertices[v];
            values[v] = match vertex.kind {
                NandKind::Input { var, negated } => x[var - 1] != negated,
                NandKind::Nand | NandKind::Not => !vertex.children.iter().all(|&c| values[c]),
            };
        }
        values
    }

    pub fn evaluate(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.num_vars {
            return Err(Error::InputLength {
                expected: self.num_vars,
                found: x.len(),
            });
        }
        Ok(self.values(x)[0] != self.output_negated)
    }

    /// `sigma_-` over the NAND tree: 1 at inputs, `1/sqrt(s_v) + max_c
    /// sigma_-(c)` elsewhere. Inserted NOT vertices contribute a term.
    pub fn sigma_minus(&self) -> Vec<f64> {
        let mut sigma = vec![0.0; self.vertices.len()];
        for v in (0..self.vertices.len()).rev() {
            let vertex = &self.vertices[v];
            sigma[v] = match vertex.kind {
                NandKind::Input { .. } => 1.0,
                _ => {
                    1.0 / (vertex.size as f64).sqrt()
                        + vertex
                            .children
                            .iter()
                            .map(|&c| sigma[c])
                            .fold(0.0, f64::max)
                }
            };
        }
        sigma
    }

    pub fn inserted_nots(&self) -> usize {
        self.vertices
            .iter()
            .filter(|v| v.kind == NandKind::Not)
            .count()
    }
}
