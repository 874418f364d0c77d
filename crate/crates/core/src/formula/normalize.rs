use std::sync::Arc;

use super::{Expr, Formula, GateSpec, Node};

/// Result of [`normalize`].
#[derive(Debug, Clone)]
pub enum Normalized {
    /// Every gate depends on at least two inputs; may be a single leaf.
    Formula(Formula),
    Constant(bool),
    /// The formula computes `NOT x_j` (1-based `j`).
    NegatedVariable(usize),
}

impl Normalized {
    pub fn formula(&self) -> Option<&Formula> {
        match self {
            Normalized::Formula(f) => Some(f),
            _ => None,
        }
    }

    pub fn into_formula(self) -> Option<Formula> {
        match self {
            Normalized::Formula(f) => Some(f),
            _ => None,
        }
    }

    pub fn evaluate(&self, x: &[bool]) -> bool {
        match self {
            Normalized::Formula(f) => f.vertex_values(x)[0],
            Normalized::Constant(b) => *b,
            Normalized::NegatedVariable(j) => !x[j - 1],
        }
    }
}

enum Piece {
    Const(bool),
    Literal {
        var: usize,
        negated: bool,
    },
    /// Root gate depends on at least two inputs.
    Gate(Expr),
}

impl Piece {
    fn negate(self) -> Piece {
        match self {
            Piece::Const(b) => Piece::Const(!b),
            Piece::Literal { var, negated } => Piece::Literal {
                var,
                negated: !negated,
            },
            Piece::Gate(Expr::Gate(gate, children)) => {
                Piece::Gate(Expr::Gate(Arc::new(gate.complement()), children))
            }
            Piece::Gate(Expr::Var(_)) => unreachable!("gate pieces hold gates"),
        }
    }
}

/// Removes constant gates and gates depending on fewer than two inputs.
///
/// Constants are folded into their parents, negated leaves flip the
/// corresponding parent input, and a negation above a gate complements that
/// gate's truth table. Gates whose table changes receive a derived name (see
/// [`super::derived_name`]) and lose attached span programs. Variable
/// numbering is kept, so inputs that become irrelevant stay unused.
pub fn normalize(formula: &Formula) -> Normalized {
    match reduce(formula, formula.root()) {
        Piece::Const(b) => Normalized::Constant(b),
        Piece::Literal { var, negated: true } => Normalized::NegatedVariable(var),
        Piece::Literal {
            var,
            negated: false,
        } => Normalized::Formula(
            Formula::with_num_vars(Expr::Var(var), formula.num_vars()).expect("single leaf"),
        ),
        Piece::Gate(expr) => Normalized::Formula(
            Formula::with_num_vars(expr, formula.num_vars()).expect("leaves preserved"),
        ),
    }
}

fn reduce(formula: &Formula, v: usize) -> Piece {
    let (gate, children) = match formula.node(v) {
        Node::Leaf { var } => {
            return Piece::Literal {
                var: *var,
                negated: false,
            }
        }
        Node::Gate { gate, children } => (gate, children),
    };
    let pieces: Vec<Piece> = children.iter().map(|&c| reduce(formula, c)).collect();

    let fixed: Vec<Option<bool>> = pieces
        .iter()
        .map(|p| match p {
            Piece::Const(b) => Some(*b),
            _ => None,
        })
        .collect();
    let flip: Vec<bool> = pieces
        .iter()
        .map(|p| matches!(p, Piece::Literal { negated: true, .. }))
        .collect();
    let untouched = fixed.iter().all(Option::is_none) && !flip.iter().any(|&f| f);

    let flipped = gate.flip_inputs(&flip);
    let restricted = flipped.restrict(&fixed);
    let mut live: Vec<Piece> = pieces
        .into_iter()
        .filter(|p| !matches!(p, Piece::Const(_)))
        .collect();

    if let Some(b) = restricted.is_constant() {
        return Piece::Const(b);
    }
    let relevant = restricted.relevant_inputs();
    if relevant.len() == 1 {
        let j = relevant[0];
        let mut probe = vec![None; restricted.arity()];
        probe[j] = Some(false);
        let identity = !restricted.restrict(&probe).truth_table()[0];
        let piece = unflip(live.swap_remove(j));
        return if identity { piece } else { piece.negate() };
    }

    let new_gate = if untouched && relevant.len() == gate.arity() {
        gate.clone()
    } else {
        let mut keep = vec![Some(false); restricted.arity()];
        for &j in &relevant {
            keep[j] = None;
        }
        let projected = restricted.restrict(&keep);
        let mut g = GateSpec::new(
            projected.name(),
            projected.arity(),
            projected.truth_table().to_vec(),
        )
        .expect("projection is well formed");
        if relevant.len() == gate.arity() {
            // Only input negations were applied; a custom bound still holds.
            if let Some(bound @ super::CostBound::Custom(_)) = gate.cost_bound() {
                g = g.with_cost_bound(bound.clone());
            }
        }
        Arc::new(g)
    };
    let kept: Vec<Expr> = live
        .into_iter()
        .enumerate()
        .filter(|(j, _)| relevant.contains(j))
        .map(|(_, p)| match unflip(p) {
            Piece::Literal { var, .. } => Expr::Var(var),
            Piece::Gate(expr) => expr,
            Piece::Const(_) => unreachable!("constants removed"),
        })
        .collect();
    Piece::Gate(Expr::Gate(new_gate, kept))
}

/// Drops a literal's negation once it has been folded into the parent table.
fn unflip(piece: Piece) -> Piece {
    match piece {
        Piece::Literal { var, .. } => Piece::Literal {
            var,
            negated: false,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{index_to_bits, parse, Registry};

    fn norm(text: &str) -> (Formula, Normalized) {
        let f = parse(text, &Registry::standard()).unwrap();
        let n = normalize(&f);
        (f, n)
    }

    fn assert_equivalent(f: &Formula, n: &Normalized) {
        for i in 0..1usize << f.num_vars() {
            let x = index_to_bits(i, f.num_vars());
            assert_eq!(f.evaluate(&x).unwrap(), n.evaluate(&x), "input {i}");
        }
    }

    #[test]
    fn constants_fold() {
        let (f, n) = norm("OR(x1,CONST0())");
        let g = n.formula().unwrap();
        assert!(g.is_leaf(0));
        assert_equivalent(&f, &n);
        let (_, n) = norm("AND(x1,CONST0())");
        assert!(matches!(n, Normalized::Constant(false)));
    }

    #[test]
    fn not_above_gate_complements() {
        let (f, n) = norm("NOT(AND(x1,x2))");
        let g = n.formula().unwrap();
        assert_eq!(g.gate(0).unwrap().name(), "NAND");
        assert_eq!(g.len(), 3);
        assert_equivalent(&f, &n);
    }

    #[test]
    fn normal_formula_unchanged() {
        let (f, n) = norm("AND(x1,x2)");
        let g = n.formula().unwrap();
        assert_eq!(g.to_string(), f.to_string());
    }

    #[test]
    fn negated_leaves_flip_parent() {
        let (f, n) = norm("AND(NOT(x1),x2)");
        let g = n.formula().unwrap();
        assert_eq!(g.gate(0).unwrap().truth_table_string(), "0100");
        assert_equivalent(&f, &n);
        let (_, n) = norm("NOT(NOT(NOT(x1)))");
        assert!(matches!(n, Normalized::NegatedVariable(1)));
    }

    #[test]
    fn irrelevant_inputs_dropped() {
        let (f, n) = norm("OR(AND(x1,x2,CONST1()),XOR(x3,x4,CONST1()),NOT(CONST1()))");
        let g = n.formula().unwrap();
        assert_eq!(g.gate(0).unwrap().arity(), 2);
        assert_equivalent(&f, &n);
        for v in 0..g.len() {
            if let Some(gate) = g.gate(v) {
                assert!(gate.relevant_inputs().len() >= 2);
            }
        }
    }
}
