//! Direct-sum composition of span programs, singly and along a formula.
//!
//! Layout of a composed program `Q`: the outer space `V` comes first, then
//! one block `|i> (x) V^{jc(i)}` for every outer vector `i` of an input in
//! `S`, in outer order. Vectors are emitted by walking the outer vectors in
//! order; an outer vector of an input in `S` contributes the free vector
//! `v_i - |i> (x) t^{jc(i)}` followed by all vectors of the inner program
//! placed in block `i`. Composed inputs are numbered outer input by outer
//! input, with the inner inputs of `j` in the inner program's order.

use std::collections::BTreeMap;
use std::ops::Range;
use std::sync::Arc;

use super::witness::{eval_unchecked, witness, Objective};
use super::{make_and, make_or, passthrough, SpanProgram, VectorKind};
use crate::error::{Error, Result};
use crate::formula::{index_to_bits, metrics, AndOr, Formula, Node, StandardBounds};

/// Programs plugged into one outer input: `positive` computes `f_j`,
/// `negative` computes `!f_j` and is needed only when the outer program has
/// vectors in `I_{j,0}`.
#[derive(Debug, Clone)]
pub struct InnerPrograms {
    pub positive: Arc<ComposedProgram>,
    pub negative: Option<Arc<ComposedProgram>>,
}

impl InnerPrograms {
    fn get(&self, c: bool) -> Option<&Arc<ComposedProgram>> {
        if c {
            Some(&self.positive)
        } else {
            self.negative.as_ref()
        }
    }
}

/// Formula data for a program built by [`compose_formula`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexInfo {
    pub vertex: usize,
    pub size: usize,
    pub adv: f64,
    pub sigma_minus: f64,
}

/// Largest measure over the inputs on which the program is true, and over
/// those on which it is false. `None` when there is no such input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measures {
    pub true_max: Option<f64>,
    pub false_max: Option<f64>,
}

impl Measures {
    pub fn get(&self, value: bool) -> Option<f64> {
        if value {
            self.true_max
        } else {
            self.false_max
        }
    }

    /// Maximum over all inputs.
    pub fn max(&self) -> f64 {
        self.true_max
            .into_iter()
            .chain(self.false_max)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A composed span program with the pieces it was built from.
#[derive(Debug, Clone)]
pub struct ComposedProgram {
    program: SpanProgram,
    /// Outer program and inner programs; `None` for a program used as is.
    parts: Option<Parts>,
    /// Cost of each input of `program`.
    input_costs: Vec<f64>,
    /// 1-based formula variable of each input of `program`.
    input_vars: Vec<usize>,
    vertex: Option<VertexInfo>,
}

#[derive(Debug, Clone)]
struct Parts {
    outer: SpanProgram,
    inners: BTreeMap<usize, InnerPrograms>,
    /// `jc(i)` for every outer vector `i` in `I_S`.
    jc: Vec<Option<(usize, bool)>>,
    /// Offset of block `i` in `V^+`.
    block_offset: Vec<Option<usize>>,
    /// Composed inputs coming from each outer input.
    input_ranges: Vec<Range<usize>>,
    /// Outer costs `r`.
    costs: Vec<f64>,
}

impl ComposedProgram {
    /// Wraps a program without provenance.
    pub fn leaf(program: SpanProgram, input_costs: Vec<f64>) -> Result<Self> {
        if input_costs.len() != program.n() {
            return Err(Error::InvalidCosts(format!(
                "{} costs for a program on {} inputs",
                input_costs.len(),
                program.n()
            )));
        }
        let input_vars = (1..=program.n()).collect();
        Ok(ComposedProgram {
            program,
            parts: None,
            input_costs,
            input_vars,
            vertex: None,
        })
    }

    pub fn program(&self) -> &SpanProgram {
        &self.program
    }

    pub fn n(&self) -> usize {
        self.program.n()
    }

    pub fn input_costs(&self) -> &[f64] {
        &self.input_costs
    }

    pub fn vertex(&self) -> Option<&VertexInfo> {
        self.vertex.as_ref()
    }

    pub fn is_composed(&self) -> bool {
        self.parts.is_some()
    }

    pub fn outer(&self) -> Option<&SpanProgram> {
        self.parts.as_ref().map(|p| &p.outer)
    }

    /// Set `S` with the programs plugged into each of its inputs (0-based).
    pub fn inners(&self) -> Option<&BTreeMap<usize, InnerPrograms>> {
        self.parts.as_ref().map(|p| &p.inners)
    }

    /// `jc(i)` for each outer vector; `None` outside `I_S`.
    pub fn jc(&self) -> Option<&[Option<(usize, bool)>]> {
        self.parts.as_ref().map(|p| p.jc.as_slice())
    }

    pub fn block_offsets(&self) -> Option<&[Option<usize>]> {
        self.parts.as_ref().map(|p| p.block_offset.as_slice())
    }

    /// Outer costs `r`: inner witness sizes on `S`, the given costs elsewhere.
    pub fn outer_costs(&self) -> Option<&[f64]> {
        self.parts.as_ref().map(|p| p.costs.as_slice())
    }

    pub fn input_ranges(&self) -> Option<&[Range<usize>]> {
        self.parts.as_ref().map(|p| p.input_ranges.as_slice())
    }

    /// Formula variable (1-based) read by each program input.
    pub fn input_vars(&self) -> &[usize] {
        &self.input_vars
    }

    /// Reorders an assignment of the formula variables into program input
    /// order.
    pub fn input_from_vars(&self, x: &[bool]) -> Result<Vec<bool>> {
        if x.len() != self.n() {
            return Err(Error::InputLength {
                expected: self.n(),
                found: x.len(),
            });
        }
        Ok(self.input_vars.iter().map(|&v| x[v - 1]).collect())
    }

    /// The program with input `j` renumbered to variable `x_{j+1}`.
    pub fn variable_program(&self) -> SpanProgram {
        let map: Vec<usize> = self.input_vars.iter().map(|&v| v - 1).collect();
        self.program
            .relabel_inputs(&map, self.n())
            .expect("input map is a permutation")
    }

    /// Outer input value `y_j` and the slice of `x` read by each outer input.
    fn split_input<'a>(&self, parts: &Parts, x: &'a [bool]) -> Vec<(bool, &'a [bool])> {
        parts
            .input_ranges
            .iter()
            .enumerate()
            .map(|(j, range)| {
                let xj = &x[range.clone()];
                let y = match parts.inners.get(&j) {
                    Some(inner) => eval_unchecked(&inner.positive.program, xj),
                    None => xj[0],
                };
                (y, xj)
            })
            .collect()
    }

    /// Outer input `y(x)` (in program input order).
    pub fn outer_input(&self, x: &[bool]) -> Result<Vec<bool>> {
        self.program.check_input(x)?;
        match &self.parts {
            None => Ok(x.to_vec()),
            Some(parts) => Ok(self
                .split_input(parts, x)
                .into_iter()
                .map(|(y, _)| y)
                .collect()),
        }
    }

    /// Slice of a program input read by outer input `j`.
    pub fn inner_input<'a>(&self, x: &'a [bool], j: usize) -> Option<&'a [bool]> {
        self.parts.as_ref().map(|p| &x[p.input_ranges[j].clone()])
    }

    /// Witness size (or full witness size) at `x` computed through the
    /// composition: the outer program is solved with the inner measures at
    /// `x_j` as costs, which is exact for direct-sum composition.
    pub fn measure_at(&self, x: &[bool], objective: Objective) -> Result<(bool, f64)> {
        self.program.check_input(x)?;
        self.measure_unchecked(x, objective)
    }

    fn measure_unchecked(&self, x: &[bool], objective: Objective) -> Result<(bool, f64)> {
        let Some(parts) = &self.parts else {
            let r = witness(&self.program, x, &self.input_costs, objective)?;
            return Ok((r.value, r.optimum()));
        };
        let split = self.split_input(parts, x);
        let y: Vec<bool> = split.iter().map(|(y, _)| *y).collect();
        let value = eval_unchecked(&parts.outer, &y);
        let mut costs = Vec::with_capacity(y.len());
        for (j, (yj, xj)) in split.iter().enumerate() {
            let cost = match parts.inners.get(&j) {
                None => self.input_costs[parts.input_ranges[j].start],
                // 1-case: blocks of available vectors, where P^{j y_j} is
                // true; 0-case: blocks of unavailable ones, where
                // P^{j !y_j} is false.
                Some(inner) => match inner.get(if value { *yj } else { !*yj }) {
                    Some(program) => program.measure_unchecked(xj, objective)?.1,
                    None => 0.0,
                },
            };
            costs.push(cost);
        }
        let r = witness(&parts.outer, &y, &costs, objective)?;
        Ok((value, r.optimum()))
    }

    /// Largest measure over true and over false inputs, computed exactly
    /// through the composition. The outer optimum is monotone in the costs
    /// and the inner programs read disjoint inputs, so each outer input `y`
    /// only needs the inner maxima.
    pub fn max_measures(&self, objective: Objective) -> Result<Measures> {
        let Some(parts) = &self.parts else {
            let mut out = Measures {
                true_max: None,
                false_max: None,
            };
            for index in 0..1usize << self.n() {
                let x = index_to_bits(index, self.n());
                let r = witness(&self.program, &x, &self.input_costs, objective)?;
                let slot = if r.value {
                    &mut out.true_max
                } else {
                    &mut out.false_max
                };
                *slot = Some(slot.map_or(r.optimum(), |m: f64| m.max(r.optimum())));
            }
            return Ok(out);
        };
        let k = parts.outer.n();
        let mut inner_measures: BTreeMap<(usize, bool), Measures> = BTreeMap::new();
        for (&j, inner) in &parts.inners {
            inner_measures.insert((j, true), inner.positive.max_measures(objective)?);
            if let Some(negative) = &inner.negative {
                inner_measures.insert((j, false), negative.max_measures(objective)?);
            }
        }
        let mut out = Measures {
            true_max: None,
            false_max: None,
        };
        'outer: for index in 0..1usize << k {
            let y = index_to_bits(index, k);
            let value = eval_unchecked(&parts.outer, &y);
            let mut costs = Vec::with_capacity(k);
            for (j, &yj) in y.iter().enumerate() {
                let cost = if parts.inners.contains_key(&j) {
                    // y_j must be attainable by the positive program.
                    if inner_measures[&(j, true)].get(yj).is_none() {
                        continue 'outer;
                    }
                    let c = if value { yj } else { !yj };
                    match inner_measures.get(&(j, c)) {
                        Some(m) => match m.get(value) {
                            Some(v) => v,
                            None => continue 'outer,
                        },
                        None => 0.0,
                    }
                } else {
                    self.input_costs[parts.input_ranges[j].start]
                };
                costs.push(cost);
            }
            let r = witness(&parts.outer, &y, &costs, objective)?;
            let slot = if value {
                &mut out.true_max
            } else {
                &mut out.false_max
            };
            *slot = Some(slot.map_or(r.optimum(), |m: f64| m.max(r.optimum())));
        }
        Ok(out)
    }

    /// `max_x wsize_x` through the composition.
    pub fn witness_size(&self) -> Result<f64> {
        Ok(self.max_measures(Objective::Size)?.max())
    }

    /// `max_x wsizef_x` through the composition.
    pub fn full_witness_size(&self) -> Result<f64> {
        Ok(self.max_measures(Objective::Full)?.max())
    }

    /// Every program in the provenance tree, this one first (preorder).
    pub fn descendants(&self) -> Vec<&ComposedProgram> {
        let mut out = vec![self];
        if let Some(parts) = &self.parts {
            for inner in parts.inners.values() {
                out.extend(inner.positive.descendants());
                if let Some(negative) = &inner.negative {
                    out.extend(negative.descendants());
                }
            }
        }
        out
    }

    /// Gate-level programs the composition is made of: the outer program of
    /// every composed node and every program used as is.
    pub fn gate_programs(&self) -> Vec<&SpanProgram> {
        self.descendants()
            .into_iter()
            .map(|c| c.outer().unwrap_or(&c.program))
            .collect()
    }
}

/// Direct-sum composition of `outer` with the programs in `inners`, keyed
/// by 0-based outer input; `S` is the key set. `costs[j]` is the cost of
/// outer input `j` when `j` is not in `S` and is ignored otherwise. For
/// `j` in `S` the outer cost is the witness size of the positive inner
/// program.
pub fn direct_sum_compose(
    outer: &SpanProgram,
    inners: BTreeMap<usize, InnerPrograms>,
    costs: &[f64],
) -> Result<ComposedProgram> {
    let n = outer.n();
    if costs.len() != n {
        return Err(Error::InvalidCosts(format!(
            "{} costs for an outer program on {n} inputs",
            costs.len()
        )));
    }
    if let Some(&j) = inners.keys().find(|&&j| j >= n) {
        return Err(Error::Dimension(format!(
            "inner program given for input {} of a {n}-input program",
            j + 1
        )));
    }
    for (j, inner) in &inners {
        if let Some(negative) = &inner.negative {
            if negative.n() != inner.positive.n() {
                return Err(Error::Dimension(format!(
                    "inner programs for input {} read {} and {} bits",
                    j + 1,
                    inner.positive.n(),
                    negative.n()
                )));
            }
        }
    }

    // Composed input numbering.
    let mut input_ranges = Vec::with_capacity(n);
    let mut next = 0;
    for j in 0..n {
        let m = inners.get(&j).map_or(1, |inner| inner.positive.n());
        input_ranges.push(next..next + m);
        next += m;
    }
    let total_inputs = next;

    // Blocks.
    let mut jc = vec![None; outer.len()];
    let mut block_offset = vec![None; outer.len()];
    let mut dim = outer.dim();
    for (i, kind) in outer.kinds().iter().enumerate() {
        if let VectorKind::Input { j, b } = *kind {
            if let Some(inner) = inners.get(&j) {
                let program = inner.get(b).ok_or(Error::MissingDual(j + 1))?;
                jc[i] = Some((j, b));
                block_offset[i] = Some(dim);
                dim += program.program.dim();
            }
        }
    }

    let mut target = vec![0.0; dim];
    target[..outer.dim()].copy_from_slice(outer.target().as_slice());
    let mut columns: Vec<(VectorKind, String, Vec<f64>)> = Vec::new();
    let outer_a = outer.matrix();
    for (i, kind) in outer.kinds().iter().enumerate() {
        let label = &outer.labels()[i];
        let mut base = vec![0.0; dim];
        base[..outer.dim()].copy_from_slice(outer_a.column(i).as_slice());
        match (*kind, jc[i]) {
            (VectorKind::Free, _) => columns.push((VectorKind::Free, label.clone(), base)),
            (VectorKind::Input { j, b }, None) => columns.push((
                VectorKind::Input {
                    j: input_ranges[j].start,
                    b,
                },
                label.clone(),
                base,
            )),
            (VectorKind::Input { .. }, Some((j, c))) => {
                let inner = &inners[&j].get(c).expect("checked above").program;
                let offset = block_offset[i].expect("block assigned");
                for (r, t) in inner.target().iter().enumerate() {
                    base[offset + r] = -t;
                }
                columns.push((VectorKind::Free, label.clone(), base));
                let inner_a = inner.matrix();
                for (i2, kind2) in inner.kinds().iter().enumerate() {
                    let mut v = vec![0.0; dim];
                    v[offset..offset + inner.dim()].copy_from_slice(inner_a.column(i2).as_slice());
                    let kind = match *kind2 {
                        VectorKind::Free => VectorKind::Free,
                        VectorKind::Input { j: k, b } => VectorKind::Input {
                            j: input_ranges[j].start + k,
                            b,
                        },
                    };
                    columns.push((kind, format!("{label}/{}", inner.labels()[i2]), v));
                }
            }
        }
    }
    let program = SpanProgram::from_columns(total_inputs, target, columns)?;

    let mut input_costs = vec![0.0; total_inputs];
    let mut outer_costs = costs.to_vec();
    let mut input_vars = vec![0; total_inputs];
    for j in 0..n {
        let range = input_ranges[j].clone();
        match inners.get(&j) {
            None => {
                if !(costs[j].is_finite() && costs[j] >= 0.0) {
                    return Err(Error::InvalidCosts(format!(
                        "cost {} of input {}",
                        costs[j],
                        j + 1
                    )));
                }
                input_costs[range.start] = costs[j];
                input_vars[range.start] = range.start + 1;
            }
            Some(inner) => {
                input_costs[range.clone()].copy_from_slice(&inner.positive.input_costs);
                for (k, slot) in input_vars[range.clone()].iter_mut().enumerate() {
                    *slot = range.start + k + 1;
                }
                outer_costs[j] = inner.positive.witness_size()?;
            }
        }
    }
    Ok(ComposedProgram {
        program,
        parts: Some(Parts {
            outer: outer.clone(),
            inners,
            jc,
            block_offset,
            input_ranges,
            costs: outer_costs,
        }),
        input_costs,
        input_vars,
        vertex: None,
    })
}

/// Span program for `formula` by direct-sum composition along the tree.
/// Fan-in-2 AND and OR vertices use `make_and`/`make_or` weighted by the
/// children's leaf counts; other gates use their attached programs. Leaf
/// costs are 1 and program inputs are in left-to-right leaf order (see
/// [`ComposedProgram::input_vars`]).
pub fn compose_formula(formula: &Formula) -> Result<ComposedProgram> {
    let metrics = metrics(formula, &StandardBounds::default()).ok();
    let sizes: Vec<usize> = match &metrics {
        Some(m) => m.size.clone(),
        None => {
            let mut size = vec![0; formula.len()];
            for v in formula.postorder() {
                size[v] = if formula.is_leaf(v) {
                    1
                } else {
                    formula.children(v).iter().map(|&c| size[c]).sum()
                };
            }
            size
        }
    };
    let mut composed = compose_vertex(formula, 0, false, &sizes, metrics.as_ref())?;
    composed.input_vars = formula.leaf_vars();
    Ok(composed)
}

fn compose_vertex(
    formula: &Formula,
    v: usize,
    negated: bool,
    sizes: &[usize],
    metrics: Option<&crate::formula::FormulaMetrics>,
) -> Result<ComposedProgram> {
    let (gate, children) = match formula.node(v) {
        Node::Leaf { .. } => {
            if negated {
                return Err(Error::MissingPrograms("negated input".into()));
            }
            return ComposedProgram::leaf(passthrough(), vec![1.0]);
        }
        Node::Gate { gate, children } => (gate, children),
    };
    let outer = match (gate.and_or(), negated) {
        (Some(kind), false) if gate.programs().is_none() => {
            if children.len() != 2 {
                return Err(Error::FanIn {
                    gate: gate.name().to_string(),
                    fan_in: children.len(),
                });
            }
            let s1 = sizes[children[0]] as f64;
            let s2 = sizes[children[1]] as f64;
            match kind {
                AndOr::And => make_and(s1, s2)?,
                AndOr::Or => make_or(s1, s2)?,
            }
        }
        _ => {
            let pair = gate
                .programs()
                .ok_or_else(|| Error::MissingPrograms(gate.name().to_string()))?;
            let program = if negated {
                pair.negative
                    .as_ref()
                    .ok_or_else(|| Error::MissingPrograms(format!("dual of {}", gate.name())))?
            } else {
                &pair.positive
            };
            if program.n() != gate.arity() {
                return Err(Error::Dimension(format!(
                    "program attached to `{}` has {} inputs, the gate has {}",
                    gate.name(),
                    program.n(),
                    gate.arity()
                )));
            }
            program.clone()
        }
    };
    let mut inners = BTreeMap::new();
    for (j, &c) in children.iter().enumerate() {
        if formula.is_leaf(c) {
            continue;
        }
        let uses_negative = outer.kinds().contains(&VectorKind::Input { j, b: false });
        let positive = Arc::new(compose_vertex(formula, c, false, sizes, metrics)?);
        let negative = if uses_negative {
            Some(Arc::new(compose_vertex(formula, c, true, sizes, metrics)?))
        } else {
            None
        };
        inners.insert(j, InnerPrograms { positive, negative });
    }
    let costs = vec![1.0; children.len()];
    let mut composed = direct_sum_compose(&outer, inners, &costs)?;
    composed.vertex = metrics.map(|m| VertexInfo {
        vertex: v,
        size: m.size[v],
        adv: m.adv[v],
        sigma_minus: m.sigma_minus[v],
    });
    Ok(composed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Registry};
    use crate::span::{eval_span, witness_size};

    fn leaf_pair(p: SpanProgram) -> InnerPrograms {
        let n = p.n();
        InnerPrograms {
            positive: Arc::new(ComposedProgram::leaf(p, vec![1.0; n]).unwrap()),
            negative: None,
        }
    }

    #[test]
    fn empty_s_is_outer() {
        let p = make_or(1.0, 1.0).unwrap();
        let c = direct_sum_compose(&p, BTreeMap::new(), &[1.0, 1.0]).unwrap();
        assert_eq!(c.program().matrix(), p.matrix());
        assert_eq!(c.program().kinds(), p.kinds());
    }

    #[test]
    fn or_of_ands() {
        let outer = make_or(2.0, 2.0).unwrap();
        let mut inners = BTreeMap::new();
        inners.insert(0, leaf_pair(make_and(1.0, 1.0).unwrap()));
        inners.insert(1, leaf_pair(make_and(1.0, 1.0).unwrap()));
        let c = direct_sum_compose(&outer, inners, &[0.0, 0.0]).unwrap();
        assert_eq!(c.n(), 4);
        assert!((c.outer_costs().unwrap()[0] - 2f64.sqrt()).abs() < 1e-12);
        let mut max: f64 = 0.0;
        for i in 0..16 {
            let x = index_to_bits(i, 4);
            let expected = (x[0] && x[1]) || (x[2] && x[3]);
            assert_eq!(eval_span(c.program(), &x).unwrap(), expected);
            let direct = witness_size(c.program(), &x, &[1.0; 4]).unwrap().size;
            let (_, via) = c.measure_at(&x, Objective::Size).unwrap();
            assert!((direct - via).abs() < 1e-9, "{i}: {direct} {via}");
            max = max.max(direct);
        }
        assert!((max - 2.0).abs() < 1e-9);
        assert!((c.witness_size().unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn and_with_or_inside() {
        let outer = make_and(1.0, 1.0).unwrap();
        let mut inners = BTreeMap::new();
        inners.insert(0, leaf_pair(make_or(1.0, 1.0).unwrap()));
        let c = direct_sum_compose(&outer, inners, &[1.0, 1.0]).unwrap();
        for i in 0..8 {
            let x = index_to_bits(i, 3);
            assert_eq!(eval_span(c.program(), &x).unwrap(), (x[0] || x[1]) && x[2]);
        }
        assert_eq!(c.program().labels()[0], "i1");
        assert_eq!(c.program().labels()[1], "i1/i1");
    }

    #[test]
    fn missing_dual_reported() {
        let outer = SpanProgram::from_columns(
            1,
            vec![1.0],
            vec![(VectorKind::Input { j: 0, b: false }, "n".into(), vec![1.0])],
        )
        .unwrap();
        let mut inners = BTreeMap::new();
        inners.insert(0, leaf_pair(make_or(1.0, 1.0).unwrap()));
        assert!(matches!(
            direct_sum_compose(&outer, inners, &[1.0]),
            Err(Error::MissingDual(1))
        ));
    }

    #[test]
    fn formula_programs() {
        let registry = Registry::standard();
        let c = compose_formula(&parse("OR(x1,x2)", &registry).unwrap()).unwrap();
        assert_eq!(c.program(), &make_or(1.0, 1.0).unwrap());
        let phi = parse("AND(OR(AND(x1,x2),x3),x4)", &registry).unwrap();
        let c = compose_formula(&phi).unwrap();
        let mut max: f64 = 0.0;
        for i in 0..16 {
            let x = index_to_bits(i, 4);
            assert_eq!(
                eval_span(c.program(), &x).unwrap(),
                phi.evaluate(&x).unwrap()
            );
            max = max.max(witness_size(c.program(), &x, &[1.0; 4]).unwrap().size);
        }
        assert!((max - 2.0).abs() < 1e-6);
        assert!(compose_formula(&parse("XOR(x1,x2)", &registry).unwrap()).is_err());
        assert!(matches!(
            compose_formula(&parse("AND(x1,x2,x3)", &registry).unwrap()),
            Err(Error::FanIn { .. })
        ));
    }

    #[test]
    fn leaf_order_differs_from_variables() {
        let phi = parse("AND(x2,OR(x3,x1))", &Registry::standard()).unwrap();
        let c = compose_formula(&phi).unwrap();
        assert_eq!(c.input_vars(), &[2, 3, 1]);
        let p = c.variable_program();
        for i in 0..8 {
            let x = index_to_bits(i, 3);
            assert_eq!(eval_span(&p, &x).unwrap(), phi.evaluate(&x).unwrap());
            let leaf = c.input_from_vars(&x).unwrap();
            assert_eq!(
                eval_span(c.program(), &leaf).unwrap(),
                phi.evaluate(&x).unwrap()
            );
        }
    }
}
