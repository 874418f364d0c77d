use std::collections::BTreeMap;

use serde_json::json;

use super::{aggregate, Lemma, VerificationReport, LEMMA_TOL};
use crate::error::{Error, Result};
use crate::formula::{format_bits, index_to_bits, metrics, Formula, StandardBounds};
use crate::span::{
    eval_span, full_witness_size, witness_size, ComposedProgram, SpanProgram, VectorKind,
};
use crate::spectra::biadjacency;

const SHAPE_TOL: f64 = 1e-12;

/// Checks that `program` is canonical (`V` spanned by the false inputs in
/// index order, target all ones, input vectors of `I_{j,b}` vanishing on
/// false inputs with `x_j = b`) and that `|x>` is an optimal 0-witness for
/// every false input `x`. Shape violations are errors; a non-optimal `|x>`
/// is a failed report.
pub fn check_canonical_premise(program: &SpanProgram, costs: &[f64]) -> Result<VerificationReport> {
    let k = program.n();
    let mut zeros = Vec::new();
    for index in 0..1usize << k {
        let x = index_to_bits(index, k);
        if !eval_span(program, &x)? {
            zeros.push(x);
        }
    }
    if program.dim() != zeros.len() {
        return Err(Error::NotCanonical(format!(
            "dim V = {} but the program is false on {} inputs",
            program.dim(),
            zeros.len()
        )));
    }
    if program.target().iter().any(|t| (t - 1.0).abs() > SHAPE_TOL) {
        return Err(Error::NotCanonical(
            "target is not the all-ones vector".into(),
        ));
    }
    let a = program.matrix();
    for (i, kind) in program.kinds().iter().enumerate() {
        match *kind {
            VectorKind::Free => {
                if a.column(i).amax() > SHAPE_TOL {
                    return Err(Error::NotCanonical(format!(
                        "free vector `{}` is nonzero",
                        program.labels()[i]
                    )));
                }
            }
            VectorKind::Input { j, b } => {
                for (r, x) in zeros.iter().enumerate() {
                    if x[j] == b && a[(r, i)].abs() > SHAPE_TOL {
                        return Err(Error::NotCanonical(format!(
                            "vector `{}` is available at {} but not orthogonal to it",
                            program.labels()[i],
                            format_bits(x)
                        )));
                    }
                }
            }
        }
    }

    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for (r, x) in zeros.iter().enumerate() {
        let optimum = witness_size(program, x, costs)?.size;
        let at_x: f64 = program
            .kinds()
            .iter()
            .enumerate()
            .map(|(i, kind)| match *kind {
                VectorKind::Input { j, b } if x[j] != b => costs[j] * a[(r, i)].powi(2),
                _ => 0.0,
            })
            .sum();
        let diff = (optimum - at_x).abs();
        worst = worst.max(diff);
        rows.push(json!({ "x": format_bits(x), "optimum": optimum, "at_x": at_x }));
    }
    Ok(VerificationReport::new(
        Lemma::Canonical,
        format!("canonical program on {k} inputs, costs {costs:?}"),
        worst,
        0.0,
        LEMMA_TOL,
    )
    .with_details(json!({ "false_inputs": rows })))
}

/// `||abs(A_G)|| <= 2^k (1 + wsize_s(P) / min_j s_j) + |I|` for a canonical
/// program. The left side is the norm of the entrywise absolute value of
/// the graph's adjacency matrix, which equals that of the biadjacency
/// matrix.
pub fn check_norm_lemma(program: &SpanProgram, costs: &[f64]) -> Result<VerificationReport> {
    if costs.len() != program.n() {
        return Err(Error::InvalidCosts(format!(
            "{} costs for a program on {} inputs",
            costs.len(),
            program.n()
        )));
    }
    let min_s = costs.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_s > 0.0) {
        return Err(Error::InvalidCosts(
            "the norm bound needs positive costs".into(),
        ));
    }
    let premise = check_canonical_premise(program, costs)?;
    let k = program.n();
    let mut wsize = 0.0f64;
    for index in 0..1usize << k {
        wsize = wsize.max(witness_size(program, &index_to_bits(index, k), costs)?.size);
    }
    let graph = biadjacency(program);
    let lhs = graph.abs_norm();
    let rhs = (1u64 << k) as f64 * (1.0 + wsize / min_s) + program.len() as f64;
    let report = VerificationReport::new(
        Lemma::Norm,
        format!("canonical program on {k} inputs, costs {costs:?}"),
        lhs,
        rhs,
        LEMMA_TOL,
    )
    .with_details(json!({
        "abs_norm": lhs,
        "abs_norm_squared": lhs * lhs,
        "wsize": wsize,
        "min_cost": min_s,
        "k": k,
        "num_vectors": program.len(),
    }));
    Ok(if premise.pass {
        report
    } else {
        report.fail("premise failed: |x> is not an optimal 0-witness")
    })
}

/// Every composed node with the slice of `x` it reads, this node first.
pub(crate) fn nodes_with_inputs<'a>(
    composed: &'a ComposedProgram,
    x: &[bool],
    out: &mut Vec<(&'a ComposedProgram, Vec<bool>)>,
) {
    out.push((composed, x.to_vec()));
    if let Some(inners) = composed.inners() {
        for (&j, inner) in inners {
            let xj = composed.inner_input(x, j).expect("composed node");
            nodes_with_inputs(&inner.positive, xj, out);
            if let Some(negative) = &inner.negative {
                nodes_with_inputs(negative, xj, out);
            }
        }
    }
}

/// Global `wsizef / wsize` of each inner program, keyed by `(j, c)`.
pub(crate) struct ComposeContext {
    ratios: BTreeMap<(usize, bool), (f64, f64)>,
    notes: Vec<String>,
}

impl ComposeContext {
    pub(crate) fn new(composed: &ComposedProgram) -> Result<Self> {
        let mut ratios = BTreeMap::new();
        let mut notes = Vec::new();
        if let Some(inners) = composed.inners() {
            let r = composed.outer_costs().expect("composed node");
            for (&j, inner) in inners {
                let mut programs = vec![(true, &inner.positive)];
                if let Some(negative) = &inner.negative {
                    programs.push((false, negative));
                }
                for (c, p) in programs {
                    let wsize = p.witness_size()?;
                    let wsizef = p.full_witness_size()?;
                    if (wsize - r[j]).abs() > 1e-6 * r[j].max(1.0) {
                        notes.push(format!(
                            "inner program ({}, {}) has witness size {wsize}, outer cost is {}",
                            j + 1,
                            u8::from(c),
                            r[j]
                        ));
                    }
                    ratios.insert((j, c), (wsizef, wsize));
                }
            }
        }
        Ok(ComposeContext { ratios, notes })
    }

    /// Checks the composition bound at `x` (program input order). `lhs` may
    /// pass in a precomputed `wsizef_x(Q)`.
    pub(crate) fn check(
        &self,
        composed: &ComposedProgram,
        x: &[bool],
        lhs: Option<f64>,
    ) -> Result<VerificationReport> {
        let lhs = match lhs {
            Some(v) => v,
            None => full_witness_size(composed.program(), x, composed.input_costs())?.full_size,
        };
        let (outer, costs) = match (composed.outer(), composed.outer_costs()) {
            (Some(o), Some(r)) => (o, r.to_vec()),
            _ => (composed.program(), composed.input_costs().to_vec()),
        };
        let y = composed.outer_input(x)?;
        let w = witness_size(outer, &y, &costs)?;
        let s_empty = self.ratios.is_empty();
        let a = outer.matrix();

        // Coordinates that decide which inputs qualify for sigma.
        let touched: Vec<(usize, f64)> = if w.value {
            (0..outer.len()).map(|i| (i, w.witness[i])).collect()
        } else {
            (0..outer.len())
                .map(|i| (i, a.column(i).dot(&w.witness)))
                .collect()
        };
        let scale = touched.iter().fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        let mut qualifying = Vec::new();
        let mut sigma = f64::NEG_INFINITY;
        for &(i, v) in &touched {
            let VectorKind::Input { j, b } = outer.kinds()[i] else {
                continue;
            };
            // 1-case: I_{j y_j}; 0-case: I_{j !y_j}.
            let wanted = if w.value { y[j] } else { !y[j] };
            if b != wanted || v.abs() <= 1e-10 * scale {
                continue;
            }
            if let Some(&(wsizef, wsize)) = self.ratios.get(&(j, b)) {
                if !qualifying.contains(&(j + 1)) {
                    qualifying.push(j + 1);
                }
                sigma = sigma.max(wsizef / wsize);
            }
        }
        let mut notes = Vec::new();
        if s_empty {
            sigma = 1.0;
        } else if qualifying.is_empty() {
            sigma = 1.0;
            notes.push("no input of S carries witness weight; sigma taken as 1".to_string());
        }
        let extra = if w.value {
            1.0 + outer
                .kinds()
                .iter()
                .enumerate()
                .filter(|(_, k)| **k == VectorKind::Free)
                .map(|(i, _)| w.witness[i].powi(2))
                .sum::<f64>()
        } else {
            w.witness.norm_squared()
        };
        let rhs = sigma * w.size + extra;
        let mut report = VerificationReport::new(
            Lemma::Compose,
            format!("x={}", format_bits(x)),
            lhs,
            rhs,
            LEMMA_TOL,
        )
        .with_details(json!({
            "value": w.value,
            "y": format_bits(&y),
            "outer_wsize": w.size,
            "sigma": sigma,
            "qualifying_inputs": qualifying,
            "extra": extra,
            "outer_witness": w.witness.as_slice(),
        }));
        report.notes.extend(self.notes.iter().cloned());
        report.notes.extend(notes);
        Ok(report)
    }
}

/// Full-witness-size composition bound at `x` (program input order), in
/// multiplied form: `wsizef_x(Q) <= sigma wsize_y(P, r) + 1 + sum_free |w_i|^2`
/// if true, `wsizef_x(Q) <= sigma wsize_y(P, r) + ||w'||^2` if false. `sigma`
/// is 1 when `S` is empty.
pub fn check_compose_lemma(composed: &ComposedProgram, x: &[bool]) -> Result<VerificationReport> {
    ComposeContext::new(composed)?.check(composed, x, None)
}

/// `||abs(A_G)||` of the composed program against twice the largest
/// gate-level norm.
pub fn check_directsum_norm(composed: &ComposedProgram) -> VerificationReport {
    let lhs = biadjacency(composed.program()).abs_norm();
    let norms: Vec<f64> = composed
        .gate_programs()
        .into_iter()
        .map(|p| biadjacency(p).abs_norm())
        .collect();
    let max = norms.iter().copied().fold(0.0, f64::max);
    VerificationReport::new(
        Lemma::DirectSumNorm,
        format!("composed program on {} inputs", composed.n()),
        lhs,
        2.0 * max,
        LEMMA_TOL,
    )
    .with_details(json!({
        "abs_norm": lhs,
        "max_gate_abs_norm": max,
        "gates": norms.len(),
        "dim": composed.program().dim(),
        "vectors": composed.program().len(),
    }))
}

/// Bound at one vertex: `sigma_-(v) ADV(phi_v)` if true, `2 sigma_-(v)
/// ADV(phi_v) - 1` if false.
pub(crate) fn vertex_bound(value: bool, sigma_minus: f64, adv: f64) -> f64 {
    if value {
        sigma_minus * adv
    } else {
        2.0 * sigma_minus * adv - 1.0
    }
}

pub(crate) fn vertex_report(
    composed: &ComposedProgram,
    x: &[bool],
    wsizef: Option<(bool, f64)>,
) -> Result<Option<VerificationReport>> {
    let Some(info) = composed.vertex() else {
        return Ok(None);
    };
    let (value, lhs) = match wsizef {
        Some(v) => v,
        None => {
            let r = full_witness_size(composed.program(), x, composed.input_costs())?;
            (r.value, r.full_size)
        }
    };
    let rhs = vertex_bound(value, info.sigma_minus, info.adv);
    Ok(Some(
        VerificationReport::new(
            Lemma::Witness,
            format!("vertex {} at {}", info.vertex, format_bits(x)),
            lhs,
            rhs,
            LEMMA_TOL,
        )
        .with_details(json!({
            "vertex": info.vertex,
            "value": value,
            "size": info.size,
            "adv": info.adv,
            "sigma_minus": info.sigma_minus,
        })),
    ))
}

/// Per-vertex full witness bounds at `x` (program input order) over every
/// gate vertex of a program built by `compose_formula`.
pub fn check_witness_bounds(composed: &ComposedProgram, x: &[bool]) -> Result<VerificationReport> {
    composed.program().check_input(x)?;
    let mut nodes = Vec::new();
    nodes_with_inputs(composed, x, &mut nodes);
    let mut reports = Vec::new();
    for (node, xv) in nodes {
        if let Some(r) = vertex_report(node, &xv, None)? {
            reports.push(r);
        }
    }
    Ok(aggregate(
        Lemma::Witness,
        format!("x={}", format_bits(x)),
        reports,
    ))
}

/// `max_x wsizef_x(P_phi) <= 2 sigma_-(phi) ADV(phi)`. Up to 12 inputs the
/// maximum is taken over direct solves; beyond that it comes from the
/// composition recursion.
pub fn check_root_bound(
    formula: &Formula,
    composed: &ComposedProgram,
) -> Result<VerificationReport> {
    let m = metrics(formula, &StandardBounds::default())?;
    let n = composed.n();
    let (lhs, method) = if n <= 12 {
        let mut max = 0.0f64;
        for index in 0..1usize << n {
            let x = index_to_bits(index, n);
            max = max
                .max(full_witness_size(composed.program(), &x, composed.input_costs())?.full_size);
        }
        (max, "exhaustive")
    } else {
        (composed.full_witness_size()?, "recursion")
    };
    let rhs = 2.0 * m.root_sigma_minus() * m.root_adv();
    Ok(
        VerificationReport::new(Lemma::Witness, "root", lhs, rhs, LEMMA_TOL).with_details(json!({
            "wsizef": lhs,
            "sigma_minus": m.root_sigma_minus(),
            "adv": m.root_adv(),
            "n": m.n,
            "method": method,
        })),
    )
}
