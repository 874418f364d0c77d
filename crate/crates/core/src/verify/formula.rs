use serde_json::json;

use super::{Lemma, VerificationReport, LEMMA_TOL, ZERO_AMPLITUDE_TOL};
use crate::error::{Error, Result};
use crate::formula::{format_bits, metrics, to_nand_form, Formula, NandForm, StandardBounds};
use crate::linalg;
use crate::spectra::{tree_from_form, ZERO_EIGENVALUE_TOL};

/// Near-zero amplitudes within this factor of the zero threshold are
/// logged instead of failed.
const NEAR_THRESHOLD_FACTOR: f64 = 1e3;

/// `ADV(phi_v) / max_j ADV(phi_cj) >= sqrt(1 + 1/beta^2)` at every gate and
/// `sigma_-(phi) <= (2 + sqrt 2) beta^2`. The report carries the tighter of
/// the two.
pub fn check_balance_lemma(formula: &Formula) -> Result<VerificationReport> {
    let m = metrics(formula, &StandardBounds::default())?;
    let beta = m.beta;
    let ratio_bound = (1.0 + 1.0 / (beta * beta)).sqrt();
    let mut min_ratio = f64::INFINITY;
    let mut at = None;
    let mut notes = Vec::new();
    for v in 0..formula.len() {
        let Some(gate) = formula.gate(v) else {
            continue;
        };
        if gate.relevant_inputs().len() < 2 {
            notes.push(format!(
                "gate at vertex {v} depends on fewer than two inputs"
            ));
        }
        let max_child = formula
            .children(v)
            .iter()
            .map(|&c| m.adv[c])
            .fold(0.0, f64::max);
        let ratio = m.adv[v] / max_child;
        if ratio < min_ratio {
            min_ratio = ratio;
            at = Some(v);
        }
    }
    let sigma = m.root_sigma_minus();
    let sigma_bound = (2.0 + 2f64.sqrt()) * beta * beta;
    let instance = format!("{formula}");
    let (lhs, rhs) = if at.is_some() && ratio_bound - min_ratio > sigma - sigma_bound {
        (ratio_bound, min_ratio)
    } else {
        (sigma, sigma_bound)
    };
    let mut report = VerificationReport::new(Lemma::Balance, instance, lhs, rhs, LEMMA_TOL)
        .with_details(json!({
            "beta": beta,
            "ratio_bound": ratio_bound,
            "min_ratio": if at.is_some() { json!(min_ratio) } else { json!(null) },
            "min_ratio_vertex": at,
            "sigma_minus": sigma,
            "sigma_bound": sigma_bound,
        }));
    // Both inequalities must hold, whichever is reported.
    if at.is_some() && min_ratio + LEMMA_TOL < ratio_bound {
        report.pass = false;
    }
    if sigma > sigma_bound + LEMMA_TOL {
        report.pass = false;
    }
    report.notes = notes;
    Ok(report)
}

/// Sign and ratio bounds on the tree's eigenvectors at `x` for every
/// eigenvalue in `(0, E_max]`.
pub fn check_gap_lemma(formula: &Formula, x: &[bool]) -> Result<VerificationReport> {
    formula.check_input(x)?;
    let form = to_nand_form(formula)?;
    gap_lemma_on_form(&form, x)
}

struct Item {
    lhs: f64,
    rhs: f64,
    eigen: usize,
    energy: f64,
    vertex: usize,
    nand: bool,
    a_v: f64,
    a_p: f64,
    h: f64,
    y: f64,
}

impl Item {
    fn margin(&self) -> f64 {
        let m = self.lhs - self.rhs;
        if m.is_nan() {
            f64::INFINITY
        } else {
            m
        }
    }
}

/// Like [`check_gap_lemma`], for a NAND form built once.
pub fn gap_lemma_on_form(form: &NandForm, x: &[bool]) -> Result<VerificationReport> {
    let tree = tree_from_form(form, x, None);
    let instance = format!("x={}", format_bits(x));
    if tree.root_zero_mode() == tree.root_nand() {
        return Err(Error::Calibration(format!(
            "at {instance}: root zero mode {} but NAND(root) = {}",
            tree.root_zero_mode(),
            u8::from(tree.root_nand())
        )));
    }
    let adjacency = tree.adjacency();
    let (values, vectors) = linalg::symmetric_eigen(adjacency);
    let scale = values.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let zero = ZERO_EIGENVALUE_TOL * scale;
    let e_max = tree.e_max();
    let in_range: Vec<usize> = (0..values.len())
        .filter(|&k| values[k] > zero && values[k] <= e_max)
        .collect();

    let vertices = tree.vertices();
    let mut worst: Option<Item> = None;
    let mut failed = 0usize;
    let mut zero_branch = 0usize;
    let mut near = Vec::new();
    for &k in &in_range {
        let energy = values[k];
        let a = vectors.column(k);
        let threshold = ZERO_AMPLITUDE_TOL * a.norm();
        let y = tree.y_values(energy)?;
        for v in 1..vertices.len() {
            let vertex = &vertices[v];
            let p = vertex.parent.expect("non-root vertex");
            let (a_v, a_p, h) = (a[v], a[p], vertex.weight);
            if a_v.abs() <= threshold && a_p.abs() <= threshold {
                zero_branch += 1;
                continue;
            }
            let yv = y[v].expect("non-root vertex");
            let nand = vertex.nand.expect("non-root vertex");
            let bound = yv * energy;
            // NAND(v) = 0: 0 < h a_p / a_v <= y E.
            // NAND(v) = 1: 0 > a_v / (h a_p) >= -y E.
            let pairs = if !nand {
                let ratio = h * a_p / a_v;
                [(ratio, bound), (-ratio, 0.0)]
            } else {
                let q = a_v / (h * a_p);
                [(-q, bound), (q, 0.0)]
            };
            for (lhs, rhs) in pairs {
                let item = Item {
                    lhs,
                    rhs,
                    eigen: k,
                    energy,
                    vertex: v,
                    nand,
                    a_v,
                    a_p,
                    h,
                    y: yv,
                };
                let bad = !(item.margin() <= LEMMA_TOL);
                if bad {
                    let small = a_v.abs().min(a_p.abs());
                    if small <= NEAR_THRESHOLD_FACTOR * threshold {
                        near.push(format!(
                            "near-zero amplitude at vertex {v} for E={energy:e}: a_v={a_v:e}, a_p={a_p:e}"
                        ));
                        continue;
                    }
                    failed += 1;
                }
                if worst.as_ref().is_none_or(|w| item.margin() > w.margin()) {
                    worst = Some(item);
                }
            }
        }
    }

    let mut details = json!({
        "x": format_bits(x),
        "n": tree.n(),
        "sigma_minus": tree.sigma_minus(),
        "e_max": e_max,
        "gap": values.iter().copied().filter(|&e| e > zero).reduce(f64::min),
        "eigenvalues_in_range": in_range.iter().map(|&k| values[k]).collect::<Vec<_>>(),
        "tree_vertices": vertices.len(),
        "zero_branch": zero_branch,
        "near_threshold": near.len(),
    });
    let mut report = match &worst {
        None => VerificationReport::new(Lemma::Gap, instance, 0.0, 0.0, LEMMA_TOL),
        Some(w) => {
            details["worst"] = json!({
                "eigenvalue": w.energy,
                "vertex": w.vertex,
                "nand": w.nand,
                "a_v": w.a_v,
                "a_p": w.a_p,
                "h": w.h,
                "y": w.y,
            });
            if failed > 0 {
                details["worst"]["eigenvector"] =
                    json!(vectors.column(w.eigen).iter().collect::<Vec<_>>());
            }
            VerificationReport::new(Lemma::Gap, instance, w.lhs, w.rhs, LEMMA_TOL)
        }
    };
    report.pass = failed == 0;
    report.details = details;
    report.notes.push("E_max uses N = n, the leaf count".into());
    if in_range.is_empty() {
        report.notes.push("no eigenvalues in range".into());
    }
    report.notes.extend(near);
    Ok(report)
}
