use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::formula::{check_balance_lemma, gap_lemma_on_form};
use super::program::{check_directsum_norm, check_root_bound, vertex_report, ComposeContext};
use super::{aggregate, Lemma, VerificationReport};
use crate::error::Result;
use crate::formula::{index_to_bits, to_nand_form, Formula};
use crate::span::{compose_formula, full_witness_size, ComposedProgram};

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    /// Inputs are enumerated exhaustively up to this many bits, sampled
    /// beyond.
    pub exhaustive_limit: usize,
    /// Random inputs drawn when sampling (all-zeros and all-ones are added).
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            exhaustive_limit: 12,
            samples: 32,
            seed: 0,
        }
    }
}

/// All `2^n` inputs when `n <= exhaustive_limit`; otherwise all-zeros,
/// all-ones and `samples` seeded random inputs.
pub fn sample_inputs(n: usize, opts: &SuiteOptions) -> Vec<Vec<bool>> {
    if n <= opts.exhaustive_limit {
        return (0..1usize << n).map(|i| index_to_bits(i, n)).collect();
    }
    let mut rng =
        ChaCha8Rng::seed_from_u64(opts.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut out = vec![vec![false; n], vec![true; n]];
    for _ in 0..opts.samples {
        out.push((0..n).map(|_| rng.gen::<bool>()).collect());
    }
    out
}

/// Runs the formula-level checks in `lemmas` (program-level lemmas are
/// skipped) and returns one aggregated report per lemma, plus a separate
/// root-bound report for [`Lemma::Witness`].
pub fn check_formula(
    formula: &Formula,
    lemmas: &[Lemma],
    opts: &SuiteOptions,
) -> Result<Vec<VerificationReport>> {
    let name = formula.to_string();
    let wants = |l: Lemma| lemmas.contains(&l);
    let composed = if wants(Lemma::Compose) || wants(Lemma::DirectSumNorm) || wants(Lemma::Witness)
    {
        Some(compose_formula(formula)?)
    } else {
        None
    };
    let mut out = Vec::new();
    for lemma in Lemma::FORMULA {
        if !wants(lemma) {
            continue;
        }
        match lemma {
            Lemma::Compose => {
                let c = composed.as_ref().expect("composed above");
                out.push(node_sweep(c, &name, opts, true)?);
            }
            Lemma::Witness => {
                let c = composed.as_ref().expect("composed above");
                out.push(node_sweep(c, &name, opts, false)?);
                let mut root = check_root_bound(formula, c)?;
                root.instance = format!("{name}: root");
                out.push(root);
            }
            Lemma::DirectSumNorm => {
                let mut r = check_directsum_norm(composed.as_ref().expect("composed above"));
                r.instance = name.clone();
                out.push(r);
            }
            Lemma::Balance => out.push(check_balance_lemma(formula)?),
            Lemma::Gap => {
                let form = to_nand_form(formula)?;
                let inputs = sample_inputs(formula.num_vars(), opts);
                let exhaustive = formula.num_vars() <= opts.exhaustive_limit;
                let reports = inputs
                    .par_iter()
                    .map(|x| gap_lemma_on_form(&form, x))
                    .collect::<Result<Vec<_>>>()?;
                let count = reports.len();
                let mut r = aggregate(Lemma::Gap, name.clone(), reports);
                r.details["calibrated_inputs"] = json!(count);
                r.details["exhaustive"] = json!(exhaustive);
                out.push(r);
            }
            Lemma::Canonical | Lemma::Norm => unreachable!("not a formula lemma"),
        }
    }
    Ok(out)
}

/// Composition bound (`compose`) or per-vertex witness bounds at every node
/// of the composition tree, over that node's own inputs.
fn node_sweep(
    composed: &ComposedProgram,
    name: &str,
    opts: &SuiteOptions,
    compose: bool,
) -> Result<VerificationReport> {
    let lemma = if compose {
        Lemma::Compose
    } else {
        Lemma::Witness
    };
    let mut reports = Vec::new();
    for node in composed.descendants() {
        if !compose && node.vertex().is_none() {
            continue;
        }
        let context = if compose {
            Some(ComposeContext::new(node)?)
        } else {
            None
        };
        let label = match node.vertex() {
            Some(v) => format!("vertex {}", v.vertex),
            None => "program".to_string(),
        };
        let inputs = sample_inputs(node.n(), opts);
        let node_reports = inputs
            .par_iter()
            .map(|x| -> Result<Option<VerificationReport>> {
                let full = full_witness_size(node.program(), x, node.input_costs())?;
                let report = match &context {
                    Some(ctx) => Some(ctx.check(node, x, Some(full.full_size))?),
                    None => vertex_report(node, x, Some((full.value, full.full_size)))?,
                };
                Ok(report.map(|mut r| {
                    r.instance = format!("{label}, {}", r.instance);
                    r
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        reports.extend(node_reports.into_iter().flatten());
    }
    Ok(aggregate(lemma, name, reports))
}
