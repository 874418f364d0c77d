use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{CostBound, Formula, GateSpec};
use crate::adversary::{adv_minimax, MinimaxOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    ClosedForm,
    Declared,
    Minimax,
    Certificate,
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundMethod::ClosedForm => "closed_form",
            BoundMethod::Declared => "declared",
            BoundMethod::Minimax => "minimax",
            BoundMethod::Certificate => "certificate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue {
    pub value: f64,
    pub method: BoundMethod,
}

/// Per-gate map from child costs to the gate's adversary bound.
pub trait GateBound: Sync {
    fn bound(&self, gate: &GateSpec, costs: &[f64]) -> Result<BoundValue>;
}

/// Closed form or declared bound when the gate carries one, otherwise the
/// minimax solver for gates of arity at most 4.
#[derive(Debug, Clone, Default)]
pub struct StandardBounds {
    pub minimax: MinimaxOptions,
}

impl GateBound for StandardBounds {
    fn bound(&self, gate: &GateSpec, costs: &[f64]) -> Result<BoundValue> {
        match gate.cost_bound() {
            Some(CostBound::Euclidean) => Ok(BoundValue {
                value: CostBound::Euclidean.evaluate(costs),
                method: BoundMethod::ClosedForm,
            }),
            Some(bound @ CostBound::Custom(_)) => Ok(BoundValue {
                value: bound.evaluate(costs),
                method: BoundMethod::Declared,
            }),
            None if gate.arity() <= 4 => Ok(BoundValue {
                value: adv_minimax(gate, costs, &self.minimax)?.value,
                method: BoundMethod::Minimax,
            }),
            None => Err(Error::MissingBound(gate.name().to_string())),
        }
    }
}

/// Per-vertex and global formula measures. Vectors are indexed by vertex id.
#[derive(Debug, Clone, Serialize)]
pub struct FormulaMetrics {
    pub n: usize,
    /// Leaf count of each subformula.
    pub size: Vec<usize>,
    pub adv: Vec<f64>,
    pub sigma_minus: Vec<f64>,
    pub sigma_plus: Vec<f64>,
    pub beta: f64,
    pub k_max: usize,
    pub depth: usize,
    /// Bound methods used anywhere in the formula.
    pub methods: BTreeSet<BoundMethod>,
}

impl FormulaMetrics {
    pub fn root_adv(&self) -> f64 {
        self.adv[0]
    }

    pub fn root_sigma_minus(&self) -> f64 {
        self.sigma_minus[0]
    }

    pub fn root_sigma_plus(&self) -> f64 {
        self.sigma_plus[0]
    }
}

/// Computes adversary values bottom-up (leaves have value 1) and the path
/// sums `sigma_-(v) = 1/adv(v) + max_c sigma_-(c)`,
/// `sigma_+(v) = adv(v)^2 + max_c sigma_+(c)`, both equal to 1 at leaves.
pub fn metrics(formula: &Formula, bounds: &dyn GateBound) -> Result<FormulaMetrics> {
    let len = formula.len();
    let mut size = vec![0usize; len];
    let mut adv = vec![0.0; len];
    let mut sigma_minus = vec![0.0; len];
    let mut sigma_plus = vec![0.0; len];
    let mut beta: f64 = 1.0;
    let mut methods = BTreeSet::new();
    for v in formula.postorder() {
        match formula.gate(v) {
            None => {
                size[v] = 1;
                adv[v] = 1.0;
                sigma_minus[v] = 1.0;
                sigma_plus[v] = 1.0;
            }
            Some(gate) => {
                let children = formula.children(v);
                let costs: Vec<f64> = children.iter().map(|&c| adv[c]).collect();
                let bound = bounds.bound(gate, &costs)?;
                if !(bound.value > 0.0 && bound.value.is_finite()) {
                    return Err(Error::InvalidGate(format!(
                        "gate `{}` has adversary value {}; normalize the formula first",
                        gate.name(),
                        bound.value
                    )));
                }
                methods.insert(bound.method);
                size[v] = children.iter().map(|&c| size[c]).sum();
                adv[v] = bound.value;
                let max_of =
                    |values: &[f64]| children.iter().map(|&c| values[c]).fold(0.0, f64::max);
                sigma_minus[v] = 1.0 / bound.value + max_of(&sigma_minus);
                sigma_plus[v] = bound.value * bound.value + max_of(&sigma_plus);
                let hi = costs.iter().cloned().fold(f64::MIN, f64::max);
                let lo = costs.iter().cloned().fold(f64::MAX, f64::min);
                beta = beta.max(hi / lo);
            }
        }
    }
    Ok(FormulaMetrics {
        n: formula.num_vars(),
        size,
        adv,
        sigma_minus,
        sigma_plus,
        beta,
        k_max: formula.max_fan_in(),
        depth: formula.depth(),
        methods,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Registry};

    fn m(text: &str) -> FormulaMetrics {
        let f = parse(text, &Registry::standard()).unwrap();
        metrics(&f, &StandardBounds::default()).unwrap()
    }

    #[test]
    fn balanced_four() {
        let r = m("OR(AND(x1,x2),AND(x3,x4))");
        assert!((r.root_adv() - 2.0).abs() < 1e-12);
        assert_eq!(r.beta, 1.0);
        let expected = 0.5 + 1.0 / 2f64.sqrt() + 1.0;
        assert!((r.root_sigma_minus() - expected).abs() < 1e-12);
        assert!((r.root_sigma_plus() - (4.0 + 2.0 + 1.0)).abs() < 1e-12);
        assert_eq!((r.k_max, r.depth, r.n), (2, 2, 4));
    }

    #[test]
    fn or_two_sigma() {
        let r = m("OR(x1,x2)");
        assert!((r.root_sigma_minus() - (1.0 + 1.0 / 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn unbalanced_beta() {
        let r = m("OR(AND(x1,x2),x3)");
        assert!((r.beta - 2f64.sqrt()).abs() < 1e-12);
        assert!((r.root_adv() - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.size, vec![3, 2, 1, 1, 1]);
    }

    #[test]
    fn leaf_metrics() {
        let r = m("x1");
        assert_eq!(
            (
                r.root_adv(),
                r.root_sigma_minus(),
                r.root_sigma_plus(),
                r.beta
            ),
            (1.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn minimax_fallback_for_maj3() {
        let r = m("MAJ3(x1,x2,x3)");
        assert!((r.root_adv() - 2.0).abs() < 1e-3);
        assert!(r.methods.contains(&BoundMethod::Minimax));
    }
}
