//! Adversary bounds with costs: closed forms, the minimax solver and
//! certificate checking.

mod minimax;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use minimax::{adv_minimax, MinimaxOptions, MinimaxResult, MAX_MINIMAX_ARITY};

use crate::error::{Error, Result};
use crate::formula::{metrics, BoundMethod, Formula, GateBound, GateSpec};
use crate::linalg;

/// Slack allowed on `||Gamma o Delta_j|| <= s_j` when checking certificates.
pub const CERTIFICATE_SLACK: f64 = 1e-9;

/// `sqrt(sum s_j^2)`: the adversary bound of AND and OR with costs `s`.
pub fn adv_closed_form_andor(costs: &[f64]) -> f64 {
    costs.iter().map(|s| s * s).sum::<f64>().sqrt()
}

/// `ADV(phi)` computed bottom-up through the composition theorem.
pub fn adv_formula(formula: &Formula, bounds: &dyn GateBound) -> Result<f64> {
    Ok(metrics(formula, bounds)?.root_adv())
}

/// `Delta_j`: ones where `x` and `y` differ in input `j` (0-based).
pub fn difference_mask(k: usize, j: usize) -> DMatrix<f64> {
    let bit = 1usize << (k - 1 - j);
    DMatrix::from_fn(
        1 << k,
        1 << k,
        |x, y| if (x ^ y) & bit != 0 { 1.0 } else { 0.0 },
    )
}

/// Checks that `gamma` is an adversary matrix for `gate` with
/// `||gamma o Delta_j|| <= s_j`, and returns `||gamma||`, a lower bound on
/// the general adversary bound with costs `s`.
pub fn validate_adversary_matrix(
    gate: &GateSpec,
    gamma: &DMatrix<f64>,
    costs: &[f64],
) -> Result<f64> {
    let k = gate.arity();
    let size = 1usize << k;
    if gamma.shape() != (size, size) {
        return Err(Error::Dimension(format!(
            "adversary matrix for a {k}-bit gate must be {size}x{size}, got {}x{}",
            gamma.nrows(),
            gamma.ncols()
        )));
    }
    if costs.len() != k {
        return Err(Error::InvalidCosts(format!(
            "{} costs given for a {k}-bit gate",
            costs.len()
        )));
    }
    let scale = gamma.amax().max(1.0);
    let mut violations = Vec::new();
    for x in 0..size {
        for y in 0..size {
            let value = gamma[(x, y)];
            if !value.is_finite() {
                violations.push(format!("entry ({x},{y}) is not finite"));
                continue;
            }
            if y > x && (value - gamma[(y, x)]).abs() > 1e-12 * scale {
                violations.push(format!("not symmetric at ({x},{y})"));
            }
            if gate.eval_index(x) == gate.eval_index(y) && value != 0.0 {
                violations.push(format!(
                    "entry ({x},{y}) = {value} but the gate agrees on both inputs"
                ));
            }
        }
    }
    if violations.is_empty() {
        for (j, &s) in costs.iter().enumerate() {
            let masked = gamma.component_mul(&difference_mask(k, j));
            let norm = linalg::spectral_norm(&masked);
            if norm > s + CERTIFICATE_SLACK {
                violations.push(format!(
                    "||Gamma o Delta_{}|| = {norm} exceeds s_{} = {s}",
                    j + 1,
                    j + 1
                ));
            }
        }
    }
    if !violations.is_empty() {
        return Err(Error::InfeasibleCertificate(violations));
    }
    Ok(linalg::spectral_norm(gamma))
}

/// Certificate file contents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub gate: String,
    pub costs: Vec<f64>,
    pub gamma: Vec<Vec<f64>>,
}

impl Certificate {
    pub fn matrix(&self) -> Result<DMatrix<f64>> {
        let rows = self.gamma.len();
        if self.gamma.iter().any(|row| row.len() != rows) {
            return Err(Error::Schema("gamma must be a square array".into()));
        }
        Ok(DMatrix::from_fn(rows, rows, |i, j| self.gamma[i][j]))
    }
}

/// Reported bound with the method that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub bound: f64,
    pub method: BoundMethod,
    pub tolerance: f64,
}
