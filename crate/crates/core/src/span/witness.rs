//! Witness sizes as equality-constrained least-squares problems.
//!
//! 1-case: minimize `sum_i c_i w_i^2` subject to `A Pi(x) w = t`.
//! 0-case: minimize `sum_i c_i <v_i|w'>^2` (plus `||w'||^2` for the full
//! size) subject to `<t|w'> = 1` and `Pi(x) A^T w' = 0`.
//! Here `c_i = s_j` for `i` in `I_{j,b}`, and for free vectors `c_i` is 0
//! (witness size) or 1 (full witness size).

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::SpanProgram;
use super::VectorKind;
use crate::error::{Error, Result};
use crate::linalg;

/// Relative feasibility tolerance on witnesses.
pub const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `wsize`: free vectors are not charged.
    Size,
    /// `wsizef`: free coordinates cost 1, plus 1 (1-case) or `||w'||^2` (0-case).
    Full,
}

#[derive(Debug, Clone)]
pub struct WitnessResult {
    /// `f_P(x)`.
    pub value: bool,
    /// Witness size at `witness`.
    pub size: f64,
    /// Full witness size at `witness`.
    pub full_size: f64,
    /// 1-case: coefficients over all of `I`, zero off `I(x)`.
    /// 0-case: the vector `w'` in `V`.
    pub witness: DVector<f64>,
    /// Feasibility defect of `witness`.
    pub residual: f64,
    pub objective: Objective,
}

impl WitnessResult {
    /// The optimized measure.
    pub fn optimum(&self) -> f64 {
        match self.objective {
            Objective::Size => self.size,
            Objective::Full => self.full_size,
        }
    }
}

/// `f_P(x)` by comparing `rank(A Pi(x))` with `rank([A Pi(x) | t])`.
pub fn eval_span(program: &SpanProgram, x: &[bool]) -> Result<bool> {
    program.check_input(x)?;
    Ok(eval_unchecked(program, x))
}

pub(crate) fn eval_unchecked(program: &SpanProgram, x: &[bool]) -> bool {
    let t = program.target();
    if t.iter().all(|&v| v == 0.0) {
        return true;
    }
    let avail = available_columns(program, x);
    if avail.ncols() == 0 {
        return false;
    }
    let augmented = avail.clone().insert_column(avail.ncols(), 0.0);
    let mut augmented = augmented;
    augmented.set_column(avail.ncols(), t);
    linalg::rank(&avail) == linalg::rank(&augmented)
}

fn available_columns(program: &SpanProgram, x: &[bool]) -> DMatrix<f64> {
    let idx: Vec<usize> = (0..program.len())
        .filter(|&i| program.kinds()[i].is_available(x))
        .collect();
    program.matrix().select_columns(&idx)
}

fn weights(program: &SpanProgram, costs: &[f64], objective: Objective) -> Vec<f64> {
    let free = match objective {
        Objective::Size => 0.0,
        Objective::Full => 1.0,
    };
    program
        .kinds()
        .iter()
        .map(|k| match k {
            VectorKind::Free => free,
            VectorKind::Input { j, .. } => costs[*j],
        })
        .collect()
}

fn check_costs(program: &SpanProgram, costs: &[f64]) -> Result<()> {
    if costs.len() != program.n() {
        return Err(Error::InvalidCosts(format!(
            "{} costs for a program on {} inputs",
            costs.len(),
            program.n()
        )));
    }
    if costs.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
        return Err(Error::InvalidCosts(
            "costs must be finite and nonnegative".into(),
        ));
    }
    Ok(())
}

pub fn witness_size(program: &SpanProgram, x: &[bool], costs: &[f64]) -> Result<WitnessResult> {
    witness(program, x, costs, Objective::Size)
}

pub fn full_witness_size(
    program: &SpanProgram,
    x: &[bool],
    costs: &[f64],
) -> Result<WitnessResult> {
    witness(program, x, costs, Objective::Full)
}

/// Optimal witness for `f_P(x)` under `objective`; both measures are
/// reported at the returned witness.
pub fn witness(
    program: &SpanProgram,
    x: &[bool],
    costs: &[f64],
    objective: Objective,
) -> Result<WitnessResult> {
    program.check_input(x)?;
    check_costs(program, costs)?;
    let value = eval_unchecked(program, x);
    let c = weights(program, costs, objective);
    if value {
        let (w, residual) = solve_true(program, x, &c, false)?;
        Ok(finish_true(program, costs, w, residual, objective))
    } else {
        let (u, residual) = solve_false(program, x, &c, objective, false)?;
        Ok(finish_false(program, costs, u, residual, objective))
    }
}

/// Like [`witness`], but solves each case a second way (null-space
/// parametrization for the 1-case, a KKT system for the 0-case) and returns
/// the absolute difference between the two optima.
pub fn witness_cross_checked(
    program: &SpanProgram,
    x: &[bool],
    costs: &[f64],
    objective: Objective,
) -> Result<(WitnessResult, f64)> {
    let primary = witness(program, x, costs, objective)?;
    let c = weights(program, costs, objective);
    let secondary = if primary.value {
        let (w, residual) = solve_true(program, x, &c, true)?;
        finish_true(program, costs, w, residual, objective)
    } else {
        let (u, residual) = solve_false(program, x, &c, objective, true)?;
        finish_false(program, costs, u, residual, objective)
    };
    let diff = (primary.optimum() - secondary.optimum()).abs();
    Ok((primary, diff))
}

fn infeasible_if(residual: f64, scale: f64) -> Result<()> {
    if residual > FEASIBILITY_TOL * scale.max(1.0) || !residual.is_finite() {
        return Err(Error::Infeasible { residual });
    }
    Ok(())
}

fn solve_true(
    program: &SpanProgram,
    x: &[bool],
    c: &[f64],
    via_null_space: bool,
) -> Result<(DVector<f64>, f64)> {
    let idx: Vec<usize> = (0..program.len())
        .filter(|&i| program.kinds()[i].is_available(x))
        .collect();
    let m = program.matrix().select_columns(&idx);
    let t = program.target();
    let k = idx.len();
    let local = if k == 0 {
        DVector::zeros(0)
    } else if via_null_space {
        let (w0, null) = linalg::pinv_solve_with_null_space(&m, t);
        if null.ncols() == 0 {
            w0
        } else {
            let sqrt_c = DMatrix::from_diagonal(&DVector::from_iterator(
                k,
                idx.iter().map(|&i| c[i].sqrt()),
            ));
            let bn = &sqrt_c * &null;
            let z = linalg::pinv_solve(&bn, &(-(&sqrt_c * &w0)));
            w0 + null * z
        }
    } else {
        reduced_true(&m, t, &idx.iter().map(|&i| c[i]).collect::<Vec<_>>())
    };
    let residual = if k == 0 {
        t.norm()
    } else {
        (&m * &local - t).norm()
    };
    infeasible_if(residual, t.norm())?;
    let mut w = DVector::zeros(program.len());
    for (a, &i) in idx.iter().enumerate() {
        w[i] = local[a];
    }
    Ok((w, residual))
}

/// Uncharged columns `F` are projected out; on the charged columns `R` the
/// substitution `v = C^{1/2} w_R` turns the problem into a plain minimum-norm
/// solve. `w_F` then absorbs the remainder of `t`.
fn reduced_true(m: &DMatrix<f64>, t: &DVector<f64>, c: &[f64]) -> DVector<f64> {
    let k = c.len();
    let free: Vec<usize> = (0..k).filter(|&a| c[a] == 0.0).collect();
    let charged: Vec<usize> = (0..k).filter(|&a| c[a] > 0.0).collect();
    let mf = m.select_columns(&free);
    let mr = m.select_columns(&charged);
    let basis = linalg::range_basis(&mf);
    let project = |a: &DMatrix<f64>| a - &basis * (basis.transpose() * a);
    let qt = t - &basis * (basis.transpose() * t);
    let inv_sqrt =
        DVector::from_iterator(charged.len(), charged.iter().map(|&a| c[a].sqrt().recip()));
    let mut scaled = project(&mr);
    for (col, s) in inv_sqrt.iter().enumerate() {
        scaled.column_mut(col).scale_mut(*s);
    }
    let wr = linalg::pinv_solve(&scaled, &qt).component_mul(&inv_sqrt);
    let wf = linalg::pinv_solve(&mf, &(t - &mr * &wr));
    let mut w = DVector::zeros(k);
    for (a, &col) in free.iter().enumerate() {
        w[col] = wf[a];
    }
    for (a, &col) in charged.iter().enumerate() {
        w[col] = wr[a];
    }
    w
}

fn finish_true(
    program: &SpanProgram,
    costs: &[f64],
    w: DVector<f64>,
    residual: f64,
    objective: Objective,
) -> WitnessResult {
    let mut size = 0.0;
    let mut free = 0.0;
    for (i, kind) in program.kinds().iter().enumerate() {
        match kind {
            VectorKind::Free => free += w[i] * w[i],
            VectorKind::Input { j, .. } => size += costs[*j] * w[i] * w[i],
        }
    }
    WitnessResult {
        value: true,
        size,
        full_size: 1.0 + free + size,
        witness: w,
        residual,
        objective,
    }
}

fn solve_false(
    program: &SpanProgram,
    x: &[bool],
    c: &[f64],
    objective: Objective,
    via_kkt: bool,
) -> Result<(DVector<f64>, f64)> {
    let a = program.matrix();
    let t = program.target();
    let d = t.len();
    let avail: Vec<usize> = (0..program.len())
        .filter(|&i| program.kinds()[i].is_available(x))
        .collect();
    // Constraint rows: t^T, then v_i^T for available i.
    let mut g = DMatrix::zeros(1 + avail.len(), d);
    g.set_row(0, &t.transpose());
    for (r, &i) in avail.iter().enumerate() {
        g.set_row(r + 1, &a.column(i).transpose());
    }
    let mut e = DVector::zeros(1 + avail.len());
    e[0] = 1.0;
    // Objective ||B u||^2.
    let charged: Vec<usize> = (0..program.len()).filter(|&i| c[i] > 0.0).collect();
    let extra = if objective == Objective::Full { d } else { 0 };
    let mut b = DMatrix::zeros(charged.len() + extra, d);
    for (r, &i) in charged.iter().enumerate() {
        b.set_row(r, &(a.column(i).transpose() * c[i].sqrt()));
    }
    if extra > 0 {
        b.view_mut((charged.len(), 0), (d, d))
            .copy_from(&DMatrix::identity(d, d));
    }
    let u = if via_kkt {
        // Augmented KKT system in (mu, u, lambda), with mu = B u:
        // [[-I, B, 0], [B^T, 0, G^T], [0, G, 0]] = [0, 0, e].
        let (p, rows) = (b.nrows(), g.nrows());
        let size = p + d + rows;
        let mut kkt = DMatrix::zeros(size, size);
        kkt.view_mut((0, 0), (p, p)).fill_with_identity();
        kkt.view_mut((0, 0), (p, p)).neg_mut();
        kkt.view_mut((0, p), (p, d)).copy_from(&b);
        kkt.view_mut((p, 0), (d, p)).copy_from(&b.transpose());
        kkt.view_mut((p, p + d), (d, rows))
            .copy_from(&g.transpose());
        kkt.view_mut((p + d, p), (rows, d)).copy_from(&g);
        let mut rhs = DVector::zeros(size);
        rhs.rows_mut(p + d, rows).copy_from(&e);
        linalg::pinv_solve(&kkt, &rhs).rows(p, d).into_owned()
    } else {
        let (u0, null) = linalg::pinv_solve_with_null_space(&g, &e);
        if null.ncols() == 0 || b.nrows() == 0 {
            u0
        } else {
            let bn = &b * &null;
            let z = linalg::pinv_solve(&bn, &(-(&b * &u0)));
            u0 + null * z
        }
    };
    let residual = (&g * &u - e).norm();
    infeasible_if(residual, 1.0)?;
    Ok((u, residual))
}

fn finish_false(
    program: &SpanProgram,
    costs: &[f64],
    u: DVector<f64>,
    residual: f64,
    objective: Objective,
) -> WitnessResult {
    let a = program.matrix();
    let mut size = 0.0;
    for (i, kind) in program.kinds().iter().enumerate() {
        if let VectorKind::Input { j, .. } = kind {
            let overlap = a.column(i).dot(&u);
            size += costs[*j] * overlap * overlap;
        }
    }
    WitnessResult {
        value: false,
        size,
        full_size: u.norm_squared() + size,
        witness: u,
        residual,
        objective,
    }
}
