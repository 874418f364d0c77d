//! Weighted minimax form of the nonnegative adversary bound,
//!
//! `ADV_s(g) = min_p max_{g(x) != g(y)} 1 / sum_{j: x_j != y_j} sqrt(p_x(j) p_y(j)) / s_j`,
//!
//! solved as `max_p min_{pairs} F_xy(p)`. Each `F_xy` is a sum of geometric
//! means, hence concave, so the outer problem is a concave maximization over
//! a product of simplices. A projected supergradient search with random
//! restarts finds the basin; a log-barrier Newton method then drives the
//! duality gap below the tolerance and yields a two-sided bracket.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formula::GateSpec;

pub const MAX_MINIMAX_ARITY: usize = 4;

#[derive(Debug, Clone)]
pub struct MinimaxOptions {
    pub seed: u64,
    pub restarts: usize,
    pub iterations: usize,
    /// Largest accepted width of the `[lower, upper]` bracket.
    pub tolerance: f64,
}

impl Default for MinimaxOptions {
    fn default() -> Self {
        MinimaxOptions {
            seed: 0,
            restarts: 64,
            iterations: 300,
            tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimaxResult {
    /// `1 / min_pairs F(p)` at the returned distributions; an upper bound on
    /// the true value.
    pub value: f64,
    /// Lower bound from the barrier duality gap.
    pub lower: f64,
    /// Best value found by the restart phase alone.
    pub restart_value: f64,
    /// One distribution over the relevant inputs per truth-table index of the
    /// gate restricted to its relevant inputs.
    pub distributions: Vec<Vec<f64>>,
    /// 0-based gate inputs the distributions range over.
    pub relevant: Vec<usize>,
}

struct Problem {
    k: usize,
    /// Pairs `(x, y)` with `g(x) != g(y)` and their differing coordinates.
    pairs: Vec<(usize, usize, Vec<usize>)>,
    /// Reciprocal costs.
    w: Vec<f64>,
}

impl Problem {
    fn var(&self, x: usize, j: usize) -> usize {
        x * self.k + j
    }

    fn num_vars(&self) -> usize {
        (1 << self.k) * self.k
    }

    fn pair_value(&self, p: &[f64], pair: usize) -> f64 {
        let (x, y, ref diff) = self.pairs[pair];
        diff.iter()
            .map(|&j| self.w[j] * (p[self.var(x, j)] * p[self.var(y, j)]).sqrt())
            .sum()
    }

    fn objective(&self, p: &[f64]) -> f64 {
        (0..self.pairs.len())
            .map(|i| self.pair_value(p, i))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Solves the minimax formulation for a gate of arity at most 4.
///
/// Inputs the gate does not depend on are dropped first, so their costs may
/// be zero; relevant inputs need strictly positive costs.
pub fn adv_minimax(
    gate: &GateSpec,
    costs: &[f64],
    options: &MinimaxOptions,
) -> Result<MinimaxResult> {
    if costs.len() != gate.arity() {
        return Err(Error::InvalidCosts(format!(
            "gate `{}` has {} inputs but {} costs were given",
            gate.name(),
            gate.arity(),
            costs.len()
        )));
    }
    if costs.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::InvalidCosts(
            "costs must be finite and nonnegative".into(),
        ));
    }
    let relevant = gate.relevant_inputs();
    if relevant.is_empty() {
        return Ok(MinimaxResult {
            value: 0.0,
            lower: 0.0,
            restart_value: 0.0,
            distributions: vec![Vec::new()],
            relevant,
        });
    }
    if relevant.len() > MAX_MINIMAX_ARITY {
        return Err(Error::ArityTooLarge(relevant.len()));
    }
    let mut fixed = vec![Some(false); gate.arity()];
    for &j in &relevant {
        fixed[j] = None;
    }
    let g = gate.restrict(&fixed);
    let s: Vec<f64> = relevant.iter().map(|&j| costs[j]).collect();
    if s.iter().any(|&c| c <= 0.0) {
        return Err(Error::InvalidCosts(
            "relevant inputs need strictly positive costs".into(),
        ));
    }
    // Work with costs scaled to max 1 so the result scales exactly.
    let scale = s.iter().cloned().fold(0.0, f64::max);
    let k = s.len();
    let size = 1usize << k;
    let mut pairs = Vec::new();
    for x in 0..size {
        for y in x + 1..size {
            if g.eval_index(x) != g.eval_index(y) {
                let diff = (0..k)
                    .filter(|&j| (x ^ y) >> (k - 1 - j) & 1 == 1)
                    .collect();
                pairs.push((x, y, diff));
            }
        }
    }
    let problem = Problem {
        k,
        pairs,
        w: s.iter().map(|c| scale / c).collect(),
    };

    let runs: Vec<(f64, Vec<f64>)> = (0..options.restarts.max(1))
        .into_par_iter()
        .map(|r| restart(&problem, options.seed, r as u64, options.iterations))
        .collect();
    let (best_f, best_p) = runs
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), |acc, run| {
            if run.0 > acc.0 {
                run
            } else {
                acc
            }
        });

    let (p, t, gap) = barrier(&problem, &best_p);
    let (p, f) = {
        let f = problem.objective(&p);
        if f >= best_f {
            (p, f)
        } else {
            (best_p, best_f)
        }
    };
    let upper = scale / f;
    let lower = scale / (t.max(f) + gap).max(f);
    let restart_value = scale / best_f;
    if !(upper - lower <= options.tolerance) {
        return Err(Error::NoConvergence { lower, upper });
    }
    let distributions = (0..size).map(|x| p[x * k..(x + 1) * k].to_vec()).collect();
    Ok(MinimaxResult {
        value: upper,
        lower,
        restart_value,
        distributions,
        relevant,
    })
}

fn restart(problem: &Problem, seed: u64, index: u64, iterations: usize) -> (f64, Vec<f64>) {
    let k = problem.k;
    let size = 1usize << k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut p = vec![0.0; problem.num_vars()];
    for x in 0..size {
        let row = &mut p[x * k..(x + 1) * k];
        for v in row.iter_mut() {
            *v = -rng.gen::<f64>().max(1e-300).ln();
        }
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= total);
    }
    let mut best = (problem.objective(&p), p.clone());
    let mut grad = vec![0.0; p.len()];
    for it in 0..iterations {
        let values: Vec<f64> = (0..problem.pairs.len())
            .map(|i| problem.pair_value(&p, i))
            .collect();
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        grad.iter_mut().for_each(|g| *g = 0.0);
        for (i, &value) in values.iter().enumerate() {
            if value > min + 1e-12 * min.abs().max(1.0) {
                continue;
            }
            let (x, y, ref diff) = problem.pairs[i];
            for &j in diff {
                let a = p[problem.var(x, j)].max(1e-12);
                let b = p[problem.var(y, j)].max(1e-12);
                grad[problem.var(x, j)] += 0.5 * problem.w[j] * (b / a).sqrt();
                grad[problem.var(y, j)] += 0.5 * problem.w[j] * (a / b).sqrt();
            }
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        let step = 0.5 / ((it + 1) as f64).sqrt();
        for (pi, gi) in p.iter_mut().zip(&grad) {
            *pi += step * gi / norm;
        }
        for x in 0..size {
            project_simplex(&mut p[x * k..(x + 1) * k]);
        }
        let f = problem.objective(&p);
        if f > best.0 {
            best = (f, p.clone());
        }
    }
    best
}

/// Euclidean projection onto the probability simplex.
pub(crate) fn project_simplex(v: &mut [f64]) {
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (i + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
}

/// Log-barrier Newton method for `max t` s.t. `F_i(p) >= t`, `p > 0`,
/// `sum_j p_x(j) = 1`. Returns the final point, its `t`, and the duality-gap
/// bound `m / T` on the optimal `t`.
fn barrier(problem: &Problem, start: &[f64]) -> (Vec<f64>, f64, f64) {
    let k = problem.k;
    let size = 1usize << k;
    let nv = problem.num_vars();
    let m = problem.pairs.len() + nv;
    let uniform = 1.0 / k as f64;
    let mut p: Vec<f64> = start.iter().map(|&v| 0.9 * v + 0.1 * uniform).collect();
    let mut t = 0.5 * problem.objective(&p);
    let mut big_t = 1.0;
    let dim = nv + 1 + size;

    let value = |p: &[f64], t: f64, big_t: f64| -> f64 {
        let mut total = -big_t * t;
        for i in 0..problem.pairs.len() {
            let d = problem.pair_value(p, i) - t;
            if d <= 0.0 {
                return f64::INFINITY;
            }
            total -= d.ln();
        }
        for &v in p {
            if v <= 0.0 {
                return f64::INFINITY;
            }
            total -= v.ln();
        }
        total
    };

    loop {
        for _ in 0..100 {
            let mut grad = DVector::<f64>::zeros(nv + 1);
            let mut hess = DMatrix::<f64>::zeros(nv + 1, nv + 1);
            grad[nv] = -big_t;
            for i in 0..problem.pairs.len() {
                let (x, y, ref diff) = problem.pairs[i];
                let d = problem.pair_value(&p, i) - t;
                let mut gd = Vec::with_capacity(2 * diff.len() + 1);
                for &j in diff {
                    let (ix, iy) = (problem.var(x, j), problem.var(y, j));
                    let (a, b) = (p[ix], p[iy]);
                    let w = problem.w[j];
                    let r = (a * b).sqrt();
                    gd.push((ix, 0.5 * w * (b / a).sqrt()));
                    gd.push((iy, 0.5 * w * (a / b).sqrt()));
                    // -Hessian of F_i / d, which is positive semidefinite.
                    hess[(ix, ix)] += 0.25 * w * b.sqrt() * a.powf(-1.5) / d;
                    hess[(iy, iy)] += 0.25 * w * a.sqrt() * b.powf(-1.5) / d;
                    hess[(ix, iy)] -= 0.25 * w / r / d;
                    hess[(iy, ix)] -= 0.25 * w / r / d;
                }
                gd.push((nv, -1.0));
                for &(u, gu) in &gd {
                    grad[u] -= gu / d;
                    for &(v, gv) in &gd {
                        hess[(u, v)] += gu * gv / (d * d);
                    }
                }
            }
            for (u, &v) in p.iter().enumerate() {
                grad[u] -= 1.0 / v;
                hess[(u, u)] += 1.0 / (v * v);
            }
            let mut kkt = DMatrix::<f64>::zeros(dim, dim);
            kkt.view_mut((0, 0), (nv + 1, nv + 1)).copy_from(&hess);
            for x in 0..size {
                for j in 0..k {
                    kkt[(nv + 1 + x, x * k + j)] = 1.0;
                    kkt[(x * k + j, nv + 1 + x)] = 1.0;
                }
            }
            let mut rhs = DVector::<f64>::zeros(dim);
            rhs.rows_mut(0, nv + 1).copy_from(&(-&grad));
            let Some(sol) = kkt.lu().solve(&rhs) else {
                break;
            };
            let step = sol.rows(0, nv + 1).into_owned();
            let decrement = -grad.dot(&step);
            if decrement / 2.0 < 1e-12 {
                break;
            }
            let current = value(&p, t, big_t);
            let mut alpha = 1.0;
            let mut moved = false;
            while alpha > 1e-14 {
                let q: Vec<f64> = p
                    .iter()
                    .enumerate()
                    .map(|(u, &v)| v + alpha * step[u])
                    .collect();
                let tq = t + alpha * step[nv];
                let candidate = value(&q, tq, big_t);
                if candidate <= current - 0.25 * alpha * decrement {
                    p = q;
                    t = tq;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let gap = m as f64 / big_t;
        if gap < 1e-11 || big_t > 1e14 {
            return (p, t, gap);
        }
        big_t *= 10.0;
    }
}
