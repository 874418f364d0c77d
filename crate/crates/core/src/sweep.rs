//! Formula families, the test corpus, and the CSV sweep.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{metrics, parse, to_nand_form, Expr, Formula, Registry, StandardBounds};
use crate::numfmt::g12;
use crate::span::compose_formula;
use crate::spectra::{biadjacency, spectral_report, tree_from_form};
use crate::verify::{sample_inputs, SuiteOptions};

/// Formula of the worked example with seven inputs.
pub const PSI: &str = "OR(AND(OR(AND(x1,x2),x3),x4),AND(x5,OR(x6,x7)))";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    #[serde(rename = "balanced-andor")]
    BalancedAndOr,
    #[serde(rename = "skew-andor")]
    SkewAndOr,
    #[serde(rename = "random-andor")]
    RandomAndOr,
}

impl Family {
    pub const ALL: [Family; 3] = [
        Family::BalancedAndOr,
        Family::SkewAndOr,
        Family::RandomAndOr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::BalancedAndOr => "balanced-andor",
            Family::SkewAndOr => "skew-andor",
            Family::RandomAndOr => "random-andor",
        }
    }

    /// Member of size `n`; only the random family uses `seed`.
    pub fn formula(self, n: usize, seed: u64) -> Result<Formula> {
        if n == 0 {
            return Err(Error::Malformed("formulas need at least one input".into()));
        }
        match self {
            Family::BalancedAndOr => balanced_andor(n),
            Family::SkewAndOr => skew_andor(n),
            Family::RandomAndOr => random_andor(n, &mut instance_rng(seed, n)),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown family `{s}`")))
    }
}

fn instance_rng(seed: u64, n: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x2545_f491_4f6c_dd1d) ^ n as u64)
}

/// Balanced split (left part gets the extra leaf), OR at the root and
/// alternating by level.
pub fn balanced_andor(n: usize) -> Result<Formula> {
    fn build(first: usize, n: usize, or: bool) -> Expr {
        if n == 1 {
            return Expr::var(first);
        }
        let left = n.div_ceil(2);
        let children = vec![build(first, left, !or), build(first + left, n - left, !or)];
        if or {
            Expr::or(children)
        } else {
            Expr::and(children)
        }
    }
    Formula::new(build(1, n, true))
}

/// `g_1 = AND(x1,x2)`, then `g_k = OR(g_{k-1}, x_{k+1})` for even `k` and
/// `AND(...)` for odd `k`.
pub fn skew_andor(n: usize) -> Result<Formula> {
    let mut expr = Expr::var(1);
    for k in 1..n {
        let children = vec![expr, Expr::var(k + 1)];
        expr = if k % 2 == 0 {
            Expr::or(children)
        } else {
            Expr::and(children)
        };
    }
    Formula::new(expr)
}

/// Recursive split at a uniform point with a uniformly random gate at each
/// vertex.
pub fn random_andor(n: usize, rng: &mut impl Rng) -> Result<Formula> {
    fn build(first: usize, n: usize, rng: &mut impl Rng) -> Expr {
        if n == 1 {
            return Expr::var(first);
        }
        let left = rng.gen_range(1..n);
        let or = rng.gen::<bool>();
        let children = vec![build(first, left, rng), build(first + left, n - left, rng)];
        if or {
            Expr::or(children)
        } else {
            Expr::and(children)
        }
    }
    Formula::new(build(1, n, rng))
}

/// Sizes given as `A..B` (inclusive, empty when `A > B`) or a comma list.
pub fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    let number = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::Malformed(format!("bad size `{s}` in `{text}`")))
    };
    if let Some((a, b)) = text.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        return Ok((number(a)?..=number(b)?).collect());
    }
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(number).collect()
}

/// Fifty AND-OR formulas on at most 12 inputs: balanced sizes 1 to 12,
/// skew sizes 2 to 12, the seven-input example, and 26 seeded random
/// formulas.
pub fn corpus() -> Vec<(String, Formula)> {
    let mut out = Vec::new();
    for n in 1..=12 {
        out.push((format!("balanced-{n}"), balanced_andor(n).expect("valid")));
    }
    for n in 2..=12 {
        out.push((format!("skew-{n}"), skew_andor(n).expect("valid")));
    }
    out.push((
        "psi".to_string(),
        parse(PSI, &Registry::standard()).expect("valid"),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..26 {
        let n = rng.gen_range(2..=12);
        out.push((
            format!("random-{i}"),
            random_andor(n, &mut rng).expect("valid"),
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub family: Family,
    pub instance: String,
    pub n: usize,
    pub adv: f64,
    pub sigma_minus: f64,
    pub wsize: f64,
    pub wsizef: f64,
    pub abs_norm: f64,
    pub t_est: f64,
    /// Smallest positive NAND-tree eigenvalue over the sampled inputs.
    pub gap: Option<f64>,
}

pub const CSV_HEADER: &str = "family,instance,n,adv,sigma_minus,wsize,wsizef,abs_norm,t_est,gap";

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.instance,
            self.n,
            g12(self.adv),
            g12(self.sigma_minus),
            g12(self.wsize),
            g12(self.wsizef),
            g12(self.abs_norm),
            g12(self.t_est),
            self.gap.map(g12).unwrap_or_default()
        )
    }
}

/// Inputs used for the gap column: exhaustive up to 10 bits.
pub fn gap_options(seed: u64) -> SuiteOptions {
    SuiteOptions {
        exhaustive_limit: 10,
        samples: 32,
        seed,
    }
}

/// Measures of one formula. Witness sizes come from the composition
/// recursion, so any size is affordable.
pub fn measure(family: Family, instance: String, formula: &Formula, seed: u64) -> Result<SweepRow> {
    let m = metrics(formula, &StandardBounds::default())?;
    let composed = compose_formula(formula)?;
    let wsize = composed.witness_size()?;
    let wsizef = composed.full_witness_size()?;
    let abs_norm = biadjacency(composed.program()).abs_norm();
    let form = to_nand_form(formula)?;
    let gap = sample_inputs(formula.num_vars(), &gap_options(seed))
        .iter()
        .filter_map(|x| spectral_report(tree_from_form(&form, x, None).adjacency(), None).gap)
        .reduce(f64::min);
    Ok(SweepRow {
        family,
        instance,
        n: formula.num_vars(),
        adv: m.root_adv(),
        sigma_minus: m.root_sigma_minus(),
        wsize,
        wsizef,
        abs_norm,
        t_est: wsizef * abs_norm,
        gap,
    })
}

/// One row per size, in the order given, whatever order they finish in.
pub fn sweep(family: Family, sizes: &[usize], seed: u64) -> Result<Vec<SweepRow>> {
    sizes
        .par_iter()
        .map(|&n| {
            let formula = family.formula(n, seed)?;
            measure(family, format!("{family}-n{n}"), &formula, seed)
        })
        .collect()
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::index_to_bits;

    #[test]
    fn families() {
        assert_eq!(
            balanced_andor(4).unwrap().to_string(),
            "OR(AND(x1,x2),AND(x3,x4))"
        );
        assert_eq!(balanced_andor(3).unwrap().to_string(), "OR(AND(x1,x2),x3)");
        assert_eq!(
            skew_andor(4).unwrap().to_string(),
            "AND(OR(AND(x1,x2),x3),x4)"
        );
        assert_eq!(skew_andor(1).unwrap().to_string(), "x1");
        let a = Family::RandomAndOr.formula(9, 3).unwrap().to_string();
        assert_eq!(a, Family::RandomAndOr.formula(9, 3).unwrap().to_string());
        assert!(Family::BalancedAndOr.formula(0, 0).is_err());
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_sizes("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_sizes("2,4,8").unwrap(), vec![2, 4, 8]);
        assert!(parse_sizes("5..2").unwrap().is_empty());
        assert!(parse_sizes("x").is_err());
    }

    #[test]
    fn corpus_shape() {
        let c = corpus();
        assert_eq!(c.len(), 50);
        assert!(c.iter().all(|(_, f)| f.num_vars() <= 12 && f.is_and_or()));
        let psi = &c.iter().find(|(n, _)| n == "psi").unwrap().1;
        let x = |s: &str| s.chars().map(|c| c == '1').collect::<Vec<_>>();
        assert!(!psi.evaluate(&x("0010000")).unwrap());
        assert!(psi.evaluate(&x("0011000")).unwrap());
        assert_eq!(index_to_bits(0, 0).len(), 0);
    }

    #[test]
    fn sweep_rows() {
        let rows = sweep(Family::BalancedAndOr, &[2, 4], 0).unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[1].adv - 2.0).abs() < 1e-12);
        assert!((rows[1].wsize - 2.0).abs() < 1e-9);
        let csv = to_csv(&rows);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 3);
        assert_eq!(to_csv(&[]), format!("{CSV_HEADER}\n"));
    }
}
