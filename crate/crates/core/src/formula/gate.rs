use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::span::ProgramPair;

pub const MAX_ARITY: usize = 8;

/// Closed-form map from a cost vector to the gate's general adversary bound.
#[derive(Clone)]
pub enum CostBound {
    /// `sqrt(sum s_j^2)`, exact for AND and OR up to input and output negations.
    Euclidean,
    Custom(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl CostBound {
    pub fn evaluate(&self, costs: &[f64]) -> f64 {
        match self {
            CostBound::Euclidean => costs.iter().map(|s| s * s).sum::<f64>().sqrt(),
            CostBound::Custom(f) => f(costs),
        }
    }
}

impl fmt::Debug for CostBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostBound::Euclidean => f.write_str("Euclidean"),
            CostBound::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AndOr {
    And,
    Or,
}

/// A k-bit boolean gate given by its truth table.
///
/// Truth-table index of an input `(x_1, ..., x_k)` is `sum x_j 2^(k-j)`, so
/// `x_1` is the most significant bit and `00..0` comes first.
#[derive(Debug, Clone)]
pub struct GateSpec {
    name: String,
    arity: usize,
    truth_table: Vec<bool>,
    cost_bound: Option<CostBound>,
    programs: Option<Arc<ProgramPair>>,
}

impl GateSpec {
    pub fn new(name: impl Into<String>, arity: usize, truth_table: Vec<bool>) -> Result<Self> {
        let name = name.into();
        if arity > MAX_ARITY {
            return Err(Error::InvalidGate(format!(
                "`{name}` has arity {arity}, maximum is {MAX_ARITY}"
            )));
        }
        if truth_table.len() != 1 << arity {
            return Err(Error::InvalidGate(format!(
                "`{name}` has arity {arity} but its truth table has {} entries, expected {}",
                truth_table.len(),
                1usize << arity
            )));
        }
        let mut gate = GateSpec {
            name,
            arity,
            truth_table,
            cost_bound: None,
            programs: None,
        };
        if gate.is_and_or_type() {
            gate.cost_bound = Some(CostBound::Euclidean);
        }
        Ok(gate)
    }

    /// Gate with a name derived from its truth table (see [`derived_name`]).
    pub fn from_truth_table(truth_table: Vec<bool>) -> Result<Self> {
        let arity = truth_table.len().trailing_zeros() as usize;
        if !truth_table.len().is_power_of_two() {
            return Err(Error::InvalidGate(format!(
                "truth table length {} is not a power of two",
                truth_table.len()
            )));
        }
        GateSpec::new(derived_name(&truth_table), arity, truth_table)
    }

    fn tabulate(name: &str, arity: usize, f: impl Fn(usize) -> bool) -> Self {
        GateSpec::new(name, arity, (0..1usize << arity).map(f).collect())
            .expect("builtin gate is well formed")
    }

    pub fn and(k: usize) -> Self {
        GateSpec::tabulate("AND", k, |i| i == (1 << k) - 1)
    }

    pub fn or(k: usize) -> Self {
        GateSpec::tabulate("OR", k, |i| i != 0)
    }

    pub fn nand(k: usize) -> Self {
        GateSpec::tabulate("NAND", k, |i| i != (1 << k) - 1)
    }

    pub fn nor(k: usize) -> Self {
        GateSpec::tabulate("NOR", k, |i| i == 0)
    }

    pub fn xor(k: usize) -> Self {
        GateSpec::tabulate("XOR", k, |i| i.count_ones() % 2 == 1)
    }

    pub fn not() -> Self {
        GateSpec::tabulate("NOT", 1, |i| i == 0)
    }

    pub fn constant(value: bool) -> Self {
        GateSpec::tabulate(if value { "CONST1" } else { "CONST0" }, 0, |_| value)
    }

    pub fn maj3() -> Self {
        GateSpec::tabulate("MAJ3", 3, |i| i.count_ones() >= 2)
    }

    pub fn with_cost_bound(mut self, bound: CostBound) -> Self {
        self.cost_bound = Some(bound);
        self
    }

    pub fn with_programs(mut self, programs: ProgramPair) -> Self {
        self.programs = Some(Arc::new(programs));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn truth_table(&self) -> &[bool] {
        &self.truth_table
    }

    pub fn cost_bound(&self) -> Option<&CostBound> {
        self.cost_bound.as_ref()
    }

    pub fn programs(&self) -> Option<&ProgramPair> {
        self.programs.as_deref()
    }

    pub fn truth_table_string(&self) -> String {
        self.truth_table
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn eval_index(&self, index: usize) -> bool {
        self.truth_table[index]
    }

    pub fn eval(&self, inputs: &[bool]) -> bool {
        debug_assert_eq!(inputs.len(), self.arity);
        self.truth_table[bits_to_index(inputs)]
    }

    /// Bit mask of input `j` (0-based) inside a truth-table index.
    fn mask(&self, j: usize) -> usize {
        1 << (self.arity - 1 - j)
    }

    pub fn depends_on(&self, j: usize) -> bool {
        let m = self.mask(j);
        (0..self.truth_table.len())
            .filter(|i| i & m == 0)
            .any(|i| self.truth_table[i] != self.truth_table[i | m])
    }

    /// 0-based indices of inputs the gate depends on.
    pub fn relevant_inputs(&self) -> Vec<usize> {
        (0..self.arity).filter(|&j| self.depends_on(j)).collect()
    }

    pub fn is_constant(&self) -> Option<bool> {
        let first = *self.truth_table.first()?;
        self.truth_table
            .iter()
            .all(|&b| b == first)
            .then_some(first)
    }

    /// True when exactly one truth-table entry differs from the rest: AND or
    /// OR with some inputs and possibly the output negated.
    pub fn is_and_or_type(&self) -> bool {
        if self.arity == 0 {
            return false;
        }
        let ones = self.truth_table.iter().filter(|&&b| b).count();
        ones == 1 || ones == self.truth_table.len() - 1
    }

    /// Monotone AND or OR of arity at least two.
    pub fn and_or(&self) -> Option<AndOr> {
        if self.arity < 2 {
            return None;
        }
        let last = self.truth_table.len() - 1;
        let and = (0..=last).all(|i| self.truth_table[i] == (i == last));
        let or = (0..=last).all(|i| self.truth_table[i] == (i != 0));
        if and {
            Some(AndOr::And)
        } else if or {
            Some(AndOr::Or)
        } else {
            None
        }
    }

    /// Output-negated gate. A custom cost bound carries over since negating
    /// the output leaves the adversary bound unchanged; attached programs are
    /// swapped when a dual is available and dropped otherwise.
    pub fn complement(&self) -> GateSpec {
        let tt: Vec<bool> = self.truth_table.iter().map(|b| !b).collect();
        let mut gate = GateSpec::new(derived_name(&tt), self.arity, tt).expect("same shape");
        if let Some(CostBound::Custom(f)) = &self.cost_bound {
            gate.cost_bound = Some(CostBound::Custom(f.clone()));
        }
        if let Some(pair) = &self.programs {
            if let Some(negative) = &pair.negative {
                gate.programs = Some(Arc::new(ProgramPair {
                    positive: negative.clone(),
                    negative: Some(pair.positive.clone()),
                }));
            }
        }
        gate
    }

    /// Gate of the same arity whose input `j` is negated wherever `flip[j]`.
    pub fn flip_inputs(&self, flip: &[bool]) -> GateSpec {
        let m: usize = (0..self.arity)
            .filter(|&j| flip[j])
            .map(|j| self.mask(j))
            .sum();
        if m == 0 {
            return self.clone();
        }
        let tt: Vec<bool> = (0..self.truth_table.len())
            .map(|i| self.truth_table[i ^ m])
            .collect();
        let mut gate = GateSpec::new(derived_name(&tt), self.arity, tt).expect("same shape");
        if let Some(CostBound::Custom(f)) = &self.cost_bound {
            gate.cost_bound = Some(CostBound::Custom(f.clone()));
        }
        gate
    }

    /// Fixes some inputs to constants and keeps the rest in order.
    pub fn restrict(&self, fixed: &[Option<bool>]) -> GateSpec {
        debug_assert_eq!(fixed.len(), self.arity);
        let free: Vec<usize> = (0..self.arity).filter(|&j| fixed[j].is_none()).collect();
        let base: usize = (0..self.arity)
            .filter(|&j| fixed[j] == Some(true))
            .map(|j| self.mask(j))
            .sum();
        let k = free.len();
        let tt: Vec<bool> = (0..1usize << k)
            .map(|sub| {
                let mut index = base;
                for (pos, &j) in free.iter().enumerate() {
                    if sub & (1 << (k - 1 - pos)) != 0 {
                        index |= self.mask(j);
                    }
                }
                self.truth_table[index]
            })
            .collect();
        GateSpec::new(derived_name(&tt), k, tt).expect("sub-table is well formed")
    }
}

impl PartialEq for GateSpec {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.arity == other.arity
            && self.truth_table == other.truth_table
    }
}

/// Standard name for a truth table, or `TT{k}_{HEX}` when none applies.
pub fn derived_name(tt: &[bool]) -> String {
    let len = tt.len();
    let k = len.trailing_zeros() as usize;
    let last = len - 1;
    let table = |f: &dyn Fn(usize) -> bool| (0..len).all(|i| tt[i] == f(i));
    if k == 0 {
        return if tt[0] { "CONST1" } else { "CONST0" }.to_string();
    }
    if k == 1 {
        if table(&|i| i == 0) {
            return "NOT".to_string();
        }
        if table(&|i| i == 1) {
            return "ID".to_string();
        }
    }
    if k >= 2 {
        let named: [(&str, &dyn Fn(usize) -> bool); 6] = [
            ("AND", &|i| i == last),
            ("OR", &|i| i != 0),
            ("NAND", &|i| i != last),
            ("NOR", &|i| i == 0),
            ("XOR", &|i: usize| i.count_ones() % 2 == 1),
            ("XNOR", &|i: usize| i.count_ones().is_multiple_of(2)),
        ];
        for (name, f) in named {
            if table(f) {
                return name.to_string();
            }
        }
        if k == 3 && table(&|i: usize| i.count_ones() >= 2) {
            return "MAJ3".to_string();
        }
    }
    let digits = len.div_ceil(4);
    let hex: String = (0..digits)
        .map(|d| {
            let nibble = (0..4).fold(0u32, |acc, b| {
                let i = d * 4 + b;
                (acc << 1) | u32::from(i < len && tt[i])
            });
            char::from_digit(nibble, 16).unwrap().to_ascii_uppercase()
        })
        .collect();
    format!("TT{k}_{hex}")
}

pub fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

/// The `n`-bit input with truth-table index `index`.
pub fn index_to_bits(index: usize, n: usize) -> Vec<bool> {
    (0..n).map(|j| index >> (n - 1 - j) & 1 == 1).collect()
}

pub fn parse_bits(text: &str) -> Result<Vec<bool>> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::InvalidBits(text.to_string())),
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_tables() {
        assert_eq!(GateSpec::and(2).truth_table_string(), "0001");
        assert_eq!(GateSpec::or(2).truth_table_string(), "0111");
        assert_eq!(GateSpec::maj3().truth_table_string(), "00010111");
        assert_eq!(GateSpec::xor(3).truth_table_string(), "01101001");
    }

    #[test]
    fn msb_is_first_input() {
        let tt = parse_bits("0010").unwrap();
        let g = GateSpec::new("G", 2, tt).unwrap();
        assert!(g.eval(&[true, false]));
        assert!(!g.eval(&[false, true]));
        assert_eq!(g.relevant_inputs(), vec![0, 1]);
    }

    #[test]
    fn names_are_recognized() {
        assert_eq!(GateSpec::and(3).complement().name(), "NAND");
        assert_eq!(GateSpec::xor(2).complement().name(), "XNOR");
        assert_eq!(derived_name(&parse_bits("0010").unwrap()), "TT2_2");
        assert_eq!(derived_name(&parse_bits("00010110").unwrap()), "TT3_16");
    }

    #[test]
    fn flips_and_restrictions() {
        let or = GateSpec::or(2);
        let flipped = or.flip_inputs(&[true, true]);
        assert_eq!(flipped.name(), "NAND");
        let r = GateSpec::and(3).restrict(&[Some(true), None, None]);
        assert_eq!(r.name(), "AND");
        assert_eq!(r.arity(), 2);
        let c = GateSpec::and(2).restrict(&[Some(false), None]);
        assert_eq!(c.is_constant(), Some(false));
    }

    #[test]
    fn and_or_classification() {
        assert_eq!(GateSpec::and(4).and_or(), Some(AndOr::And));
        assert_eq!(GateSpec::or(2).and_or(), Some(AndOr::Or));
        assert!(GateSpec::nand(2).and_or().is_none());
        assert!(GateSpec::nand(2).is_and_or_type());
        assert!(!GateSpec::maj3().is_and_or_type());
        assert!(GateSpec::maj3().cost_bound().is_none());
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(GateSpec::new("G", 2, vec![false; 3]).is_err());
        assert!(GateSpec::new("G", 9, vec![false; 512]).is_err());
    }
}
