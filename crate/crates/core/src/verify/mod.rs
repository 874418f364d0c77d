//! Executable checks of the witness-size, norm and spectral inequalities.
//!
//! Every checker returns a [`VerificationReport`] holding both sides of the
//! inequality it tests; `pass` is `lhs <= rhs + tolerance`.

mod formula;
mod program;
mod suite;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub use formula::{check_balance_lemma, check_gap_lemma, gap_lemma_on_form};
pub use program::{
    check_canonical_premise, check_compose_lemma, check_directsum_norm, check_norm_lemma,
    check_root_bound, check_witness_bounds,
};
pub use suite::{check_formula, sample_inputs, SuiteOptions};

/// Absolute tolerance on lemma inequalities.
pub const LEMMA_TOL: f64 = 1e-8;
/// Amplitudes below this fraction of the eigenvector norm count as zero.
pub const ZERO_AMPLITUDE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    Canonical,
    Norm,
    Compose,
    #[serde(rename = "dsnorm")]
    DirectSumNorm,
    Witness,
    Balance,
    Gap,
}

impl Lemma {
    pub const ALL: [Lemma; 7] = [
        Lemma::Canonical,
        Lemma::Norm,
        Lemma::Compose,
        Lemma::DirectSumNorm,
        Lemma::Witness,
        Lemma::Balance,
        Lemma::Gap,
    ];

    /// Checks that take a formula.
    pub const FORMULA: [Lemma; 5] = [
        Lemma::Compose,
        Lemma::DirectSumNorm,
        Lemma::Witness,
        Lemma::Balance,
        Lemma::Gap,
    ];

    /// Checks that take a span program with costs.
    pub const PROGRAM: [Lemma; 2] = [Lemma::Canonical, Lemma::Norm];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::Canonical => "canonical",
            Lemma::Norm => "norm",
            Lemma::Compose => "compose",
            Lemma::DirectSumNorm => "dsnorm",
            Lemma::Witness => "witness",
            Lemma::Balance => "balance",
            Lemma::Gap => "gap",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Lemma::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown lemma `{s}`")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub lemma: Lemma,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Witness vectors, eigenpairs and intermediate quantities.
    pub details: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(
        lemma: Lemma,
        instance: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        VerificationReport {
            lemma,
            instance: instance.into(),
            lhs,
            rhs,
            tolerance,
            pass: lhs <= rhs + tolerance,
            details: Value::Null,
            notes: Vec::new(),
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Forces a failure (for violated preconditions of the measured side).
    pub(crate) fn fail(mut self, note: impl Into<String>) -> Self {
        self.pass = false;
        self.notes.push(note.into());
        self
    }

    /// `lhs - rhs`, with NaN ranked worst.
    pub fn margin(&self) -> f64 {
        let m = self.lhs - self.rhs;
        if m.is_nan() {
            f64::INFINITY
        } else {
            m
        }
    }
}

const MAX_NOTES: usize = 20;

/// One report summarizing many: the worst case (failures first, then the
/// largest `lhs - rhs`) with counts. An empty list gives a vacuous pass.
pub fn aggregate(
    lemma: Lemma,
    instance: impl Into<String>,
    reports: Vec<VerificationReport>,
) -> VerificationReport {
    let instance = instance.into();
    let checked = reports.len();
    let failed = reports.iter().filter(|r| !r.pass).count();
    let mut notes: Vec<String> = Vec::new();
    for r in &reports {
        for n in &r.notes {
            if !notes.contains(n) {
                notes.push(n.clone());
            }
        }
    }
    if notes.len() > MAX_NOTES {
        let extra = notes.len() - MAX_NOTES;
        notes.truncate(MAX_NOTES);
        notes.push(format!("{extra} more notes"));
    }
    let worst = reports.into_iter().reduce(|a, b| {
        let key = |r: &VerificationReport| (!r.pass, r.margin());
        let (ka, kb) = (key(&a), key(&b));
        if kb.0 > ka.0 || (kb.0 == ka.0 && kb.1 > ka.1) {
            b
        } else {
            a
        }
    });
    match worst {
        None => VerificationReport::new(lemma, instance, 0.0, 0.0, 0.0)
            .with_details(json!({ "checked": 0, "failed": 0 }))
            .with_note("nothing to check"),
        Some(w) => {
            let mut out = VerificationReport {
                lemma,
                instance,
                lhs: w.lhs,
                rhs: w.rhs,
                tolerance: w.tolerance,
                pass: failed == 0,
                details: json!({
                    "checked": checked,
                    "failed": failed,
                    "worst": { "instance": w.instance, "details": w.details },
                }),
                notes,
            };
            if failed == 0 && !w.pass {
                out.pass = false;
            }
            out
        }
    }
}

/// True when every report passed.
pub fn all_passed(reports: &[VerificationReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_names_round_trip() {
        for l in Lemma::ALL {
            assert_eq!(l.name().parse::<Lemma>().unwrap(), l);
            assert_eq!(serde_json::to_value(l).unwrap(), json!(l.name()));
        }
        assert!("all".parse::<Lemma>().is_err());
    }

    #[test]
    fn aggregate_picks_failures_first() {
        let a = VerificationReport::new(Lemma::Gap, "a", 1.0, 5.0, 0.0);
        let b = VerificationReport::new(Lemma::Gap, "b", 2.0, 1.0, 0.0);
        let c = VerificationReport::new(Lemma::Gap, "c", 0.0, 0.5, 0.0);
        let r = aggregate(Lemma::Gap, "all", vec![a, b, c]);
        assert!(!r.pass);
        assert_eq!(r.lhs, 2.0);
        assert_eq!(r.details["failed"], 1);
        let empty = aggregate(Lemma::Gap, "none", Vec::new());
        assert!(empty.pass);
    }

    #[test]
    fn nan_fails() {
        assert!(!VerificationReport::new(Lemma::Norm, "x", f64::NAN, 1.0, 1e-8).pass);
    }
}
