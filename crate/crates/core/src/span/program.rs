use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Index set an input vector belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VectorKind {
    Free,
    /// In `I_{j,b}`; `j` is 0-based.
    Input {
        j: usize,
        b: bool,
    },
}

impl VectorKind {
    pub fn is_available(self, x: &[bool]) -> bool {
        match self {
            VectorKind::Free => true,
            VectorKind::Input { j, b } => x[j] == b,
        }
    }
}

/// A real span program: target `t` and labelled vectors `v_i` in `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanProgram {
    n: usize,
    target: DVector<f64>,
    /// Columns are the vectors `v_i`.
    matrix: DMatrix<f64>,
    kinds: Vec<VectorKind>,
    labels: Vec<String>,
}

impl SpanProgram {
    pub fn new(
        n: usize,
        target: DVector<f64>,
        matrix: DMatrix<f64>,
        kinds: Vec<VectorKind>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if matrix.nrows() != target.len() && matrix.ncols() > 0 {
            return Err(Error::Dimension(format!(
                "vectors have dimension {} but the target has dimension {}",
                matrix.nrows(),
                target.len()
            )));
        }
        if kinds.len() != matrix.ncols() || labels.len() != matrix.ncols() {
            return Err(Error::Dimension(format!(
                "{} vectors, {} kinds, {} labels",
                matrix.ncols(),
                kinds.len(),
                labels.len()
            )));
        }
        if let Some(j) = kinds.iter().find_map(|k| match k {
            VectorKind::Input { j, .. } if *j >= n => Some(*j),
            _ => None,
        }) {
            return Err(Error::Dimension(format!(
                "input index {} out of range for n = {n}",
                j + 1
            )));
        }
        if target.iter().chain(matrix.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Dimension("non-finite entries".into()));
        }
        let matrix = if matrix.ncols() == 0 {
            DMatrix::zeros(target.len(), 0)
        } else {
            matrix
        };
        Ok(SpanProgram {
            n,
            target,
            matrix,
            kinds,
            labels,
        })
    }

    /// Builds a program from `(kind, label, vector)` columns.
    pub fn from_columns(
        n: usize,
        target: Vec<f64>,
        columns: Vec<(VectorKind, String, Vec<f64>)>,
    ) -> Result<Self> {
        let dim = target.len();
        if let Some((_, label, v)) = columns.iter().find(|(_, _, v)| v.len() != dim) {
            return Err(Error::Dimension(format!(
                "vector `{label}` has dimension {}, expected {dim}",
                v.len()
            )));
        }
        let matrix = DMatrix::from_fn(dim, columns.len(), |r, c| columns[c].2[r]);
        let (kinds, labels) = columns.into_iter().map(|(k, l, _)| (k, l)).unzip();
        SpanProgram::new(n, DVector::from_vec(target), matrix, kinds, labels)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    /// Number of vectors, `|I|`.
    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn target(&self) -> &DVector<f64> {
        &self.target
    }

    /// The matrix `A` whose columns are the vectors.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn kinds(&self) -> &[VectorKind] {
        &self.kinds
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_strict(&self) -> bool {
        !self.kinds.contains(&VectorKind::Free)
    }

    pub fn is_monotone(&self) -> bool {
        !self
            .kinds
            .iter()
            .any(|k| matches!(k, VectorKind::Input { b: false, .. }))
    }

    pub fn indices_of(&self, kind: VectorKind) -> Vec<usize> {
        (0..self.kinds.len())
            .filter(|&i| self.kinds[i] == kind)
            .collect()
    }

    /// `I(x)` as a mask over the vectors.
    pub fn available(&self, x: &[bool]) -> Vec<bool> {
        self.kinds.iter().map(|k| k.is_available(x)).collect()
    }

    pub fn check_input(&self, x: &[bool]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::InputLength {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Same program with inputs renumbered: input `j` becomes `map[j]`.
    pub fn relabel_inputs(&self, map: &[usize], n: usize) -> Result<Self> {
        let kinds = self
            .kinds
            .iter()
            .map(|k| match *k {
                VectorKind::Free => VectorKind::Free,
                VectorKind::Input { j, b } => VectorKind::Input { j: map[j], b },
            })
            .collect();
        SpanProgram::new(
            n,
            self.target.clone(),
            self.matrix.clone(),
            kinds,
            self.labels.clone(),
        )
    }
}

/// A span program for a gate and, optionally, one for its negation.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramPair {
    pub positive: SpanProgram,
    pub negative: Option<SpanProgram>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_checks() {
        let bad = SpanProgram::from_columns(
            1,
            vec![1.0],
            vec![(
                VectorKind::Input { j: 0, b: true },
                "a".into(),
                vec![1.0, 0.0],
            )],
        );
        assert!(bad.is_err());
        let bad = SpanProgram::from_columns(
            1,
            vec![1.0],
            vec![(VectorKind::Input { j: 1, b: true }, "a".into(), vec![1.0])],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn flags() {
        let p = SpanProgram::from_columns(
            2,
            vec![1.0],
            vec![
                (VectorKind::Free, "f".into(), vec![0.0]),
                (VectorKind::Input { j: 1, b: false }, "a".into(), vec![1.0]),
            ],
        )
        .unwrap();
        assert!(!p.is_strict());
        assert!(!p.is_monotone());
        assert_eq!(p.available(&[true, true]), vec![true, false]);
        assert_eq!(p.indices_of(VectorKind::Input { j: 1, b: false }), vec![1]);
    }
}
