use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::Result;
use crate::linalg;
use crate::numfmt::g12;
use crate::span::{ComposedProgram, SpanProgram};

/// Coefficient below which a null vector's output coordinate counts as zero.
pub const OUTPUT_SUPPORT_TOL: f64 = 1e-8;

/// Bipartite graph of a span program. Columns of the biadjacency matrix are
/// the output vertex and the input vertices; rows are the basis vectors of
/// `V` and the partner vertex of each input kept in the graph.
#[derive(Debug, Clone)]
pub struct ProgramGraph {
    biadjacency: DMatrix<f64>,
    row_labels: Vec<String>,
    column_labels: Vec<String>,
}

impl ProgramGraph {
    pub fn biadjacency(&self) -> &DMatrix<f64> {
        &self.biadjacency
    }

    /// `[[0, B], [B^T, 0]]`, rows first.
    pub fn adjacency(&self) -> DMatrix<f64> {
        linalg::symmetrize_bipartite(&self.biadjacency)
    }

    /// `||A_G||`, the largest singular value of the biadjacency matrix.
    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.biadjacency)
    }

    /// `||abs(A_G)||`.
    pub fn abs_norm(&self) -> f64 {
        abs_norm(&self.biadjacency).norm
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn column_labels(&self) -> &[String] {
        &self.column_labels
    }

    /// Graphviz rendering with one edge per nonzero biadjacency entry.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for (c, label) in self.column_labels.iter().enumerate() {
            out.push_str(&format!("  c{c} [label=\"{}\"];\n", escape(label)));
        }
        for (r, label) in self.row_labels.iter().enumerate() {
            out.push_str(&format!(
                "  r{r} [label=\"{}\", shape=box];\n",
                escape(label)
            ));
        }
        let b = &self.biadjacency;
        for r in 0..b.nrows() {
            for c in 0..b.ncols() {
                if b[(r, c)] != 0.0 {
                    out.push_str(&format!("  r{r} -- c{c} [weight={}];\n", g12(b[(r, c)])));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// `B = [[t, A], [0, I]]`.
pub fn biadjacency(program: &SpanProgram) -> ProgramGraph {
    build(program, &vec![true; program.len()])
}

/// `B(x) = [[t, A], [0, I_unavailable]]`: partner rows stay only for
/// vectors not in `I(x)`.
pub fn input_graph(program: &SpanProgram, x: &[bool]) -> Result<ProgramGraph> {
    program.check_input(x)?;
    let keep: Vec<bool> = program.available(x).into_iter().map(|a| !a).collect();
    Ok(build(program, &keep))
}

fn build(program: &SpanProgram, keep_partner: &[bool]) -> ProgramGraph {
    let d = program.dim();
    let m = program.len();
    let partners: Vec<usize> = (0..m).filter(|&i| keep_partner[i]).collect();
    let mut b = DMatrix::zeros(d + partners.len(), 1 + m);
    b.view_mut((0, 0), (d, 1)).copy_from(program.target());
    b.view_mut((0, 1), (d, m)).copy_from(program.matrix());
    for (r, &i) in partners.iter().enumerate() {
        b[(d + r, 1 + i)] = 1.0;
    }
    let mut row_labels: Vec<String> = (1..=d).map(|r| format!("e{r}")).collect();
    row_labels.extend(
        partners
            .iter()
            .map(|&i| format!("{}'", program.labels()[i])),
    );
    let mut column_labels = vec!["out".to_string()];
    column_labels.extend(program.labels().iter().cloned());
    ProgramGraph {
        biadjacency: b,
        row_labels,
        column_labels,
    }
}

/// True when `B(x)` has a null vector with nonzero output coordinate; such
/// a vector `(c, w)` gives the 1-witness `-w/c`.
pub fn zero_witness_exists(program: &SpanProgram, x: &[bool]) -> Result<bool> {
    let graph = input_graph(program, x)?;
    let null = linalg::null_space(&graph.biadjacency);
    Ok(null.ncols() > 0 && null.row(0).amax() > OUTPUT_SUPPORT_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbsNorm {
    /// Largest singular value of the entrywise absolute value.
    pub norm: f64,
    pub frobenius: f64,
}

pub fn abs_norm(m: &DMatrix<f64>) -> AbsNorm {
    AbsNorm {
        norm: linalg::spectral_norm(&linalg::entrywise_abs(m)),
        frobenius: linalg::frobenius_norm(m),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QueryEstimate {
    /// `max_x wsizef_x`.
    pub full_witness_size: f64,
    /// `||abs(A_G)||`.
    pub abs_norm: f64,
    /// Their product.
    pub t_est: f64,
}

/// `wsizef(P) * ||abs(A_G)||`, without constants.
pub fn query_estimate(composed: &ComposedProgram) -> Result<QueryEstimate> {
    let wsizef = composed.full_witness_size()?;
    let norm = biadjacency(composed.program()).abs_norm();
    Ok(QueryEstimate {
        full_witness_size: wsizef,
        abs_norm: norm,
        t_est: wsizef * norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::span::{make_and, make_or};

    #[test]
    fn or_biadjacency() {
        let g = biadjacency(&make_or(1.0, 1.0).unwrap());
        let e = 2f64.powf(-0.25);
        let expected = DMatrix::from_row_slice(3, 3, &[1.0, e, e, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!((g.biadjacency() - expected).amax() < 1e-15);
        let a = abs_norm(g.biadjacency());
        // Independent value from numpy's SVD.
        assert!((a.norm - 1.758_026_69).abs() < 1e-8);
        assert!(a.norm * a.norm <= a.frobenius * a.frobenius);
        assert!((a.frobenius.powi(2) - (3.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn dangling_rows() {
        let or = make_or(1.0, 1.0).unwrap();
        assert_eq!(
            input_graph(&or, &[true, true])
                .unwrap()
                .biadjacency()
                .nrows(),
            1
        );
        assert_eq!(
            input_graph(&or, &[false, false])
                .unwrap()
                .biadjacency()
                .nrows(),
            3
        );
        let and = make_and(1.0, 1.0).unwrap();
        assert_eq!(
            input_graph(&and, &[true, false])
                .unwrap()
                .biadjacency()
                .nrows(),
            3
        );
    }

    #[test]
    fn zero_witnesses() {
        let or = make_or(1.0, 1.0).unwrap();
        assert!(zero_witness_exists(&or, &[true, false]).unwrap());
        assert!(!zero_witness_exists(&or, &[false, false]).unwrap());
        let and = make_and(1.0, 1.0).unwrap();
        assert!(!zero_witness_exists(&and, &[false, true]).unwrap());
        assert!(zero_witness_exists(&and, &[true, true]).unwrap());
    }

    #[test]
    fn abs_norm_examples() {
        assert!((abs_norm(&DMatrix::identity(4, 4)).norm - 1.0).abs() < 1e-12);
        assert!((abs_norm(&DMatrix::from_element(2, 2, 1.0)).norm - 2.0).abs() < 1e-12);
    }

    #[test]
    fn or_query_estimate() {
        let c = ComposedProgram::leaf(make_or(1.0, 1.0).unwrap(), vec![1.0, 1.0]).unwrap();
        let q = query_estimate(&c).unwrap();
        assert!((q.full_witness_size - (1.0 + 2f64.sqrt())).abs() < 1e-9);
        assert!((q.t_est - 4.244_251_88).abs() < 1e-7);
    }

    #[test]
    fn dot_export() {
        let dot = biadjacency(&make_or(1.0, 1.0).unwrap()).to_dot();
        assert!(dot.starts_with("graph G {"));
        assert!(dot.contains("weight=0.840896415254"));
    }
}
