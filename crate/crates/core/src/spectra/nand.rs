//! Weighted NAND tree of a fan-in-2 AND-OR formula.
//!
//! Vertex 0 is the auxiliary root `r''`, joined to the formula root by an
//! edge of weight `w_out`. Vertices `1..=m` are the NAND-form vertices in
//! their own order, with `h_pv = (s_v/s_p)^(1/4)`. Every input vertex whose
//! NAND value is 1 under `x` gets one pendant child of weight 1, so all
//! leaves of the tree have NAND value 0.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{index_to_bits, to_nand_form, Formula, NandForm, NandKind};
use crate::linalg;

/// Eigenvalues with `|E| <= ZERO_EIGENVALUE_TOL * max(||A||, 1)` count as 0.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeVertexKind {
    AuxRoot,
    /// NAND-form vertex.
    Form(usize),
    /// Pendant below the given tree vertex.
    Pendant(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeVertex {
    pub kind: TreeVertexKind,
    pub parent: Option<usize>,
    /// Weight of the edge to the parent.
    pub weight: f64,
    /// `NAND(v)`; `None` for `r''`.
    pub nand: Option<bool>,
    pub size: usize,
    /// `sigma_-(v)` on the tree; 1 at inputs and pendants.
    pub sigma: f64,
}

#[derive(Debug, Clone)]
pub struct NandTree {
    vertices: Vec<TreeVertex>,
    adjacency: DMatrix<f64>,
    n: usize,
    sigma_root: f64,
    w_out: f64,
}

impl NandTree {
    pub fn vertices(&self) -> &[TreeVertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Weighted adjacency matrix, `r''` first.
    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    /// Leaf count of the formula.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w_out(&self) -> f64 {
        self.w_out
    }

    /// `sigma_-` of the formula as measured on the tree.
    pub fn sigma_minus(&self) -> f64 {
        self.sigma_root
    }

    /// `(8 sigma_-^3 n)^(-1/2)`.
    pub fn e_max(&self) -> f64 {
        e_max(self.sigma_root, self.n)
    }

    /// `NAND` of the formula root.
    pub fn root_nand(&self) -> bool {
        self.vertices[1].nand.expect("formula root has a value")
    }

    /// `y_v` for every vertex except `r''` (which gets `None`).
    pub fn y_values(&self, energy: f64) -> Result<Vec<Option<f64>>> {
        check_energy(energy, self.e_max())?;
        Ok(self
            .vertices
            .iter()
            .map(|v| match v.kind {
                TreeVertexKind::AuxRoot => None,
                _ => Some(y_value(v.size, v.sigma, self.sigma_root, energy)),
            })
            .collect())
    }

    /// `gamma_v = 4 sigma_-(phi)^2 s_v sigma_-(v)` for every vertex but `r''`.
    pub fn gammas(&self) -> Vec<Option<f64>> {
        self.vertices
            .iter()
            .map(|v| match v.kind {
                TreeVertexKind::AuxRoot => None,
                _ => Some(4.0 * self.sigma_root.powi(2) * v.size as f64 * v.sigma),
            })
            .collect()
    }

    /// Whether the tree without `r''` has an eigenvalue-0 vector with
    /// nonzero amplitude on the formula root.
    pub fn root_zero_mode(&self) -> bool {
        let m = self.len() - 1;
        let a = self.adjacency.view((1, 1), (m, m)).into_owned();
        let null = linalg::null_space(&a);
        null.ncols() > 0 && null.row(0).amax() > 1e-8
    }

    /// Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph T {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let label = match v.kind {
                TreeVertexKind::AuxRoot => "r''".to_string(),
                TreeVertexKind::Form(f) => {
                    format!("v{f} NAND={}", u8::from(v.nand.unwrap_or(false)))
                }
                TreeVertexKind::Pendant(_) => "pendant".to_string(),
            };
            out.push_str(&format!(
                "  t{i} [label=\"{}\"];\n",
                super::graph::escape(&label)
            ));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if let Some(p) = v.parent {
                out.push_str(&format!(
                    "  t{p} -- t{i} [weight={}];\n",
                    crate::numfmt::g12(v.weight)
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn e_max(sigma_minus: f64, n: usize) -> f64 {
    (8.0 * sigma_minus.powi(3) * n as f64).powf(-0.5)
}

fn check_energy(energy: f64, max: f64) -> Result<()> {
    if !(energy >= 0.0 && energy <= max * (1.0 + 1e-12)) {
        return Err(Error::EnergyOutOfRange { energy, max });
    }
    Ok(())
}

fn y_value(size: usize, sigma: f64, sigma_root: f64, energy: f64) -> f64 {
    let s = size as f64;
    let gamma = 4.0 * sigma_root * sigma_root * s * sigma;
    s.sqrt() * sigma / (1.0 - gamma * energy * energy)
}

/// Builds the tree for `formula` on input `x`. `w_out` defaults to
/// `n^(-1/4)`.
pub fn build_nand_tree(formula: &Formula, x: &[bool], w_out: Option<f64>) -> Result<NandTree> {
    formula.check_input(x)?;
    let form = to_nand_form(formula)?;
    Ok(tree_from_form(&form, x, w_out))
}

pub(crate) fn tree_from_form(form: &NandForm, x: &[bool], w_out: Option<f64>) -> NandTree {
    let values = form.values(x);
    let sigma = form.sigma_minus();
    let fv = form.vertices();
    let n = fv[0].size;
    let w_out = w_out.unwrap_or((n as f64).powf(-0.25));
    let mut vertices = vec![TreeVertex {
        kind: TreeVertexKind::AuxRoot,
        parent: None,
        weight: 0.0,
        nand: None,
        size: n,
        sigma: 0.0,
    }];
    for (i, v) in fv.iter().enumerate() {
        let (parent, weight) = match v.parent {
            None => (0, w_out),
            Some(p) => (p + 1, (v.size as f64 / fv[p].size as f64).powf(0.25)),
        };
        vertices.push(TreeVertex {
            kind: TreeVertexKind::Form(i),
            parent: Some(parent),
            weight,
            nand: Some(values[i]),
            size: v.size,
            sigma: sigma[i],
        });
    }
    for (i, v) in fv.iter().enumerate() {
        if matches!(v.kind, NandKind::Input { .. }) && values[i] {
            vertices.push(TreeVertex {
                kind: TreeVertexKind::Pendant(i + 1),
                parent: Some(i + 1),
                weight: 1.0,
                nand: Some(false),
                size: 1,
                sigma: 1.0,
            });
        }
    }
    let mut adjacency = DMatrix::zeros(vertices.len(), vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        if let Some(p) = v.parent {
            adjacency[(i, p)] = v.weight;
            adjacency[(p, i)] = v.weight;
        }
    }
    NandTree {
        vertices,
        adjacency,
        n,
        sigma_root: sigma[0],
        w_out,
    }
}

/// `y_v` for every NAND-form vertex of `formula` (input-independent).
pub fn y_values(formula: &Formula, energy: f64) -> Result<Vec<f64>> {
    let form = to_nand_form(formula)?;
    let sigma = form.sigma_minus();
    let n = form.vertices()[0].size;
    check_energy(energy, e_max(sigma[0], n))?;
    Ok(form
        .vertices()
        .iter()
        .zip(&sigma)
        .map(|(v, &s)| y_value(v.size, s, sigma[0], energy))
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct Calibration {
    pub inputs_checked: usize,
    /// Inputs (as bit strings) where the root zero mode disagrees with
    /// `NAND(root) = 0`.
    pub mismatches: Vec<String>,
}

impl Calibration {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks on every input that the tree has a zero mode on the formula root
/// exactly when the root's NAND value is 0.
pub fn calibrate(formula: &Formula) -> Result<Calibration> {
    let form = to_nand_form(formula)?;
    let n = formula.num_vars();
    let mut mismatches = Vec::new();
    for index in 0..1usize << n {
        let x = index_to_bits(index, n);
        let tree = tree_from_form(&form, &x, None);
        if tree.root_zero_mode() == tree.root_nand() {
            mismatches.push(crate::formula::format_bits(&x));
        }
    }
    Ok(Calibration {
        inputs_checked: 1 << n,
        mismatches,
    })
}

/// Eigen-decomposition summary of a symmetric matrix.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: DMatrix<f64>,
    /// Smallest eigenvalue above the zero threshold.
    pub gap: Option<f64>,
    pub zero_dim: usize,
    #[serde(rename = "T_est", skip_serializing_if = "Option::is_none")]
    pub t_est: Option<f64>,
    /// `max ||A u - lambda u||` over the reported pairs.
    pub max_residual: f64,
}

pub fn spectral_report(a: &DMatrix<f64>, t_est: Option<f64>) -> SpectralReport {
    let (eigenvalues, eigenvectors) = linalg::symmetric_eigen(a);
    let scale = eigenvalues.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let zero = ZERO_EIGENVALUE_TOL * scale;
    let zero_dim = eigenvalues.iter().filter(|e| e.abs() <= zero).count();
    let gap = eigenvalues
        .iter()
        .copied()
        .filter(|&e| e > zero)
        .reduce(f64::min);
    let max_residual = (0..eigenvalues.len())
        .map(|k| {
            let u = eigenvectors.column(k);
            (a * u - u * eigenvalues[k]).norm()
        })
        .fold(0.0, f64::max);
    SpectralReport {
        eigenvalues,
        eigenvectors,
        gap,
        zero_dim,
        t_est,
        max_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Registry};

    fn f(text: &str) -> Formula {
        parse(text, &Registry::standard()).unwrap()
    }

    #[test]
    fn or_tree_sizes() {
        // OR leaves carry the negated inputs.
        let t = build_nand_tree(&f("OR(x1,x2)"), &[true, true], None).unwrap();
        assert_eq!(t.len(), 4);
        let t = build_nand_tree(&f("OR(x1,x2)"), &[false, false], None).unwrap();
        assert_eq!(t.len(), 6);
        let t = build_nand_tree(&f("AND(x1,x2)"), &[true, true], None).unwrap();
        assert_eq!(t.len(), 6);
        let h = t.vertices()[2].weight;
        assert!((h - 0.5f64.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn y_at_zero_and_leaves() {
        let phi = f("OR(AND(x1,x2),AND(x3,x4))");
        let y = y_values(&phi, 0.0).unwrap();
        assert!((y[0] - 2.0 * (0.5 + 1.0 / 2f64.sqrt() + 1.0)).abs() < 1e-12);
        let t = build_nand_tree(&phi, &[false; 4], None).unwrap();
        let e = t.e_max();
        assert!((e - 0.054).abs() < 1e-3);
        let sigma = t.sigma_minus();
        let y = y_values(&phi, e).unwrap();
        let leaf = 1.0 / (1.0 - 4.0 * sigma * sigma * e * e);
        assert!((y[2] - leaf).abs() < 1e-12);
        assert!(y_values(&phi, 2.0 * e).is_err());
        assert!(t
            .gammas()
            .iter()
            .flatten()
            .all(|g| g * e * e <= 0.5 + 1e-12));
    }

    #[test]
    fn calibration_small() {
        for text in [
            "x1",
            "OR(x1,x2)",
            "AND(x1,x2)",
            "OR(AND(x1,x2),x3)",
            "AND(AND(x1,x2),x3)",
        ] {
            assert!(calibrate(&f(text)).unwrap().passed(), "{text}");
        }
    }

    #[test]
    fn report_counts_zero_modes() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let r = spectral_report(&a, None);
        assert_eq!(r.zero_dim, 1);
        assert!((r.gap.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.max_residual < 1e-12);
    }
}
