//! Span-program graphs, the weighted NAND tree, and their spectra.

mod graph;
mod nand;

pub use graph::{
    abs_norm, biadjacency, input_graph, query_estimate, zero_witness_exists, AbsNorm, ProgramGraph,
    QueryEstimate, OUTPUT_SUPPORT_TOL,
};
pub(crate) use nand::tree_from_form;
pub use nand::{
    build_nand_tree, calibrate, e_max, spectral_report, y_values, Calibration, NandTree,
    SpectralReport, TreeVertex, TreeVertexKind, ZERO_EIGENVALUE_TOL,
};
