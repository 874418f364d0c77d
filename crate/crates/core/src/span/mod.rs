//! Span programs: representation, evaluation, witness sizes, the AND/OR
//! gate programs and direct-sum composition.

mod compose;
mod gates;
mod json;
mod program;
mod witness;

pub use compose::{
    compose_formula, direct_sum_compose, ComposedProgram, InnerPrograms, Measures, VertexInfo,
};
pub use gates::{balance_weights, make_and, make_or, passthrough};
pub use json::{program_from_json, program_to_json, ProgramJson};
pub use program::{ProgramPair, SpanProgram, VectorKind};
pub use witness::{
    eval_span, full_witness_size, witness, witness_cross_checked, witness_size, Objective,
    WitnessResult, FEASIBILITY_TOL,
};
