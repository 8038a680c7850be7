//! Finite-difference Calderón projectors in the cusp coordinate `s = 1/x`.

mod calderon;
mod export;
mod grid;
mod jump;
mod probe;
mod trace;

pub use grid::{assemble, discretize, double_geometry, Extension, Factored, GridOperator, PhiGrid, Region};
pub use export::{matrix_from_text, matrix_to_text};
pub use jump::{jump_operator, JumpOperator};
pub use trace::{one_sided_trace, Side, TraceReport};
pub use calderon::{calderon_path_jump, calderon_path_spaces, collar_jets, collar_jump, DiscreteCalderon, DiscreteOptions};
pub use probe::{normal_probe, PROBE_BUMP, symbol_probe, Envelope, ProbeReport, SymbolProbeReport};
