//! Experiment configs, sweep runners and CSV/JSON result tables.

mod config;
pub mod ext_float;
mod runners;
mod table;

pub use config::{
    BoundaryMeasure, DimensionSweep, Experiment, ExperimentConfig, FieldQuery, JumpCorpus, PathQuery, SymbolEnvelope,
    VdcCase, VdcSweep,
};
pub use runners::{
    body_label, euclidean_grid, resolution_excess, run, run_boundary_measure, run_dimension_sweep, run_jump_corpus,
    run_jump_seminorm, run_path_query, run_symbol_checks, run_vdc_sweep, QueryKind,
};
pub use table::{emit_report, Column, Format, Param, ParamKind, Provenance, ResultRow, ResultTable, SCHEMA_VERSION};
