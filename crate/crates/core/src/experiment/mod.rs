//! Deterministic experiment harness: synthetic data generators, a parallel
//! replicate runner, CSV output and summaries, and the shipped presets.

mod generator;
mod output;
mod presets;
mod runner;
mod spec;

pub use generator::{generate, Dataset, Generator, GeneratorSpec, RecordShape, TRIG_CDF_CELLS};
pub use output::{
    emit_csv, fmt_float, nearest_rank, read_csv, summarize, write_csv, write_summary_csv,
    RunRecord, SummaryRow, CSV_HEADER,
};
pub use presets::{preset, Preset, PRESET_NAMES};
pub use runner::{run_experiment, DENSITY_QUADRATURE_POINTS};
pub use spec::{valid_pairs, EstimatorKind, EstimatorOptions, ExperimentSpec, MechanismKind};
