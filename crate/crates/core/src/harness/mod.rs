//! Scenario presets, config loading, deterministic runs and file output.

mod config;
mod output;
mod presets;
mod run;
mod validate;

pub use config::{
    load_config, parse_config, BoundSelect, ExperimentConfig, InitialState, DEFAULT_CANDIDATES, DEFAULT_CANDIDATE_SEED,
    EIGENVALUE_SUM_TOL,
};
pub use output::{emit_csv, emit_plotdata, format_number, render_csv};
pub use presets::{describe, preset, DEFAULT_GUE_SEED, PRESET_IDS, QUTRIT_PAIR_WEIGHTS};
pub use run::{run_scenario, CandidateTotal, ResultTable, Row, COLUMNS, DELTAS, VERSION};
pub use validate::{
    check_cyclic_trace, check_pure_reduction, check_sigma_residuals, check_stronger_ur, validate_suite, CheckKind,
    CheckOutcome, ValidateOptions, ValidationReport,
};
