//! Study configs, runners, output and caching.

mod cache;
mod config;
mod emit;
mod properties;
mod study;

pub use cache::{cache_key, run_cached, Cache};
pub use config::{
    parse_list, parse_spec_arg, LimitConfig, Overrides, PlanConfig, PlanMethod, StudyConfig, StudyKind,
    DEFAULT_S_GRID,
};
pub use emit::{emit, from_json, plot_script, to_csv, to_json, Format, CSV_HEADER};
pub use properties::{
    dual_path_check, h0_young_check, modular_checks, negative_controls, run_property_suite, sandwich_check,
    structure_checks, test_function_checks, PropertyEntry, PropertyReport, DUAL_PATH_TOL, SANDWICH_TOL,
};
pub use study::{
    fitted_rate, run_aniso_study, run_bbm_study, run_example_suite, run_norm_study, run_study, CrossCheck,
    StudyResult, StudyRow, ARTIFACT_VERSION,
};
