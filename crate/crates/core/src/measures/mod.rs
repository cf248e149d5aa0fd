//! Combinatorial query-complexity measures of partial functions.

pub mod algorithms;
pub mod blocks;
pub mod critical;
pub mod decision_tree;
pub mod fractional;
pub mod report;

pub use algorithms::{run_cert_bs_algorithm, AlgorithmRun, CertAlgorithm, Variant};
pub use blocks::{
    block_sensitivity, certificate, max_disjoint, min_hitting_set, minimal_blocks, sensitivity, CertKind, Sensitivity,
};
pub use critical::{
    critical_block_sensitivity, critical_certificate, critical_search, Bounded, CriticalWitness,
    DEFAULT_UNDEFINED_BUDGET,
};
pub use decision_tree::{deterministic_complexity, deterministic_complexity_capped, DEFAULT_EXACT_CAP};
pub use fractional::{fractional_block_sensitivity, fractional_certificate, fractional_certificate_complexity};
pub use report::{
    measure_report, point_measures, speedup_requirements_report, Check, MeasureOptions, MeasureReport, PointMeasures,
    SpeedupReport,
};
