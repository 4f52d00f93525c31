//! Forward-regression variable screening: SIS, ISIS, FR and grouped FR,
//! with BIC path selection, simulation designs, metrics and design
//! diagnostics.

pub mod data;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod screening;
pub mod select;
pub mod simgen;

pub use data::{read_csv, write_csv, Dataset};
pub use error::{Error, Result};
pub use linalg::{least_squares, ActiveSetState, AddedColumn, CandidateGain, DesignMatrix, ResponseVector};
pub use metrics::{run_scenario, render_table, MetricsReport, ReplicationOutcome, ReportConfig, Scenario};
pub use screening::{
    fr_path, gfr_path, isis_path, sis_path, sis_select, GfrOptions, IsisOptions, Method, ScreeningPath, StepRecord,
};
pub use select::{bic_trace, BicTrace};
pub use simgen::{make_example, sample_dataset, Example, SimulationSpec, TrueModel};
