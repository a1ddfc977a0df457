//! Scenario generation, batch evaluation and metrics.

pub mod batch;
pub mod generate;
pub mod metrics;

pub use batch::{
    read_csv, run_batch, score, summarize, write_csv, write_outputs, AgentSummary, BatchConfig, BatchResult, BatchRow,
    ScenarioSource, SummaryDoc,
};
pub use generate::{generate_scenario, generate_scenarios, GeneratorSpec};
pub use metrics::{mspl, success_rate, MetricRow};
