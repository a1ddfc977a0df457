//! Batches of episodes: every agent on every scenario, in parallel, with
//! one CSV row per episode and per-agent aggregates.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{run_episode, AgentKind, AgentParams, EpisodeResult};
use crate::error::{Error, Result};
use crate::harness::generate::{generate_scenario, GeneratorSpec};
use crate::harness::metrics::{mspl, success_rate, MetricRow};
use crate::sim::Scenario;

/// Where the scenarios of a batch come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioSource {
    Files(Vec<PathBuf>),
    Generated {
        spec: GeneratorSpec,
        count: usize,
        master_seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchConfig {
    pub scenarios: ScenarioSource,
    pub agents: Vec<AgentKind>,
    #[serde(default)]
    pub params: AgentParams,
    /// Worker threads; 0 lets the thread pool decide.
    #[serde(default)]
    pub threads: usize,
}

impl BatchConfig {
    /// The default desk-scale batch: 50 generated 40x40 scenarios with three
    /// targets each, every agent.
    pub fn default_generated(master_seed: u64) -> Self {
        BatchConfig {
            scenarios: ScenarioSource::Generated {
                spec: GeneratorSpec::default(),
                count: 50,
                master_seed,
            },
            agents: AgentKind::ALL.to_vec(),
            params: AgentParams::default(),
            threads: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.scenarios {
            ScenarioSource::Files(paths) if paths.is_empty() => {
                return Err(Error::Config("at least one scenario file is required".into()))
            }
            ScenarioSource::Generated { count: 0, .. } => {
                return Err(Error::Config("scenario count must be positive".into()))
            }
            ScenarioSource::Generated { spec, .. } => spec.validate()?,
            ScenarioSource::Files(_) => {}
        }
        if self.agents.is_empty() {
            return Err(Error::Config("at least one agent is required".into()));
        }
        self.params.planner.validate()
    }
}

/// One episode, flattened for CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub agent: String,
    pub scenario: String,
    pub seed: u64,
    /// Target classes, `;`-separated.
    pub targets: String,
    /// Per-target 0/1 found flags, `;`-separated, in `targets` order.
    pub found: String,
    /// 1 when every target was found.
    pub success: u8,
    /// Path travelled, meters.
    pub path_length: f64,
    /// Optimal tour length, meters; empty when a target is unreachable.
    pub optimal_length: Option<f64>,
    pub steps: u64,
    pub termination: String,
}

impl BatchRow {
    fn new(scenario: &str, r: &EpisodeResult) -> Self {
        let termination = serde_json::to_value(r.termination)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        BatchRow {
            agent: r.agent.name().to_string(),
            scenario: scenario.to_string(),
            seed: r.seed,
            targets: r.targets.join(";"),
            found: r
                .found_step
                .iter()
                .map(|f| if f.is_some() { "1" } else { "0" })
                .collect::<Vec<_>>()
                .join(";"),
            success: r.success as u8,
            path_length: r.path_length,
            optimal_length: r.optimal_length,
            steps: r.steps,
            termination,
        }
    }

    pub fn metric(&self) -> MetricRow {
        MetricRow {
            success: self.success == 1,
            path_length: self.path_length,
            optimal_length: self.optimal_length,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSummary {
    pub agent: String,
    pub episodes: usize,
    pub sr: f64,
    pub mspl: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    pub rows: Vec<BatchRow>,
    pub summary: Vec<AgentSummary>,
}

/// The structured summary written next to the CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryDoc {
    pub version: String,
    pub config: BatchConfig,
    pub agents: Vec<AgentSummary>,
}

/// Per-agent SR and MSPL, in first-appearance order of agents. Fails if any
/// aggregate leaves `0 <= MSPL <= SR <= 1`.
pub fn summarize(rows: &[BatchRow]) -> Result<Vec<AgentSummary>> {
    let mut order: Vec<&str> = Vec::new();
    for r in rows {
        if !order.contains(&r.agent.as_str()) {
            order.push(&r.agent);
        }
    }
    order
        .into_iter()
        .map(|agent| {
            let metrics: Vec<MetricRow> = rows.iter().filter(|r| r.agent == agent).map(BatchRow::metric).collect();
            let sr = success_rate(&metrics);
            let m = mspl(&metrics)?;
            if !(0.0 <= m && m <= sr + 1e-12 && sr <= 1.0) {
                return Err(Error::MetricBounds {
                    agent: agent.to_string(),
                    mspl: m,
                    sr,
                });
            }
            Ok(AgentSummary {
                agent: agent.to_string(),
                episodes: metrics.len(),
                sr,
                mspl: m,
            })
        })
        .collect()
}

fn load_scenarios(source: &ScenarioSource) -> Result<Vec<(String, Scenario)>> {
    match source {
        ScenarioSource::Files(paths) => paths
            .iter()
            .map(|p| {
                let name = p
                    .file_stem()
                    .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
                Scenario::load(p).map(|s| (name, s))
            })
            .collect(),
        ScenarioSource::Generated {
            spec,
            count,
            master_seed,
        } => (0..*count as u64)
            .into_par_iter()
            .map(|i| generate_scenario(spec, *master_seed, i).map(|s| (format!("gen-{i:04}"), s)))
            .collect(),
    }
}

/// Runs every agent on every scenario. Rows come out ordered by agent (config
/// order) and then scenario, whatever the thread count.
pub fn run_batch(config: &BatchConfig) -> Result<BatchResult> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        let scenarios = load_scenarios(&config.scenarios)?;
        let jobs: Vec<(AgentKind, usize)> = config
            .agents
            .iter()
            .flat_map(|&a| (0..scenarios.len()).map(move |i| (a, i)))
            .collect();
        let rows = jobs
            .par_iter()
            .map(|&(agent, i)| {
                let (name, scenario) = &scenarios[i];
                run_episode(scenario, agent, &config.params)
                    .map(|r| BatchRow::new(name, &r))
                    .map_err(|e| e.in_file(name))
            })
            .collect::<Result<Vec<_>>>()?;
        let summary = summarize(&rows)?;
        Ok(BatchResult { rows, summary })
    })
}

pub fn write_csv(path: &Path, rows: &[BatchRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::from(e).in_file(path))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<BatchRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::from(e).in_file(path))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<BatchRow>, _>>()
        .map_err(|e| Error::from(e).in_file(path))
}

/// Writes `rows.csv` and `summary.json` into `dir`.
pub fn write_outputs(dir: &Path, config: &BatchConfig, result: &BatchResult) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::from(e).in_file(dir))?;
    write_csv(&dir.join("rows.csv"), &result.rows)?;
    let doc = SummaryDoc {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        agents: result.summary.clone(),
    };
    let path = dir.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n").map_err(|e| Error::from(e).in_file(&path))?;
    Ok(())
}

/// Recomputes the aggregates of a rows file, checking the metric bounds.
pub fn score(path: &Path) -> Result<Vec<AgentSummary>> {
    let rows = read_csv(path)?;
    summarize(&rows).map_err(|e| e.in_file(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(agent: &str, success: u8, p: f64, l: f64) -> BatchRow {
        BatchRow {
            agent: agent.into(),
            scenario: "s".into(),
            seed: 0,
            targets: "cup".into(),
            found: success.to_string(),
            success,
            path_length: p,
            optimal_length: Some(l),
            steps: 1,
            termination: "all_found".into(),
        }
    }

    #[test]
    fn summary_groups_by_agent() {
        let rows = [row("a", 1, 20.0, 10.0), row("b", 0, 5.0, 5.0), row("a", 0, 1.0, 1.0)];
        let s = summarize(&rows).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(
            (s[0].agent.as_str(), s[0].episodes, s[0].sr, s[0].mspl),
            ("a", 2, 0.5, 0.25)
        );
        assert_eq!((s[1].sr, s[1].mspl), (0.0, 0.0));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        let mut rows = vec![row("a", 1, 20.25, 10.5)];
        rows.push(BatchRow {
            optimal_length: None,
            ..row("a", 0, 3.0, 1.0)
        });
        write_csv(&path, &rows).unwrap();
        assert_eq!(read_csv(&path).unwrap(), rows);
    }

    #[test]
    fn empty_config_is_rejected() {
        let mut c = BatchConfig::default_generated(1);
        c.agents.clear();
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let c = BatchConfig {
            scenarios: ScenarioSource::Files(vec![]),
            ..BatchConfig::default_generated(1)
        };
        assert!(c.validate().is_err());
    }
}
