use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mosearch::agents::{run_episode_with, Decision, EpisodeObserver};
use mosearch::candidates::decayed_map;
use mosearch::harness::{
    generate_scenarios, run_batch, score, write_outputs, AgentSummary, BatchConfig, GeneratorSpec, ScenarioSource,
};
use mosearch::mapping::{aggregate, combined_updates, dump, ValueLayer};
use mosearch::{AgentKind, AgentParams, OccupancyGrid, Scenario};

/// Multi-object search on grid worlds: scenario generation, batch
/// evaluation, single-episode replay and scoring.
#[derive(Parser)]
#[command(name = "mosearch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate scenario files.
    Gen(GenCmd),
    /// Run every agent on every scenario and write rows.csv and summary.json.
    Run(RunCmd),
    /// Run one episode with optional map dumps and planner trace.
    Replay(ReplayCmd),
    /// Recompute SR and MSPL from a rows file and check their bounds.
    Score(ScoreCmd),
}

#[derive(Args, Clone)]
struct GenFlags {
    #[arg(long, default_value_t = 40)]
    width: usize,
    #[arg(long, default_value_t = 40)]
    height: usize,
    /// Meters per cell.
    #[arg(long, default_value_t = 0.5)]
    resolution: f64,
    /// Fraction of room floor covered by furniture.
    #[arg(long, default_value_t = 0.1)]
    density: f64,
    /// Target classes per scenario.
    #[arg(long, default_value_t = 3)]
    targets: usize,
    #[arg(long, default_value_t = 3)]
    distractors: usize,
    /// Chance that a visible in-range object is missed.
    #[arg(long)]
    miss_prob: Option<f64>,
}

impl GenFlags {
    fn spec(&self) -> GeneratorSpec {
        let mut spec = GeneratorSpec {
            width: self.width,
            height: self.height,
            resolution: self.resolution,
            obstacle_density: self.density,
            targets: self.targets,
            distractors: self.distractors,
            ..GeneratorSpec::default()
        };
        if let Some(p) = self.miss_prob {
            spec.sensor.miss_prob = p;
        }
        spec
    }
}

#[derive(Args)]
struct GenCmd {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[command(flatten)]
    flags: GenFlags,
}

#[derive(Args)]
struct RunCmd {
    /// Batch configuration file (TOML). Other flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario files; without these, scenarios are generated.
    #[arg(long, num_args = 1..)]
    scenarios: Vec<PathBuf>,
    /// Number of generated scenarios.
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[command(flatten)]
    flags: GenFlags,
    /// Comma-separated agent names; default all.
    #[arg(long, value_delimiter = ',')]
    agents: Vec<AgentKind>,
    /// Worker threads; 0 picks one per core.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    step_budget: Option<usize>,
    #[arg(long)]
    n_sims: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReplayCmd {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "ovamos")]
    agent: AgentKind,
    /// Write map layers per decision as JSON lines.
    #[arg(long)]
    dump_maps: Option<PathBuf>,
    /// Write one JSON line per step, including planner root statistics.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    step_budget: Option<usize>,
    #[arg(long)]
    n_sims: Option<usize>,
}

#[derive(Args)]
struct ScoreCmd {
    /// A rows.csv written by `run`.
    rows: PathBuf,
}

fn print_summary(summary: &[AgentSummary]) {
    println!("{:<18} {:>8} {:>7} {:>7}", "agent", "episodes", "SR", "MSPL");
    for s in summary {
        println!("{:<18} {:>8} {:>7.3} {:>7.3}", s.agent, s.episodes, s.sr, s.mspl);
    }
}

fn gen(cmd: GenCmd) -> Result<()> {
    let scenarios = generate_scenarios(&cmd.flags.spec(), cmd.count, cmd.seed)?;
    fs::create_dir_all(&cmd.out).with_context(|| format!("creating {}", cmd.out.display()))?;
    for (i, s) in scenarios.iter().enumerate() {
        s.save(cmd.out.join(format!("gen-{i:04}.toml")))?;
    }
    println!("wrote {} scenarios to {}", scenarios.len(), cmd.out.display());
    Ok(())
}

fn run(cmd: RunCmd) -> Result<()> {
    let mut config = match &cmd.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str::<BatchConfig>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => BatchConfig {
            scenarios: ScenarioSource::Generated {
                spec: cmd.flags.spec(),
                count: cmd.count,
                master_seed: cmd.seed,
            },
            ..BatchConfig::default_generated(cmd.seed)
        },
    };
    if !cmd.scenarios.is_empty() {
        config.scenarios = ScenarioSource::Files(cmd.scenarios.clone());
    }
    if !cmd.agents.is_empty() {
        config.agents = cmd.agents.clone();
    }
    if let Some(t) = cmd.threads {
        config.threads = t;
    }
    if let Some(b) = cmd.step_budget {
        config.params.step_budget = b;
    }
    if let Some(n) = cmd.n_sims {
        config.params.planner.n_sims = n;
    }
    let result = run_batch(&config)?;
    write_outputs(&cmd.out, &config, &result)?;
    print_summary(&result.summary);
    println!("wrote {}", cmd.out.display());
    Ok(())
}

/// Writes the map layers seen at every decision.
struct MapDump {
    out: BufWriter<File>,
    agent: AgentKind,
    params: AgentParams,
}

impl EpisodeObserver for MapDump {
    fn observe(
        &mut self,
        step: u64,
        grid: &OccupancyGrid,
        layers: &[ValueLayer],
        _decision: &Decision,
    ) -> mosearch::Result<()> {
        let shared = (!layers.is_empty()).then(|| aggregate(layers));
        let decayed = match (&shared, self.agent) {
            (Some(s), AgentKind::OvamosNoDecay) => Some(s.v.clone()),
            (Some(s), _) => Some(decayed_map(s, &combined_updates(layers), &self.params.decay)),
            (None, _) => None,
        };
        dump::write_step(&mut self.out, step, grid, layers, shared.as_ref(), decayed.as_deref())?;
        Ok(())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn replay(cmd: ReplayCmd) -> Result<()> {
    let scenario = Scenario::load(&cmd.scenario)?;
    let mut params = AgentParams::default();
    if let Some(b) = cmd.step_budget {
        params.step_budget = b;
    }
    if let Some(n) = cmd.n_sims {
        params.planner.n_sims = n;
    }
    let result = match &cmd.dump_maps {
        Some(path) => {
            let mut dump = MapDump {
                out: create(path)?,
                agent: cmd.agent,
                params,
            };
            let r = run_episode_with(&scenario, cmd.agent, &params, &mut dump)?;
            dump.out.flush()?;
            r
        }
        None => run_episode_with(&scenario, cmd.agent, &params, &mut ())?,
    };
    if let Some(path) = &cmd.trace {
        let mut out = create(path)?;
        for step in &result.trace {
            serde_json::to_writer(&mut out, step)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
    }
    let found: Vec<String> = result
        .targets
        .iter()
        .zip(&result.found_step)
        .map(|(t, f)| match f {
            Some(s) => format!("{t}@{s}"),
            None => format!("{t}:missed"),
        })
        .collect();
    println!(
        "agent={} success={} steps={} path={:.2}m optimal={} termination={:?} found=[{}]",
        result.agent,
        result.success,
        result.steps,
        result.path_length,
        result.optimal_length.map_or("n/a".into(), |l| format!("{l:.2}m")),
        result.termination,
        found.join(", ")
    );
    Ok(())
}

fn score_cmd(cmd: ScoreCmd) -> Result<()> {
    let summary = score(&cmd.rows)?;
    if summary.is_empty() {
        bail!("{}: no rows", cmd.rows.display());
    }
    print_summary(&summary);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(c) => gen(c),
        Command::Run(c) => run(c),
        Command::Replay(c) => replay(c),
        Command::Score(c) => score_cmd(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
