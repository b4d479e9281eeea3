//! Command-line front end: loads graph and measure files, runs the
//! constructions and the verification suite, and renders JSON reports.

pub mod input;
pub mod report;
pub mod suite;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pi1_haar::convalg::verify_algebra_iso;
use pi1_haar::cover::pi1_generators;
use pi1_haar::edgepath::enumerate_ball;
use pi1_haar::graphspace::validate_graph;
use pi1_haar::haar::verify_group_case;
use pi1_haar::{MultiGraph, VertexId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::input::MeasureInput;
use crate::report::{
    ConfigSummary, ErrorSummary, GraphSummary, GroupCaseSummary, MeasureSummary, RunReport, SystemSummary,
};
use crate::suite::{Fixture, Mutation, SuiteOptions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Domain(#[from] pi1_haar::Error),
}

impl CliError {
    /// 1 for failures of the mathematics, 2 for bad invocations and files.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "pi1haar", version, about = "Haar systems on fundamental groupoids of finite graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Check that a graph file describes a finite connected multigraph.
    Validate,
    /// Print the Haar system induced by a vertex measure.
    Haar,
    /// Run the full verification suite.
    Verify,
    /// Check the trivialization of the convolution algebra.
    Iso,
    /// Compare with the transformation groupoid of the rotation action.
    GroupCase,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Haar => "haar",
            Command::Verify => "verify",
            Command::Iso => "iso",
            Command::GroupCase => "group-case",
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct Options {
    /// Graph file: {"vertices": N, "edges": [{"id", "src", "dst"}]}.
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Measure file: {"base_point": x, "sigma" | "nu": {"0": "1/2", ...}}.
    #[arg(long, global = true)]
    pub measure: Option<PathBuf>,
    /// Base point; overrides the one in the measure file.
    #[arg(long, global = true)]
    pub base: Option<usize>,
    #[arg(long, global = true, default_value_t = 4)]
    pub radius: usize,
    #[arg(long, global = true, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Break one ingredient on purpose (test hook).
    #[arg(long, global = true, value_enum)]
    pub mutate: Option<Mutation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub graph: PathBuf,
    pub measure: Option<PathBuf>,
    pub base: Option<usize>,
    pub radius: usize,
    pub trials: usize,
    pub seed: u64,
    pub mutate: Option<Mutation>,
}

impl RunConfig {
    pub fn new(graph: impl Into<PathBuf>) -> Self {
        Self { graph: graph.into(), measure: None, base: None, radius: 4, trials: 200, seed: 0, mutate: None }
    }
}

impl TryFrom<&Options> for RunConfig {
    type Error = CliError;

    fn try_from(o: &Options) -> Result<Self, CliError> {
        let graph = o.graph.clone().ok_or_else(|| CliError::Usage("--graph is required".into()))?;
        if o.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        Ok(Self {
            graph,
            measure: o.measure.clone(),
            base: o.base,
            radius: o.radius,
            trials: o.trials,
            seed: o.seed,
            mutate: o.mutate,
        })
    }
}

/// Exit code and rendered report of one command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

impl Outcome {
    fn from_report(report: &RunReport) -> Self {
        Self { code: if report.passed { 0 } else { 1 }, report: report.to_json() }
    }
}

/// Runs `command`. Domain failures come back as an `Outcome` with exit code
/// 1 and an `error` entry; usage and IO problems are returned as errors.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let result = match command {
        Command::Validate => cmd_validate(cfg),
        Command::Haar => cmd_haar(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Iso => cmd_iso(cfg),
        Command::GroupCase => cmd_group_case(cfg),
    };
    match result {
        Err(CliError::Domain(e)) => {
            let mut report = RunReport::new(command.name());
            report.passed = false;
            report.error = Some(ErrorSummary { kind: e.kind().into(), message: e.to_string() });
            Ok(Outcome::from_report(&report))
        }
        other => other,
    }
}

struct Loaded {
    graph: MultiGraph,
    base: VertexId,
    measure: MeasureInput,
}

fn load(cfg: &RunConfig) -> Result<Loaded, CliError> {
    let graph = input::read_graph(&cfg.graph)?;
    let (measure, file_base) = match &cfg.measure {
        Some(path) => input::read_measure(path, graph.vertex_count())?,
        None => (MeasureInput::uniform(graph.vertex_count()), None),
    };
    let base = cfg.base.map(VertexId).or(file_base).unwrap_or(VertexId(0));
    Ok(Loaded { graph, base, measure })
}

fn measure_summary(m: &MeasureInput) -> Result<MeasureSummary, CliError> {
    let nu = m.base_measure()?;
    let sigma = match m {
        MeasureInput::Sigma(s) => Some(report::rationals(s)),
        MeasureInput::Nu(_) => None,
    };
    Ok(MeasureSummary { sigma, nu: report::rationals(nu.weights()) })
}

fn config_summary(cfg: &RunConfig, base: VertexId) -> ConfigSummary {
    ConfigSummary {
        base: base.0,
        radius: cfg.radius,
        trials: cfg.trials,
        seed: cfg.seed,
        mutate: cfg.mutate.map(|m| m.name().to_string()),
    }
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let graph = input::read_unvalidated_graph(&cfg.graph)?;
    validate_graph(&graph)?;
    let base = VertexId(cfg.base.unwrap_or(0));
    let t = pi1_haar::Transversal::new(&graph, base)?;
    let mut report = RunReport::new("validate");
    report.graph = Some(GraphSummary::new(&graph, t.tree().tree_edges()));
    Ok(Outcome::from_report(&report))
}

pub fn cmd_haar(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let loaded = load(cfg)?;
    let fx = Fixture::new(&loaded.graph, loaded.base, loaded.measure.base_measure()?)?;
    let h = fx.haar()?;
    let tree = fx.transversal.tree();
    let mut report = RunReport::new("haar");
    report.config = Some(config_summary(cfg, loaded.base));
    report.graph = Some(GraphSummary::new(&loaded.graph, tree.tree_edges()));
    report.measure = Some(measure_summary(&loaded.measure)?);
    report.system = Some(SystemSummary::new(&h, &enumerate_ball(&loaded.graph, cfg.radius), cfg.radius));
    report.section = report::section_lines(&fx.section);
    report.generators = Some(pi1_generators(&fx.transversal, &tree)?.iter().map(ToString::to_string).collect());
    Ok(Outcome::from_report(&report))
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let loaded = load(cfg)?;
    let weights = loaded.measure.weights()?;
    let fx = Fixture::new(&loaded.graph, loaded.base, weights.base_measure())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let opts = SuiteOptions { radius: cfg.radius, trials: cfg.trials, mutation: cfg.mutate };
    let run = suite::run(&fx, &weights, &opts, &mut rng)?;

    let tree = fx.transversal.tree();
    let mut report = RunReport::new("verify");
    report.config = Some(config_summary(cfg, loaded.base));
    report.graph = Some(GraphSummary::new(&loaded.graph, tree.tree_edges()));
    report.measure = Some(measure_summary(&loaded.measure)?);
    report.push_checks(&run.reports);
    report.system =
        Some(SystemSummary::new(&fx.haar()?, &enumerate_ball(&loaded.graph, cfg.radius.min(2)), cfg.radius.min(2)));
    report.section = report::section_lines(&fx.section);
    report.generators = Some(fx.deck.generators().iter().map(ToString::to_string).collect());
    report.group_case = run.group_case.map(|(n, passed)| GroupCaseSummary { n, passed });
    Ok(Outcome::from_report(&report))
}

pub fn cmd_iso(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let loaded = load(cfg)?;
    let weights = loaded.measure.weights()?;
    let fx = Fixture::new(&loaded.graph, loaded.base, weights.base_measure())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let reports =
        verify_algebra_iso(&loaded.graph, &fx.section, &weights, cfg.trials, cfg.trials.min(30), cfg.radius, &mut rng)?;
    let mut report = RunReport::new("iso");
    report.config = Some(config_summary(cfg, loaded.base));
    report.measure = Some(measure_summary(&loaded.measure)?);
    report.push_checks(&reports);
    report.section = report::section_lines(&fx.section);
    Ok(Outcome::from_report(&report))
}

pub fn cmd_group_case(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let loaded = load(cfg)?;
    let mut report = RunReport::new("group-case");
    report.config = Some(config_summary(cfg, loaded.base));
    if !loaded.graph.is_standard_cycle() {
        report.passed = false;
        report.error = Some(ErrorSummary {
            kind: "NotACycle".into(),
            message: "group-case needs the cycle with edge i from vertex i to vertex i+1 mod n".into(),
        });
        return Ok(Outcome::from_report(&report));
    }
    let nu = loaded.measure.base_measure()?;
    report.measure = Some(measure_summary(&loaded.measure)?);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let v = verify_group_case(loaded.graph.vertex_count(), &nu, cfg.radius, cfg.trials, &mut rng)?;
    report.push_checks(&v.reports);
    report.group_case = Some(GroupCaseSummary { n: v.n, passed: v.is_clean() });
    Ok(Outcome::from_report(&report))
}
