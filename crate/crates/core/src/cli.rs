//! Command-line front end: configuration resolution, command dispatch and
//! file output.
//!
//! A run is described by a [`RunConfig`], read from a JSON file and then
//! overridden by flags. Exit codes are 0 on success, 2 for configuration
//! errors, 3 for degraded results and 4 for internal failures.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::corner::{default_candidates, default_directions};
use crate::analysis::export::{write_alpha_csv, write_beta_csv, write_json};
use crate::analysis::{
    build_alpha_field, corner_scan, flat_detect, mane_stability_sweep, verify_max_formula,
    AlphaField, Axis, BetaGrid, CheckSummary, CornerOptions, Lattice, StabilityOptions, TOL_FLAT,
};
use crate::channel::{barrier_check, build_channel_model, BarrierCheck, ChannelModelSpec};
use crate::engine::{AlphaSolver, BudgetConfig, HomologyBudget, SolverOptions};
use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEGRADED: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Hole fraction above which a field counts as degraded.
pub const MAX_HOLE_FRACTION: f64 = 0.1;
pub const DEFAULT_RESOLUTION: usize = 41;
const DEFAULT_FLAT_RESOLUTION: usize = 11;
const DEFAULT_CHECK_TOL: f64 = 1e-4;
const DEFAULT_LEMMA_TOL: f64 = 1e-2;
const DEFAULT_BARRIER_EPS: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(
    name = "mather",
    version,
    about = "Mather α/β functions of channel Lagrangians"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub shared: SharedArgs,
}

#[derive(Clone, Debug, Default, Args)]
pub struct SharedArgs {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Model spec JSON, overriding the config's model.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for loop restarts and perturbations
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for grid evaluation.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Points per free lattice axis.
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Command tolerance (flat, corner or check threshold).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Print the resolved configuration and exit.
    #[arg(long, global = true)]
    pub dry_run: bool,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Write or validate a channel model spec.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// α over a cohomology lattice (CSV plus JSON summary).
    Alpha,
    /// β at the budget's rotation vectors (CSV plus JSON summary).
    Beta,
    /// Flat of α around its minimum.
    Flat,
    /// One-sided derivatives and supports at candidate corners.
    Corners,
    /// α against the largest channel-restricted value.
    VerifyLemma,
    /// Corner persistence under random perturbations.
    Stability,
}

#[derive(Clone, Copy, Debug, Subcommand)]
pub enum ModelAction {
    Build,
    Check,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Model {
                action: ModelAction::Build,
            } => "model build",
            Command::Model {
                action: ModelAction::Check,
            } => "model check",
            Command::Alpha => "alpha",
            Command::Beta => "beta",
            Command::Flat => "flat",
            Command::Corners => "corners",
            Command::VerifyLemma => "verify-lemma",
            Command::Stability => "stability",
        }
    }
}

/// Where the model comes from: a spec file or an inline spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSource {
    Path(PathBuf),
    Inline(ChannelModelSpec),
}

impl Default for ModelSource {
    fn default() -> Self {
        ModelSource::Inline(ChannelModelSpec::lowest_energy(2))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Option<String>,
    pub model: ModelSource,
    /// Cohomology lattice; each command has its own default.
    pub region: Option<Lattice>,
    /// Overrides the count of every free axis of `region`.
    pub resolution: Option<usize>,
    pub budget: BudgetConfig,
    pub solver: SolverOptions,
    pub tol: Option<f64>,
    pub corner: CornerOptions,
    pub stability: StabilityOptions,
    pub candidates: Option<Vec<Vec<f64>>>,
    pub directions: Option<Vec<Vec<f64>>>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Run(e) => match e {
                Error::Config(_)
                | Error::ChannelOverlap { .. }
                | Error::InvalidInput(_)
                | Error::SubspaceViolation(_)
                | Error::ChannelIndex { .. }
                | Error::NormViolation { .. }
                | Error::EmptyGrid => EXIT_CONFIG,
                _ => EXIT_INTERNAL,
            },
        }
    }
}

fn config_err(msg: impl std::fmt::Display) -> CliError {
    CliError::Config(msg.to_string())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

impl RunConfig {
    /// File keys, then flags on top. The model is loaded and stored inline.
    pub fn resolve(command: &Command, shared: &SharedArgs) -> Result<Self, CliError> {
        let mut cfg: RunConfig = match &shared.config {
            Some(path) => read_json(path)?,
            None => RunConfig::default(),
        };
        if let Some(name) = &cfg.command {
            if name != command.name() {
                return Err(config_err(format!(
                    "config is for command '{name}', not '{}'",
                    command.name()
                )));
            }
        }
        cfg.command = Some(command.name().into());
        if let Some(p) = &shared.model {
            cfg.model = ModelSource::Path(p.clone());
        }
        if let ModelSource::Path(p) = &cfg.model {
            let base = shared.config.as_deref().and_then(Path::parent);
            let path = match base {
                Some(dir) if p.is_relative() && shared.model.is_none() => dir.join(p),
                _ => p.clone(),
            };
            cfg.model = ModelSource::Inline(read_json(&path)?);
        }
        if let ModelSource::Inline(spec) = &cfg.model {
            cfg.model = ModelSource::Inline(spec.resolved());
        }
        if let Some(v) = &shared.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = shared.seed {
            cfg.seed = Some(v);
        }
        if let Some(v) = shared.jobs {
            cfg.jobs = Some(v);
        }
        if let Some(v) = shared.resolution {
            cfg.resolution = Some(v);
        }
        if let Some(v) = shared.tol {
            cfg.tol = Some(v);
        }
        if let Some(seed) = cfg.seed {
            cfg.solver.seed = seed;
            cfg.stability.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(config_err(format!("tol must be positive, got {t}")));
            }
        }
        if let Some(r) = self.resolution {
            if r < crate::analysis::alpha::MIN_RESOLUTION {
                return Err(config_err(format!(
                    "resolution {r} is below the minimum of {}",
                    crate::analysis::alpha::MIN_RESOLUTION
                )));
            }
        }
        if self.jobs == Some(0) {
            return Err(config_err("jobs must be at least 1"));
        }
        let positive = [
            ("solver.minimize.tol", self.solver.minimize.tol),
            ("corner.t0", self.corner.t0),
            ("corner.tol_corner", self.corner.tol_corner),
            (
                "stability.corner.tol_corner",
                self.stability.corner.tol_corner,
            ),
            (
                "stability.persistence_radius",
                self.stability.persistence_radius,
            ),
            ("stability.search_radius", self.stability.search_radius),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(config_err(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(region) = &self.region {
            region.validate()?;
            let n = self.spec().n;
            if region.axes.len() != n {
                return Err(config_err(format!(
                    "region has {} axes, model dimension is {n}",
                    region.axes.len()
                )));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &ChannelModelSpec {
        match &self.model {
            ModelSource::Inline(s) => s,
            ModelSource::Path(_) => unreachable!("model paths are loaded during resolve"),
        }
    }

    /// The configured region with `resolution` applied, or `default`.
    fn lattice(
        &self,
        default: impl FnOnce(usize) -> Result<Lattice, Error>,
        fallback: usize,
    ) -> Result<Lattice, Error> {
        match &self.region {
            Some(region) => {
                let mut l = region.clone();
                if let Some(r) = self.resolution {
                    for a in l.axes.iter_mut().filter(|a| a.count > 1) {
                        a.count = r;
                    }
                }
                l.validate()?;
                Ok(l)
            }
            None => default(self.resolution.unwrap_or(fallback)),
        }
    }

    fn solver(&self) -> Result<AlphaSolver, Error> {
        let model = build_channel_model(self.spec())?;
        let budget = HomologyBudget::from_config(&model, &self.budget)?;
        AlphaSolver::new(&model, budget, self.solver.clone())
    }
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub degraded: bool,
    /// One-line summary for stderr.
    pub message: String,
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// `run.csv` → `run.summary.json`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

#[derive(Serialize)]
struct ModelDocument<'a> {
    spec: &'a ChannelModelSpec,
    barrier_check: &'a BarrierCheck,
}

#[derive(Serialize)]
struct AlphaSummary {
    points: usize,
    holes: usize,
    hole_fraction: f64,
    minimum: Option<(Vec<f64>, f64)>,
    /// Crossings of `min α + tol_flat` along the single free axis.
    level_crossings: Option<(Option<f64>, Option<f64>)>,
    convexity: CheckSummary,
    symmetry: CheckSummary,
    fenchel_young: CheckSummary,
    budget_boundary_winners: usize,
}

fn alpha_summary(field: &AlphaField, tol: f64) -> AlphaSummary {
    let minimum = field.minimum().map(|(i, v)| (field.lattice.point(i), v));
    let level_crossings = match (field.lattice.free_axes().len(), &minimum) {
        (1, Some((_, min))) => field.level_crossings(*min, TOL_FLAT).ok(),
        _ => None,
    };
    AlphaSummary {
        points: field.samples.len(),
        holes: field.holes(),
        hole_fraction: field.hole_fraction(),
        minimum,
        level_crossings,
        convexity: field.convexity(tol, 4),
        symmetry: field.symmetry(tol),
        fenchel_young: field.fenchel_young(tol),
        budget_boundary_winners: field
            .samples
            .iter()
            .filter(|s| s.winner.as_ref().is_some_and(|w| w.budget_boundary))
            .count(),
    }
}

fn default_slice(n: usize) -> impl FnOnce(usize) -> Result<Lattice, Error> {
    move |count| Lattice::slice(n, 0, -1.0, 1.0, count)
}

fn run_model(cfg: &RunConfig, action: ModelAction) -> Result<Outcome, CliError> {
    let spec = cfg.spec().clone();
    spec.validate()?;
    build_channel_model(&spec)?;
    let check = barrier_check(&spec, cfg.tol.unwrap_or(DEFAULT_BARRIER_EPS));
    let mut message = format!(
        "barrier check: 2√(K₁K₂)·width = {:.6} vs n + 1 + ε = {:.6}: {}",
        check.lhs,
        check.rhs,
        if check.satisfied {
            "satisfied"
        } else {
            "NOT satisfied"
        }
    );
    if !check.satisfied {
        message.push_str(
            "\nwarning: the barrier inequality fails; channel confinement is not guaranteed",
        );
    }
    let mut out = open_out(cfg.out.as_deref())?;
    match action {
        ModelAction::Build => {
            serde_json::to_writer_pretty(&mut out, &spec).map_err(Error::from)?;
            out.write_all(b"\n").map_err(Error::from)?;
        }
        ModelAction::Check => write_json(
            &mut out,
            "model_check",
            &ModelDocument {
                spec: &spec,
                barrier_check: &check,
            },
        )?,
    }
    out.flush().map_err(Error::from)?;
    Ok(Outcome {
        degraded: false,
        message,
    })
}

fn write_with_summary<S: Serialize>(
    cfg: &RunConfig,
    schema: &str,
    summary: &S,
    csv: impl FnOnce(&mut dyn Write) -> Result<(), Error>,
) -> Result<(), Error> {
    let mut out = open_out(cfg.out.as_deref())?;
    csv(&mut out)?;
    out.flush()?;
    match &cfg.out {
        Some(p) => {
            let mut w = BufWriter::new(File::create(summary_path(p))?);
            write_json(&mut w, schema, summary)?;
            w.flush()?;
        }
        None => write_json(io::stderr().lock(), schema, summary)?,
    }
    Ok(())
}

fn run_alpha(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let solver = cfg.solver()?;
    let lattice = cfg.lattice(default_slice(cfg.spec().n), DEFAULT_RESOLUTION)?;
    let field = build_alpha_field(&solver, &lattice)?;
    let summary = alpha_summary(&field, cfg.tol.unwrap_or(DEFAULT_CHECK_TOL));
    write_with_summary(cfg, "alpha_summary", &summary, |w| {
        write_alpha_csv(w, &field)
    })?;
    Ok(Outcome {
        degraded: summary.hole_fraction > MAX_HOLE_FRACTION,
        message: format!(
            "{} points, {} holes, minimum {:?}",
            summary.points, summary.holes, summary.minimum
        ),
    })
}

#[derive(Serialize)]
struct BetaSummary {
    samples: usize,
    origin: f64,
    ray_convexity: CheckSummary,
}

fn run_beta(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let solver = cfg.solver()?;
    let grid = BetaGrid::from_solver(&solver);
    let summary = BetaSummary {
        samples: grid.samples.len(),
        origin: grid.origin(),
        ray_convexity: grid.ray_convexity(cfg.tol.unwrap_or(DEFAULT_CHECK_TOL)),
    };
    write_with_summary(cfg, "beta_summary", &summary, |w| write_beta_csv(w, &grid))?;
    Ok(Outcome {
        degraded: false,
        message: format!("{} samples, β(0) = {}", summary.samples, summary.origin),
    })
}

fn run_flat(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let solver = cfg.solver()?;
    let n = cfg.spec().n;
    let lattice = cfg.lattice(
        |count| Lattice::new(vec![Axis::new(-0.05, 0.05, count); n]),
        DEFAULT_FLAT_RESOLUTION,
    )?;
    let field = build_alpha_field(&solver, &lattice)?;
    let report = flat_detect(&field, None, cfg.tol.unwrap_or(TOL_FLAT))?;
    let mut out = open_out(cfg.out.as_deref())?;
    write_json(&mut out, "flat_report", &report)?;
    out.flush().map_err(Error::from)?;
    Ok(Outcome {
        degraded: field.hole_fraction() > MAX_HOLE_FRACTION,
        message: format!(
            "flat level {:.3e}: {} members, dimension {}",
            report.level, report.member_count, report.dimension
        ),
    })
}

fn run_corners(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let solver = cfg.solver()?;
    let candidates = match &cfg.candidates {
        Some(c) => c.clone(),
        None => default_candidates(&solver)?,
    };
    let directions = match &cfg.directions {
        Some(d) => d.clone(),
        None => default_directions(&solver),
    };
    let mut opts = cfg.corner.clone();
    opts.tol_corner = cfg.tol.unwrap_or(opts.tol_corner);
    let reports = corner_scan(&solver, &candidates, &directions, &opts)?;
    let mut out = open_out(cfg.out.as_deref())?;
    write_json(&mut out, "corner_reports", &reports)?;
    out.flush().map_err(Error::from)?;
    let flagged = reports.iter().filter(|r| r.flagged).count();
    let failed = reports.iter().filter(|r| !r.failures.is_empty()).count();
    Ok(Outcome {
        degraded: failed as f64 > MAX_HOLE_FRACTION * reports.len() as f64,
        message: format!(
            "{flagged} of {} candidates flagged as corners",
            reports.len()
        ),
    })
}

#[derive(Serialize)]
struct LemmaDocument<'a> {
    tol: f64,
    passed: bool,
    report: &'a crate::analysis::LemmaReport,
}

fn run_lemma(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let solver = cfg.solver()?;
    let lattice = cfg.lattice(default_slice(cfg.spec().n), DEFAULT_RESOLUTION)?;
    let report = verify_max_formula(&solver, &lattice)?;
    let tol = cfg.tol.unwrap_or(DEFAULT_LEMMA_TOL);
    let passed = report.max_error < tol && report.winners_in_a_or_b;
    let mut out = open_out(cfg.out.as_deref())?;
    write_json(
        &mut out,
        "lemma_report",
        &LemmaDocument {
            tol,
            passed,
            report: &report,
        },
    )?;
    out.flush().map_err(Error::from)?;
    Ok(Outcome {
        degraded: report.holes as f64 > MAX_HOLE_FRACTION * report.points.len() as f64,
        message: format!(
            "max error {:.3e} over {} points ({})",
            report.max_error,
            report.points.len(),
            if passed {
                "within tolerance"
            } else {
                "OUT OF TOLERANCE"
            }
        ),
    })
}

fn run_stability(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut opts = cfg.stability.clone();
    if let Some(t) = cfg.tol {
        opts.corner.tol_corner = t;
    }
    let report = mane_stability_sweep(cfg.spec(), &cfg.budget, &cfg.solver, &opts)?;
    let mut out = open_out(cfg.out.as_deref())?;
    write_json(&mut out, "stability_report", &report)?;
    out.flush().map_err(Error::from)?;
    let failed = report
        .results
        .iter()
        .filter(|r| r.failure.is_some())
        .count();
    Ok(Outcome {
        degraded: failed as f64 > MAX_HOLE_FRACTION * report.trials as f64,
        message: format!(
            "{} of {} corners persisted",
            report.persisted, report.trials
        ),
    })
}

/// Resolves the configuration and runs one command.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = RunConfig::resolve(&cli.command, &cli.shared)?;
    if cli.shared.dry_run {
        let mut out = io::stdout().lock();
        serde_json::to_writer_pretty(&mut out, &cfg).map_err(Error::from)?;
        out.write_all(b"\n").map_err(Error::from)?;
        return Ok(Outcome {
            degraded: false,
            message: "dry run".into(),
        });
    }
    let work = || match &cli.command {
        Command::Model { action } => run_model(&cfg, *action),
        Command::Alpha => run_alpha(&cfg),
        Command::Beta => run_beta(&cfg),
        Command::Flat => run_flat(&cfg),
        Command::Corners => run_corners(&cfg),
        Command::VerifyLemma => run_lemma(&cfg),
        Command::Stability => run_stability(&cfg),
    };
    match cfg.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Run(Error::input(format!("thread pool: {e}"))))?
            .install(work),
        None => work(),
    }
}

/// Runs the parsed command line, reports on stderr, returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(outcome) => {
            eprintln!("{}", outcome.message);
            if outcome.degraded {
                eprintln!("degraded result: too many failed evaluations");
                EXIT_DEGRADED
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
