//! Command-line front end: `run`, `validate`, `sweep` and `presets`.
//!
//! A scenario argument is a path to a TOML scenario file or `preset:NAME`
//! for a built-in preset. Exit codes: 0 success, 1 runtime abort or failed
//! validation, 2 usage, parse or setup error.

pub mod svg;

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::Error;
use crate::geometry::check_derivatives;
use crate::sim::config::{Gains, ModelKind, ScenarioConfig};
use crate::sim::telemetry::{write_diagnostics, write_telemetry, Frame};
use crate::sim::{integrate, presets, Run, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read scenario `{path}`: {message}")]
    Read { path: String, message: String },
    #[error("cannot parse scenario `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("invalid scenario: {0}")]
    Invalid(Error),
    #[error("cannot write `{path}`: {message}")]
    Output { path: String, message: String },
    #[error("run aborted: {0}")]
    Runtime(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) => 1,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// `println!` that ignores a closed stdout, e.g. when piped into `head`.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Debug, Parser)]
#[command(name = "cgvf", version, about = "Coordinated guiding vector field simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a scenario and write telemetry.
    Run(RunArgs),
    /// Check a scenario without simulating it.
    Validate {
        /// Scenario file or `preset:NAME`.
        scenario: String,
    },
    /// Run a scenario once per value of a parameter.
    Sweep(SweepArgs),
    /// Built-in presets.
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario file or `preset:NAME`.
    scenario: String,
    /// Output directory (default `out/<name>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write `trajectories.svg`.
    #[arg(long)]
    plot: bool,
    /// Record every N-th step.
    #[arg(long)]
    decimate: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Scenario file or `preset:NAME`.
    scenario: String,
    /// Parameter to vary.
    #[arg(long)]
    param: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    values: Vec<f64>,
    /// Output directory (default `out/<name>-sweep`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Coordination error below which a run counts as settled.
    #[arg(long, default_value_t = 1e-2)]
    threshold: f64,
}

#[derive(Debug, Subcommand)]
enum PresetsAction {
    /// List preset names and descriptions.
    List,
    /// Write presets as scenario files.
    Export {
        /// Preset to export; all presets when omitted.
        name: Option<String>,
        #[arg(long, default_value = "presets")]
        dir: PathBuf,
    },
}

/// Options of one `run`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    pub out: Option<PathBuf>,
    pub decimation: Option<usize>,
    pub plot: bool,
    pub seed: Option<u64>,
}

/// Files written by a successful run.
#[derive(Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub summary: Value,
    pub run: Run,
    pub scenario: Scenario,
    pub warnings: Vec<String>,
}

/// Loads a scenario file, or a preset given as `preset:NAME`.
pub fn load_scenario(spec: &str) -> CliResult<ScenarioConfig> {
    if let Some(name) = spec.strip_prefix("preset:") {
        return presets::by_name(name).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown preset `{name}`; available: {}",
                presets::NAMES.join(", ")
            ))
        });
    }
    let src = fs::read_to_string(spec).map_err(|e| CliError::Read {
        path: spec.to_string(),
        message: e.to_string(),
    })?;
    toml::from_str(&src).map_err(|e: toml::de::Error| CliError::Parse {
        path: spec.to_string(),
        message: e.to_string(),
    })
}

/// Assumption-1 warning for a coordinated scenario on a disconnected graph.
fn graph_warnings(cfg: &ScenarioConfig, scenario: &Scenario) -> Vec<String> {
    if cfg.coordination.enabled && scenario.robot_count() > 1 && !scenario.graph.is_connected() {
        vec!["Assumption 1 violated: the communication graph is disconnected".to_string()]
    } else {
        Vec::new()
    }
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Output {
        path: dir.display().to_string(),
        message: e.to_string(),
    })
}

fn create_file(path: &Path) -> CliResult<BufWriter<fs::File>> {
    fs::File::create(path).map(BufWriter::new).map_err(|e| CliError::Output {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn write_output(path: &Path, res: crate::Result<()>) -> CliResult<()> {
    res.map_err(|e| CliError::Output {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn stats_of(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Final errors of a frame as written to `summary.json`.
pub fn final_errors(frame: &Frame) -> Value {
    json!({
        "t": frame.t,
        "max_phi_norm": frame.max_phi_norm(),
        "max_coord_err": frame.max_coord_err(),
        "composite_error": frame.composite_norm,
        "V": frame.v,
    })
}

/// The `summary.json` document of a run.
pub fn summary_json(scenario: &Scenario, run: &Run, warnings: &[String]) -> Value {
    let last = run.frames.last();
    let (v_min, v_max) = stats_of(run.frames.iter().map(|f| f.v));
    let s = &run.stats;
    let mut doc = json!({
        "name": scenario.name,
        "robots": scenario.robot_count(),
        "ambient_dim": scenario.ambient_dim(),
        "param_count": scenario.param_count(),
        "model": if scenario.is_dubins() { "dubins" } else { "single_integrator" },
        "duration": scenario.duration,
        "step": scenario.step,
        "steps": s.steps,
        "frames": run.frames.len(),
        "final": last.map(final_errors),
        "h_min": s.h_min,
        "lyapunov": {
            "initial": run.frames.first().map(|f| f.v),
            "final": last.map(|f| f.v),
            "min": v_min,
            "max": v_max,
            "max_step_increase": s.max_lyapunov_increase,
        },
        "communication": {
            "fresh": scenario.fresh_communication(),
            "beyond_theory": !scenario.fresh_communication(),
        },
        "warnings": warnings,
        "events": run.events.iter().map(|e| json!({
            "t": e.t,
            "kind": e.kind.name(),
            "robots": e.robots,
            "detail": e.detail,
        })).collect::<Vec<_>>(),
        "aborted": run.abort.as_ref().map(|e| e.to_string()),
    });
    if scenario.safety.is_some() {
        doc["safety"] = json!({
            "qp_infeasible": s.qp_infeasible,
            "max_active": s.max_active,
            "max_qp1_violation": s.max_qp1_violation,
        });
    }
    if scenario.is_dubins() {
        doc["guidance"] = json!({
            "max_theta_dot_d": s.max_theta_dot_d,
            "saturated_steps": s.saturated_steps,
            "max_heading_lyapunov_increase": s.max_heading_lyapunov_increase,
            "final_sigma": s.final_sigma,
        });
    }
    doc
}

fn write_artifacts(dir: &Path, scenario: &Scenario, run: &Run, summary: &Value, plot: bool) -> CliResult<()> {
    create_dir(dir)?;
    let (n, k, dubins) = (scenario.ambient_dim(), scenario.param_count(), scenario.is_dubins());
    let p = dir.join("telemetry.csv");
    write_output(&p, write_telemetry(create_file(&p)?, &run.frames, n, k, dubins))?;
    let p = dir.join("diagnostics.csv");
    write_output(&p, write_diagnostics(create_file(&p)?, &run.frames, k, scenario.graph.edges()))?;
    let p = dir.join("summary.json");
    let text = serde_json::to_string_pretty(summary).expect("summary serializes");
    fs::write(&p, text + "\n").map_err(|e| CliError::Output {
        path: p.display().to_string(),
        message: e.to_string(),
    })?;
    if plot {
        let p = dir.join("trajectories.svg");
        fs::write(&p, svg::trajectories(scenario, &run.frames)).map_err(|e| CliError::Output {
            path: p.display().to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(())
}

/// Loads, validates, integrates and writes the artifacts of one scenario.
/// Artifacts are written even when the run aborts.
pub fn cmd_run(cfg: &RunConfig) -> CliResult<RunOutcome> {
    let mut sc_cfg = load_scenario(&cfg.scenario)?;
    if let Some(seed) = cfg.seed {
        sc_cfg.run.seed = seed;
    }
    if let Some(d) = cfg.decimation {
        sc_cfg.run.decimate = d;
    }
    let scenario = sc_cfg.build().map_err(CliError::Invalid)?;
    let warnings = graph_warnings(&sc_cfg, &scenario);
    let out_dir = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(&scenario.name));
    create_dir(&out_dir)?;
    let mut run = integrate(&scenario).map_err(CliError::Invalid)?;
    let summary = summary_json(&scenario, &run, &warnings);
    write_artifacts(&out_dir, &scenario, &run, &summary, cfg.plot)?;
    if let Some(e) = run.abort.take() {
        return Err(CliError::Runtime(e));
    }
    Ok(RunOutcome {
        out_dir,
        summary,
        run,
        scenario,
        warnings,
    })
}

/// One line of the validation checklist.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "ok" } else { "FAILED" };
        write!(f, "{} {status}: {}", self.name, self.detail)
    }
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

/// Parameter samples for the derivative check.
fn parameter_samples(k: usize) -> Vec<Vec<f64>> {
    let grid = |count: usize| -> Vec<f64> {
        (0..count)
            .map(|s| -std::f64::consts::TAU + 2.0 * std::f64::consts::TAU * s as f64 / (count - 1) as f64)
            .collect()
    };
    match k {
        1 => grid(201).into_iter().map(|w| vec![w]).collect(),
        _ => {
            let g = grid(41);
            g.iter().flat_map(|a| g.iter().map(move |b| vec![*a, *b])).collect()
        }
    }
}

/// Runs the validation checklist on a parsed scenario.
pub fn validate_config(cfg: &ScenarioConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    match cfg.build_graph() {
        Ok(_) if !cfg.coordination.enabled => checks.push(check(
            "Assumption 1",
            true,
            "coordination disabled; connectivity not required",
        )),
        Ok(g) if g.vertex_count() == 1 || g.is_connected() => checks.push(check(
            "Assumption 1",
            true,
            format!("undirected connected graph, {} vertices, {} edges", g.vertex_count(), g.edge_count()),
        )),
        Ok(g) => checks.push(check(
            "Assumption 1",
            false,
            format!("graph with {} vertices is disconnected", g.vertex_count()),
        )),
        Err(e) => checks.push(check("Assumption 1", false, e.to_string())),
    }

    let mut bad = Vec::new();
    let mut gains = |label: &str, g: &Gains| {
        let vals = match g {
            Gains::All(v) => vec![*v],
            Gains::Each(v) => v.clone(),
        };
        if vals.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            bad.push(format!("{label} = {vals:?}"));
        }
    };
    for (i, g) in cfg.robots.iter().enumerate() {
        gains(&format!("robots[{i}].k_phi"), &g.k_phi);
    }
    if cfg.coordination.enabled {
        if let Some(k) = &cfg.coordination.k_c {
            gains("k_c", k);
        }
    }
    if cfg.guidance.model == ModelKind::Dubins {
        if let Some(kt) = cfg.guidance.k_theta {
            gains("k_theta", &Gains::All(kt));
        }
    }
    if let Some(s) = &cfg.safety {
        gains("alpha", &Gains::All(s.alpha));
        gains("radius", &Gains::All(s.radius));
    }
    if cfg.coordination.enabled && cfg.coordination.k_c.is_none() {
        bad.push("k_c missing".into());
    }
    checks.push(check(
        "gain positivity",
        bad.is_empty(),
        if bad.is_empty() {
            "all gains > 0".to_string()
        } else {
            bad.join(", ")
        },
    ));

    let sets: Vec<_> = cfg.robots.iter().map(|g| g.set.build()).collect();
    let k = sets.iter().flatten().next().map(|s| s.param_count()).unwrap_or(1);
    match cfg.build_graph().and_then(|g| cfg.coordination_spec(&g, k)) {
        Ok(_) => checks.push(check(
            "desired differences",
            true,
            "antisymmetric and zero-sum around every cycle",
        )),
        Err(e) => checks.push(check("desired differences", false, e.to_string())),
    }

    let mut detail = Vec::new();
    let mut ok = true;
    for (g, set) in cfg.robots.iter().zip(&sets) {
        match set {
            Ok(set) => {
                let mut d1: f64 = 0.0;
                let mut d2: f64 = 0.0;
                let mut fd: f64 = 0.0;
                let mut finite = true;
                for w in parameter_samples(set.param_count()) {
                    let jet = set.jet(&w);
                    for m in 0..set.param_count() {
                        d1 = jet.d1[m].iter().fold(d1, |a, v| a.max(v.abs()));
                        for l in 0..set.param_count() {
                            d2 = jet.d2(l, m).iter().fold(d2, |a, v| a.max(v.abs()));
                        }
                    }
                    finite &= jet.value.iter().chain(jet.d1.iter().flatten()).all(|v| v.is_finite());
                    fd = fd.max(check_derivatives(set, &w, 1e-5));
                }
                let scale = 1.0 + d1.max(d2);
                let consistent = fd <= 1e-4 * scale;
                finite &= d1.is_finite() && d2.is_finite();
                ok &= finite && consistent;
                detail.push(format!(
                    "{}: max|f'| = {d1:.3e}, max|f''| = {d2:.3e}, finite-difference mismatch {fd:.1e}",
                    set.label()
                ));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("{:?}: {e}", g.set));
            }
        }
    }
    checks.push(check("derivative boundedness (sampled)", ok, detail.join("; ")));

    match cfg.build() {
        Ok(sc) => checks.push(check(
            "scenario",
            true,
            format!(
                "{} robots, n = {}, k = {}, {} steps",
                sc.robot_count(),
                sc.ambient_dim(),
                sc.param_count(),
                sc.step_count()
            ),
        )),
        Err(e) => checks.push(check("scenario", false, e.to_string())),
    }
    checks
}

pub fn cmd_validate(scenario: &str) -> CliResult<Vec<Check>> {
    Ok(validate_config(&load_scenario(scenario)?))
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub composite_error: f64,
    pub max_phi_norm: f64,
    pub max_coord_err: f64,
    /// First recorded time after which the coordination error stays below
    /// the threshold.
    pub settling_time: Option<f64>,
    pub h_min: Option<f64>,
    pub aborted: Option<String>,
}

/// First frame time from which `max_coord_err` stays below `threshold`.
pub fn settling_time(frames: &[Frame], threshold: f64) -> Option<f64> {
    let mut t = None;
    for f in frames {
        if f.max_coord_err() < threshold {
            t.get_or_insert(f.t);
        } else {
            t = None;
        }
    }
    t
}

/// Runs the scenario once per value, in parallel.
pub fn cmd_sweep(
    scenario: &str,
    param: &str,
    values: &[f64],
    seed: Option<u64>,
    threshold: f64,
    out: Option<&Path>,
) -> CliResult<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(CliError::Usage("sweep needs at least one value".into()));
    }
    let base = load_scenario(scenario)?;
    let mut scenarios = Vec::with_capacity(values.len());
    for &v in values {
        let mut cfg = base.clone();
        if let Some(s) = seed {
            cfg.run.seed = s;
        }
        cfg.apply_override(param, v).map_err(|e| CliError::Usage(e.to_string()))?;
        scenarios.push(cfg.build().map_err(CliError::Invalid)?);
    }
    let runs: Vec<crate::Result<Run>> = std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios.iter().map(|sc| scope.spawn(move || integrate(sc))).collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker")).collect()
    });
    let mut rows = Vec::with_capacity(values.len());
    for ((&value, sc), run) in values.iter().zip(&scenarios).zip(runs) {
        let run = run.map_err(CliError::Invalid)?;
        let last = run.frames.last().expect("at least one frame");
        if let Some(dir) = out {
            let sub = dir.join(format!("{param}={value}"));
            write_artifacts(&sub, sc, &run, &summary_json(sc, &run, &[]), false)?;
        }
        rows.push(SweepRow {
            value,
            composite_error: last.composite_norm,
            max_phi_norm: last.max_phi_norm(),
            max_coord_err: last.max_coord_err(),
            settling_time: settling_time(&run.frames, threshold),
            h_min: run.stats.h_min,
            aborted: run.abort.map(|e| e.to_string()),
        });
    }
    if let Some(dir) = out {
        create_dir(dir)?;
        let p = dir.join("sweep.csv");
        let mut w = csv::Writer::from_writer(create_file(&p)?);
        let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        let io = |e: csv::Error| CliError::Output {
            path: p.display().to_string(),
            message: e.to_string(),
        };
        w.write_record([
            param,
            "composite_error",
            "max_phi_norm",
            "max_coord_err",
            "settling_time",
            "h_min",
            "aborted",
        ])
        .map_err(io)?;
        for r in &rows {
            w.write_record([
                format!("{:.16e}", r.value),
                format!("{:.16e}", r.composite_error),
                format!("{:.16e}", r.max_phi_norm),
                format!("{:.16e}", r.max_coord_err),
                fmt_opt(r.settling_time),
                fmt_opt(r.h_min),
                r.aborted.clone().unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Output {
            path: p.display().to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(rows)
}

fn print_sweep(param: &str, rows: &[SweepRow]) {
    out!(
        "{param:>12} {:>14} {:>14} {:>14} {:>10} {:>12}",
        "composite", "max_phi", "max_coord", "settle_s", "h_min"
    );
    for r in rows {
        let opt = |v: Option<f64>, p: usize| v.map_or("-".to_string(), |x| format!("{x:.p$}"));
        out!(
            "{:>12} {:>14.6e} {:>14.6e} {:>14.6e} {:>10} {:>12}{}",
            r.value,
            r.composite_error,
            r.max_phi_norm,
            r.max_coord_err,
            opt(r.settling_time, 3),
            opt(r.h_min, 4),
            r.aborted.as_ref().map(|e| format!("  aborted: {e}")).unwrap_or_default()
        );
    }
}

fn export_presets(name: Option<&str>, dir: &Path) -> CliResult<Vec<PathBuf>> {
    let list = match name {
        Some(n) => vec![presets::by_name(n).ok_or_else(|| CliError::Usage(format!("unknown preset `{n}`")))?],
        None => presets::all(),
    };
    create_dir(dir)?;
    let mut written = Vec::new();
    for cfg in list {
        let p = dir.join(format!("{}.toml", cfg.name));
        let text = cfg.to_toml().map_err(|e| CliError::Output {
            path: p.display().to_string(),
            message: e.to_string(),
        })?;
        fs::write(&p, text).map_err(|e| CliError::Output {
            path: p.display().to_string(),
            message: e.to_string(),
        })?;
        written.push(p);
    }
    Ok(written)
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Run(a) => {
            let cfg = RunConfig {
                scenario: a.scenario,
                out: a.out,
                decimation: a.decimate,
                plot: a.plot,
                seed: a.seed,
            };
            let outcome = cmd_run(&cfg)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            let fin = &outcome.summary["final"];
            out!(
                "{}: {} steps, composite error {:.3e}, max |phi| {:.3e}, max coordination error {:.3e}",
                outcome.scenario.name,
                outcome.run.stats.steps,
                fin["composite_error"].as_f64().unwrap_or(f64::NAN),
                fin["max_phi_norm"].as_f64().unwrap_or(f64::NAN),
                fin["max_coord_err"].as_f64().unwrap_or(f64::NAN),
            );
            out!("wrote {}", outcome.out_dir.display());
            Ok(0)
        }
        Command::Validate { scenario } => {
            let checks = cmd_validate(&scenario)?;
            for c in &checks {
                out!("{c}");
            }
            Ok(if checks.iter().all(|c| c.passed) { 0 } else { 1 })
        }
        Command::Sweep(a) => {
            let rows = cmd_sweep(&a.scenario, &a.param, &a.values, a.seed, a.threshold, a.out.as_deref())?;
            print_sweep(&a.param, &rows);
            Ok(if rows.iter().any(|r| r.aborted.is_some()) { 1 } else { 0 })
        }
        Command::Presets { action } => match action {
            PresetsAction::List => {
                for cfg in presets::all() {
                    out!("{:<12} {}", cfg.name, cfg.description);
                }
                Ok(0)
            }
            PresetsAction::Export { name, dir } => {
                for p in export_presets(name.as_deref(), &dir)? {
                    out!("wrote {}", p.display());
                }
                Ok(0)
            }
        },
    }
}

/// Entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
