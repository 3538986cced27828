//! Batch front end: config files in, CSV traces, SVG figures and TOML
//! summaries out. Every run writes into its own output directory.

pub mod config;
pub mod plot;
pub mod trace;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cftoc;
use crate::controller::{run_closed_loop, SimConfig, TrajectoryLog};
use crate::error::{Error, Result};
use crate::estimator::{EstimatorInit, EstimatorState};
use crate::model::{constraint_residual, from_proxy, PhysicalParams, ProxyParams};

pub use config::{load_config, parse_config, to_toml};
use plot::{Figure, Panel, Series};
use trace::{EstimateRow, TraceRow};

pub const CONFIG_SNAPSHOT: &str = "config.toml";
pub const TRAJECTORY_CSV: &str = "trajectory.csv";
pub const ESTIMATOR_CSV: &str = "estimates.csv";
pub const SUMMARY_FILE: &str = "summary.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub adaptive: bool,
    pub steps: usize,
    pub final_position_error: f64,
    pub final_heading_error: f64,
    pub final_speed: f64,
    pub final_yaw_rate: f64,
    /// Realized closed-loop cost, summed over stage costs.
    pub total_cost: f64,
    pub converged_solves: usize,
    pub max_constraint_residual: f64,
    pub final_estimate: ProxyParams,
    pub wall_clock_s: f64,
}

impl RunSummary {
    pub fn from_log(cfg: &SimConfig, log: &TrajectoryLog, wall_clock_s: f64) -> Self {
        let last = log.final_state().copied().unwrap_or(cfg.x_init);
        let e = last.error_from(&cfg.x_goal);
        let total_cost = log
            .inputs
            .iter()
            .zip(&log.states[1..])
            .map(|(u, x)| cfg.stage_cost(u, x))
            .sum();
        Self {
            adaptive: cfg.adaptive,
            steps: log.steps(),
            final_position_error: e[0].hypot(e[1]),
            final_heading_error: e[2].abs(),
            final_speed: last.v.abs(),
            final_yaw_rate: last.omega.abs(),
            total_cost,
            converged_solves: log.solves.iter().filter(|s| s.converged).count(),
            max_constraint_residual: log
                .states
                .iter()
                .map(|s| constraint_residual(s).abs())
                .fold(0.0, f64::max),
            final_estimate: log
                .estimates
                .last()
                .copied()
                .unwrap_or(cfg.estimator.initial_proxy()),
            wall_clock_s,
        }
    }
}

/// Files and summary produced by one simulation.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub config: SimConfig,
    pub dir: PathBuf,
    pub config_path: PathBuf,
    pub trajectory_csv: PathBuf,
    pub estimator_csv: PathBuf,
    pub figures: Vec<PathBuf>,
    pub summary: RunSummary,
    pub log: TrajectoryLog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    /// Largest absolute difference between the applied inputs of the two runs.
    pub max_input_deviation: f64,
    pub max_position_deviation: f64,
    pub adaptive_final_position_error: f64,
    pub full_knowledge_final_position_error: f64,
    pub adaptive_total_cost: f64,
    pub full_knowledge_total_cost: f64,
}

#[derive(Debug, Clone)]
pub struct CompareArtifacts {
    pub adaptive: RunArtifacts,
    pub full_knowledge: RunArtifacts,
    pub overlay_figure: PathBuf,
    pub summary_path: PathBuf,
    pub summary: CompareSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifySummary {
    pub transitions: usize,
    pub final_estimate: ProxyParams,
    /// Absent while the estimate has a non-positive input gain.
    pub physical: Option<PhysicalParams>,
}

#[derive(Debug, Clone)]
pub struct IdentifyArtifacts {
    pub estimator_csv: PathBuf,
    pub summary_path: PathBuf,
    pub rows: Vec<EstimateRow>,
    pub summary: IdentifySummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CftocSummary {
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm: f64,
    pub theta: ProxyParams,
}

#[derive(Debug, Clone)]
pub struct CftocArtifacts {
    pub csv: PathBuf,
    pub summary_path: PathBuf,
    pub solution: cftoc::Solution,
    pub summary: CftocSummary,
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_toml<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = toml::to_string(value).expect("summaries serialize to TOML");
    write_text(path, &text)
}

/// The five per-run figures, rendered from parsed trajectory rows.
pub fn render_figures(rows: &[TraceRow]) -> Vec<(&'static str, String)> {
    let series = |label: &str, f: &dyn Fn(&TraceRow) -> Option<f64>| {
        Series::new(
            label,
            rows.iter().filter_map(|r| Some((r.t, f(r)?))).collect(),
        )
    };

    let mut path_panel = Panel::new(
        "Robot path",
        "x [m]",
        "y [m]",
        vec![Series::new(
            "path",
            rows.iter().map(|r| (r.state.x, r.state.y)).collect(),
        )
        .dedup()],
    );
    path_panel.equal_axes = true;

    let states = Figure {
        panels: vec![
            Panel::new(
                "Position",
                "t [s]",
                "m",
                vec![
                    series("x", &|r| Some(r.state.x)),
                    series("y", &|r| Some(r.state.y)),
                ],
            ),
            Panel::new(
                "Heading",
                "t [s]",
                "rad",
                vec![series("psi", &|r| Some(r.state.psi))],
            ),
            Panel::new(
                "Velocities",
                "t [s]",
                "m/s, rad/s",
                vec![
                    series("v", &|r| Some(r.state.v)),
                    series("omega", &|r| Some(r.state.omega)),
                ],
            ),
        ],
    };

    let inputs = Figure {
        panels: vec![
            Panel::new(
                "Thrust",
                "t [s]",
                "N",
                vec![series("R", &|r| r.input.map(|u| u.thrust))],
            ),
            Panel::new(
                "Moment",
                "t [s]",
                "N m",
                vec![series("M", &|r| r.input.map(|u| u.moment))],
            ),
        ],
    };

    let est = |i: usize| move |r: &TraceRow| r.estimate.map(|e| e.to_array()[i]);
    let estimates = Figure {
        panels: vec![
            Panel::new(
                "Speed channel estimate",
                "t [s]",
                "",
                vec![
                    series("alpha_v_hat", &est(0)),
                    series("beta_v_hat", &est(1)),
                ],
            ),
            Panel::new(
                "Yaw channel estimate",
                "t [s]",
                "",
                vec![
                    series("alpha_w_hat", &est(2)),
                    series("beta_w_hat", &est(3)),
                ],
            ),
        ],
    };

    let errors = Figure::single(Panel::new(
        "One-step prediction error",
        "t [s]",
        "",
        vec![
            series("eps_v", &|r| r.eps.map(|e| e[0])),
            series("eps_w", &|r| r.eps.map(|e| e[1])),
        ],
    ));

    vec![
        ("path.svg", Figure::single(path_panel).to_svg()),
        ("states.svg", states.to_svg()),
        ("inputs.svg", inputs.to_svg()),
        ("estimates.svg", estimates.to_svg()),
        ("prediction_errors.svg", errors.to_svg()),
    ]
}

fn write_traces(dir: &Path, log: &TrajectoryLog) -> Result<(PathBuf, PathBuf)> {
    let trajectory_csv = dir.join(TRAJECTORY_CSV);
    let estimator_csv = dir.join(ESTIMATOR_CSV);
    trace::write_trajectory_csv(&trajectory_csv, log)?;
    trace::write_estimator_csv(&estimator_csv, &trace::estimate_rows(log), log.dt)?;
    Ok((trajectory_csv, estimator_csv))
}

/// Runs one closed loop and writes its traces, figures and summary.
///
/// If the loop aborts, the partial traces are still written before the
/// error is returned.
pub fn run_simulate(cfg: &SimConfig, out_dir: &Path) -> Result<RunArtifacts> {
    create_dir(out_dir)?;
    let config_path = out_dir.join(CONFIG_SNAPSHOT);
    write_text(&config_path, &to_toml(cfg))?;

    let start = Instant::now();
    let log = match run_closed_loop(cfg) {
        Ok(log) => log,
        Err(Error::Aborted {
            step,
            source,
            partial,
        }) => {
            log::warn!("run aborted at step {step}; flushing partial trace");
            write_traces(out_dir, &partial)?;
            return Err(Error::Aborted {
                step,
                source,
                partial,
            });
        }
        Err(e) => return Err(e),
    };
    let wall = start.elapsed().as_secs_f64();
    let (trajectory_csv, estimator_csv) = write_traces(out_dir, &log)?;

    let rows = trace::read_trajectory_csv(&trajectory_csv)?;
    let mut figures = Vec::new();
    for (name, svg) in render_figures(&rows) {
        let path = out_dir.join(name);
        write_text(&path, &svg)?;
        figures.push(path);
    }

    let summary = RunSummary::from_log(cfg, &log, wall);
    write_toml(&out_dir.join(SUMMARY_FILE), &summary)?;
    log::info!(
        "{}: final position error {:.4} m after {} steps",
        out_dir.display(),
        summary.final_position_error,
        summary.steps
    );

    Ok(RunArtifacts {
        config: cfg.clone(),
        dir: out_dir.to_path_buf(),
        config_path,
        trajectory_csv,
        estimator_csv,
        figures,
        summary,
        log,
    })
}

/// Runs the adaptive and full-knowledge variants of `cfg` side by side.
pub fn run_compare(cfg: &SimConfig, out_dir: &Path) -> Result<CompareArtifacts> {
    create_dir(out_dir)?;
    let adaptive_cfg = SimConfig {
        adaptive: true,
        ..cfg.clone()
    };
    let known_cfg = SimConfig {
        adaptive: false,
        ..cfg.clone()
    };
    let adaptive_dir = out_dir.join("adaptive");
    let known_dir = out_dir.join("full_knowledge");

    let (adaptive, full_knowledge) = std::thread::scope(|s| {
        let a = s.spawn(|| run_simulate(&adaptive_cfg, &adaptive_dir));
        let k = run_simulate(&known_cfg, &known_dir);
        (a.join().expect("simulation thread panicked"), k)
    });
    let (adaptive, full_knowledge) = (adaptive?, full_knowledge?);

    let max_input_deviation = adaptive
        .log
        .inputs
        .iter()
        .zip(&full_knowledge.log.inputs)
        .map(|(a, b)| (a.thrust - b.thrust).abs().max((a.moment - b.moment).abs()))
        .fold(0.0, f64::max);
    let max_position_deviation = adaptive
        .log
        .states
        .iter()
        .zip(&full_knowledge.log.states)
        .map(|(a, b)| (a.x - b.x).hypot(a.y - b.y))
        .fold(0.0, f64::max);
    let summary = CompareSummary {
        max_input_deviation,
        max_position_deviation,
        adaptive_final_position_error: adaptive.summary.final_position_error,
        full_knowledge_final_position_error: full_knowledge.summary.final_position_error,
        adaptive_total_cost: adaptive.summary.total_cost,
        full_knowledge_total_cost: full_knowledge.summary.total_cost,
    };

    let path_of = |a: &RunArtifacts, label: &str| -> Result<Series> {
        let rows = trace::read_trajectory_csv(&a.trajectory_csv)?;
        Ok(Series::new(label, rows.iter().map(|r| (r.state.x, r.state.y)).collect()).dedup())
    };
    let mut overlay = Panel::new(
        "Adaptive vs. full-knowledge path",
        "x [m]",
        "y [m]",
        vec![
            path_of(&adaptive, "adaptive")?,
            path_of(&full_knowledge, "full knowledge")?,
        ],
    );
    overlay.equal_axes = true;
    let overlay_figure = out_dir.join("paths_overlay.svg");
    write_text(&overlay_figure, &Figure::single(overlay).to_svg())?;

    let summary_path = out_dir.join("compare_summary.toml");
    write_toml(&summary_path, &summary)?;

    Ok(CompareArtifacts {
        adaptive,
        full_knowledge,
        overlay_figure,
        summary_path,
        summary,
    })
}

/// Replays the estimator open loop over a recorded trace.
pub fn run_identify(
    trace_csv: &Path,
    init: &EstimatorInit,
    dt: f64,
    out_dir: &Path,
) -> Result<IdentifyArtifacts> {
    crate::model::check_dt(dt)?;
    let rows = trace::read_trajectory_csv(trace_csv)?;
    let estimates = trace::replay_estimator(
        &rows,
        &EstimatorState::new(init),
        &trace_csv.display().to_string(),
    )?;
    create_dir(out_dir)?;
    let estimator_csv = out_dir.join("identified.csv");
    trace::write_estimator_csv(&estimator_csv, &estimates, dt)?;

    let final_estimate = estimates
        .last()
        .map(|r| r.estimate)
        .unwrap_or(init.initial_proxy());
    let summary = IdentifySummary {
        transitions: rows.len().saturating_sub(1),
        final_estimate,
        physical: from_proxy(&final_estimate, dt).ok(),
    };
    let summary_path = out_dir.join("identify_summary.toml");
    write_toml(&summary_path, &summary)?;
    Ok(IdentifyArtifacts {
        estimator_csv,
        summary_path,
        rows: estimates,
        summary,
    })
}

/// Solves the single CFTOC posed at the config's initial state. The model
/// is the initial estimate for adaptive configs and the truth otherwise.
pub fn run_cftoc(cfg: &SimConfig, out_dir: &Path) -> Result<CftocArtifacts> {
    cfg.validate()?;
    let theta = if cfg.adaptive {
        cfg.estimator.initial_proxy()
    } else {
        cfg.true_proxy()
    };
    let prob = cfg.problem(cfg.x_init, theta);
    let solution = cftoc::solve(&prob, None, &cfg.solver)?;

    create_dir(out_dir)?;
    let csv = out_dir.join("cftoc.csv");
    let rows: Vec<TraceRow> = solution
        .x_pred
        .iter()
        .enumerate()
        .map(|(k, x)| TraceRow {
            t: k as f64 * cfg.dt,
            state: *x,
            input: solution.u_seq.get(k).copied(),
            estimate: Some(theta),
            eps: None,
            cost: None,
            iters: None,
            converged: None,
        })
        .collect();
    trace::write_trajectory_rows(&csv, &rows)?;

    let summary = CftocSummary {
        cost: solution.cost,
        iterations: solution.iterations,
        converged: solution.converged,
        grad_norm: solution.grad_norm,
        theta,
    };
    let summary_path = out_dir.join("cftoc_summary.toml");
    write_toml(&summary_path, &summary)?;
    Ok(CftocArtifacts {
        csv,
        summary_path,
        solution,
        summary,
    })
}
