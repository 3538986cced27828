//! Adaptive receding-horizon loop.
//!
//! Each step measures the plant, solves a CFTOC with the current parameter
//! estimate, applies the first input to the truth plant, and feeds the
//! realized transition to the estimator. The truth plant uses the same
//! discrete model with the hidden true parameters.

use serde::{Deserialize, Serialize};

use crate::cftoc::{self, CftocProblem, InputBounds, Solution, SolverOptions, Weights};
use crate::error::{Error, Result};
use crate::estimator::{EstimatorInit, EstimatorState};
use crate::model::{check_dt, step_discrete, to_proxy, Input, PhysicalParams, ProxyParams, State};

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub true_params: PhysicalParams,
    pub dt: f64,
    pub total_steps: usize,
    pub horizon: usize,
    pub x_init: State,
    pub x_goal: State,
    pub weights: Weights,
    pub bounds: InputBounds,
    pub estimator: EstimatorInit,
    pub solver: SolverOptions,
    /// Learn the parameters online; otherwise the controller is given the
    /// true parameters.
    pub adaptive: bool,
}

impl Default for SimConfig {
    /// The reference scenario: start at (1, 1) facing +x, park at the origin.
    fn default() -> Self {
        Self {
            true_params: PhysicalParams::default(),
            dt: crate::model::DEFAULT_DT,
            total_steps: 500,
            horizon: 30,
            x_init: State::new(1.0, 1.0, 0.0, 0.0, 0.0),
            x_goal: State::REST,
            weights: Weights::default(),
            bounds: InputBounds::default(),
            estimator: EstimatorInit::default(),
            solver: SolverOptions::default(),
            adaptive: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.true_params.validate()?;
        check_dt(self.dt)?;
        if self.total_steps == 0 {
            return Err(Error::InvalidParameter {
                field: "total_steps_M",
                reason: "must be at least 1".into(),
            });
        }
        if self.horizon == 0 {
            return Err(Error::InvalidParameter {
                field: "horizon_N",
                reason: "must be at least 1".into(),
            });
        }
        if !(self.estimator.gamma.is_finite() && self.estimator.gamma > 0.0) {
            return Err(Error::InvalidParameter {
                field: "gamma",
                reason: format!(
                    "initial gain scale must be positive, got {}",
                    self.estimator.gamma
                ),
            });
        }
        if !self.estimator.initial_proxy().is_finite() {
            return Err(Error::NonFinite("initial estimate"));
        }
        if !(self.solver.tol >= 0.0
            && self.solver.initial_step > 0.0
            && self.solver.shrink > 0.0
            && self.solver.shrink < 1.0
            && self.solver.armijo > 0.0
            && self.solver.armijo < 1.0)
        {
            return Err(Error::InvalidParameter {
                field: "solver",
                reason: "need tol >= 0, initial_step > 0, shrink and armijo in (0, 1)".into(),
            });
        }
        self.problem(self.x_init, self.true_proxy()).validate()?;
        if !self.x_goal.is_finite() {
            return Err(Error::NonFinite("goal state"));
        }
        Ok(())
    }

    pub fn true_proxy(&self) -> ProxyParams {
        to_proxy(&self.true_params, self.dt)
    }

    /// The CFTOC instance seen by the controller at state `x` with model `theta`.
    pub fn problem(&self, x: State, theta: ProxyParams) -> CftocProblem {
        CftocProblem {
            x0: x,
            x_ref: self.x_goal,
            horizon: self.horizon,
            weights: self.weights,
            bounds: self.bounds,
            theta,
            dt: self.dt,
        }
    }

    /// Realized stage cost of one closed-loop transition.
    pub fn stage_cost(&self, input: &Input, next: &State) -> f64 {
        let e = next.error_from(&self.x_goal);
        let w = &self.weights;
        0.5 * (w.q.iter().zip(e).map(|(q, e)| q * e * e).sum::<f64>()
            + w.r[0] * input.thrust * input.thrust
            + w.r[1] * input.moment * input.moment)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Everything that happened in one closed-loop run.
///
/// `states` and `estimates` are indexed by time `0..=M`; `estimates[t]` is
/// the model the controller used at time `t`. `inputs`, `solves` and
/// `prediction_errors` are indexed `0..M`, with `prediction_errors[t]` the
/// one-step error of the transition `t -> t + 1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryLog {
    pub dt: f64,
    pub states: Vec<State>,
    pub inputs: Vec<Input>,
    pub estimates: Vec<ProxyParams>,
    pub prediction_errors: Vec<[f64; 2]>,
    pub solves: Vec<SolveRecord>,
}

impl TrajectoryLog {
    pub fn final_state(&self) -> Option<&State> {
        self.states.last()
    }

    pub fn steps(&self) -> usize {
        self.inputs.len()
    }
}

/// First input of the CFTOC solution at `x_t` under `theta_hat`.
pub fn control_step(
    x_t: &State,
    theta_hat: &ProxyParams,
    cfg: &SimConfig,
    warm: Option<&[Input]>,
) -> Result<(Input, Solution)> {
    let prob = cfg.problem(*x_t, *theta_hat);
    let sol = cftoc::solve(&prob, warm, &cfg.solver)?;
    Ok((sol.u_seq[0], sol))
}

/// Adapts both channels to the measured transition and returns the updated
/// estimate with the prediction errors made before the update.
pub fn learn_step(
    est: &EstimatorState,
    x_t: &State,
    u_t: &Input,
    x_next: &State,
) -> Result<(EstimatorState, [f64; 2])> {
    let eps = est.prediction_errors(x_t, u_t, x_next);
    Ok((est.update(x_t, u_t, x_next)?, eps))
}

pub fn run_closed_loop(cfg: &SimConfig) -> Result<TrajectoryLog> {
    cfg.validate()?;
    let truth = cfg.true_proxy();
    let mut est = if cfg.adaptive {
        EstimatorState::new(&cfg.estimator)
    } else {
        EstimatorState::new(&EstimatorInit::from_proxy(&truth, cfg.estimator.gamma))
    };

    let m = cfg.total_steps;
    let mut log = TrajectoryLog {
        dt: cfg.dt,
        states: Vec::with_capacity(m + 1),
        inputs: Vec::with_capacity(m),
        estimates: Vec::with_capacity(m + 1),
        prediction_errors: Vec::with_capacity(m),
        solves: Vec::with_capacity(m),
    };
    let mut x = cfg.x_init;
    log.states.push(x);
    log.estimates.push(est.proxy());

    let mut warm: Option<Vec<Input>> = None;
    for t in 0..m {
        let theta = est.proxy();
        let (u, sol) = match control_step(&x, &theta, cfg, warm.as_deref()) {
            Ok(r) => r,
            Err(e) => {
                return Err(Error::Aborted {
                    step: t,
                    source: Box::new(e),
                    partial: Box::new(log),
                })
            }
        };
        let next = step_discrete(&x, &u, &truth, cfg.dt);
        let (updated, eps) = if cfg.adaptive {
            match learn_step(&est, &x, &u, &next) {
                Ok(r) => r,
                Err(e) => {
                    return Err(Error::Aborted {
                        step: t,
                        source: Box::new(e),
                        partial: Box::new(log),
                    })
                }
            }
        } else {
            (est, est.prediction_errors(&x, &u, &next))
        };

        log.inputs.push(u);
        log.solves.push(SolveRecord {
            cost: sol.cost,
            iterations: sol.iterations,
            converged: sol.converged,
        });
        log.prediction_errors.push(eps);
        log.states.push(next);
        log.estimates.push(updated.proxy());

        warm = Some(cftoc::shift_warm_start(&sol.u_seq));
        est = updated;
        x = next;
    }
    Ok(log)
}
