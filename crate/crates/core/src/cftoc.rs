//! Constrained finite-time optimal control by single shooting.
//!
//! The decision variables are the `N` inputs; states are recovered by
//! rolling the discrete model forward. The cost is
//!
//! ```text
//! J = 1/2 e_N' P e_N + sum_{k=1..N} (1/2 e_k' Q e_k + 1/2 u_{k-1}' R u_{k-1})
//! ```
//!
//! with `e_k = x_k - x_ref` (heading wrapped). Note that `e_N` is weighted by
//! both `Q` and `P`. The gradient is computed with a backward adjoint sweep,
//! and the box-constrained problem is solved with projected gradient
//! descent and Armijo backtracking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_dt, step_discrete, Input, ProxyParams, State};

/// Diagonal quadratic weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Weights {
    /// Stage state weights.
    pub q: [f64; 5],
    /// Input weights `(R, M)`.
    pub r: [f64; 2],
    /// Terminal state weights.
    pub p: [f64; 5],
}

impl Default for Weights {
    fn default() -> Self {
        Self {
            q: [1.0; 5],
            r: [1.0; 2],
            p: [1.0; 5],
        }
    }
}

impl Weights {
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            q: self.q.map(|w| w * k),
            r: self.r.map(|w| w * k),
            p: self.p.map(|w| w * k),
        }
    }

    fn validate(&self) -> Result<()> {
        if self
            .q
            .iter()
            .chain(&self.r)
            .chain(&self.p)
            .all(|w| w.is_finite() && *w >= 0.0)
        {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                field: "weights",
                reason: "weights must be finite and non-negative".into(),
            })
        }
    }

    /// `1/2 e' diag(w) e`
    fn state_term(w: &[f64; 5], e: &[f64; 5]) -> f64 {
        0.5 * w.iter().zip(e).map(|(w, e)| w * e * e).sum::<f64>()
    }

    fn input_term(&self, u: &Input) -> f64 {
        0.5 * (self.r[0] * u.thrust * u.thrust + self.r[1] * u.moment * u.moment)
    }
}

/// Box bounds on the two inputs, `(lower, upper)` each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InputBounds {
    pub thrust: [f64; 2],
    pub moment: [f64; 2],
}

impl Default for InputBounds {
    fn default() -> Self {
        Self {
            thrust: [-10.0, 10.0],
            moment: [-10.0, 10.0],
        }
    }
}

impl InputBounds {
    pub fn project(&self, u: &Input) -> Input {
        Input::new(
            u.thrust.clamp(self.thrust[0], self.thrust[1]),
            u.moment.clamp(self.moment[0], self.moment[1]),
        )
    }

    pub fn contains(&self, u: &Input) -> bool {
        (self.thrust[0]..=self.thrust[1]).contains(&u.thrust)
            && (self.moment[0]..=self.moment[1]).contains(&u.moment)
    }

    fn validate(&self) -> Result<()> {
        for (field, [lo, hi]) in [
            ("bounds.thrust", self.thrust),
            ("bounds.moment", self.moment),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("need finite lower <= upper, got [{lo}, {hi}]"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Stop once the projected-gradient norm falls to this value.
    pub tol: f64,
    pub initial_step: f64,
    pub shrink: f64,
    /// Armijo sufficient-decrease factor.
    pub armijo: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            tol: 1e-6,
            initial_step: 1.0,
            shrink: 0.5,
            armijo: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CftocProblem {
    pub x0: State,
    pub x_ref: State,
    pub horizon: usize,
    pub weights: Weights,
    pub bounds: InputBounds,
    pub theta: ProxyParams,
    pub dt: f64,
}

impl CftocProblem {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidParameter {
                field: "horizon",
                reason: "horizon must be at least 1".into(),
            });
        }
        if !self.x0.is_finite() {
            return Err(Error::NonFinite("initial state"));
        }
        if !self.x_ref.is_finite() {
            return Err(Error::NonFinite("reference state"));
        }
        if !self.theta.is_finite() {
            return Err(Error::NonFinite("model parameters"));
        }
        check_dt(self.dt)?;
        self.weights.validate()?;
        self.bounds.validate()
    }

    fn check_len(&self, u_seq: &[Input]) -> Result<()> {
        if u_seq.len() != self.horizon {
            return Err(Error::HorizonMismatch {
                expected: self.horizon,
                got: u_seq.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub u_seq: Vec<Input>,
    /// Predicted states `x_0 .. x_N`.
    pub x_pred: Vec<State>,
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Norm of the projected gradient at the returned point.
    pub grad_norm: f64,
    /// Cost after each accepted iterate, starting with the initial guess.
    pub cost_history: Vec<f64>,
}

/// Forward simulation of `u_seq` from `x0`; returns `N + 1` states.
pub fn rollout(x0: &State, u_seq: &[Input], theta: &ProxyParams, dt: f64) -> Result<Vec<State>> {
    if u_seq.is_empty() {
        return Err(Error::HorizonMismatch {
            expected: 1,
            got: 0,
        });
    }
    let mut states = Vec::with_capacity(u_seq.len() + 1);
    states.push(*x0);
    let mut x = *x0;
    for (k, u) in u_seq.iter().enumerate() {
        x = step_discrete(&x, u, theta, dt);
        if !x.is_finite() {
            return Err(Error::Rollout { step: k + 1 });
        }
        states.push(x);
    }
    Ok(states)
}

fn cost_of_rollout(prob: &CftocProblem, states: &[State], u_seq: &[Input]) -> f64 {
    let w = &prob.weights;
    let mut j = 0.0;
    for (x, u) in states[1..].iter().zip(u_seq) {
        let e = x.error_from(&prob.x_ref);
        j += Weights::state_term(&w.q, &e) + w.input_term(u);
    }
    let e_n = states[states.len() - 1].error_from(&prob.x_ref);
    j + Weights::state_term(&w.p, &e_n)
}

pub fn cost(prob: &CftocProblem, u_seq: &[Input]) -> Result<f64> {
    prob.check_len(u_seq)?;
    let states = rollout(&prob.x0, u_seq, &prob.theta, prob.dt)?;
    Ok(cost_of_rollout(prob, &states, u_seq))
}

/// Gradient of [`cost`] with respect to `[R_0, M_0, R_1, M_1, ...]`.
pub fn cost_gradient(prob: &CftocProblem, u_seq: &[Input]) -> Result<Vec<f64>> {
    prob.check_len(u_seq)?;
    let states = rollout(&prob.x0, u_seq, &prob.theta, prob.dt)?;
    Ok(gradient_of_rollout(prob, &states, u_seq))
}

fn gradient_of_rollout(prob: &CftocProblem, states: &[State], u_seq: &[Input]) -> Vec<f64> {
    let n = u_seq.len();
    let w = &prob.weights;
    let th = &prob.theta;
    let dt = prob.dt;
    let mut grad = vec![0.0; 2 * n];

    // Costate of x_N: both the stage and terminal terms act on e_N.
    let e_n = states[n].error_from(&prob.x_ref);
    let mut lam: [f64; 5] = std::array::from_fn(|i| (w.q[i] + w.p[i]) * e_n[i]);

    for k in (0..n).rev() {
        // u_k only enters v_{k+1} and omega_{k+1}.
        let u = &u_seq[k];
        grad[2 * k] = w.r[0] * u.thrust + th.beta_v * lam[3];
        grad[2 * k + 1] = w.r[1] * u.moment + th.beta_w * lam[4];
        if k == 0 {
            break;
        }
        // lam_k = Q e_k + A_k' lam_{k+1}
        let x = &states[k];
        let (sin, cos) = x.psi.sin_cos();
        let e = x.error_from(&prob.x_ref);
        let next = [
            lam[0],
            lam[1],
            lam[2] + dt * x.v * (cos * lam[1] - sin * lam[0]),
            dt * (cos * lam[0] + sin * lam[1]) + th.alpha_v * lam[3],
            dt * lam[2] + th.alpha_w * lam[4],
        ];
        lam = std::array::from_fn(|i| w.q[i] * e[i] + next[i]);
    }
    grad
}

fn flatten(u_seq: &[Input]) -> Vec<f64> {
    u_seq.iter().flat_map(|u| [u.thrust, u.moment]).collect()
}

fn unflatten(z: &[f64]) -> Vec<Input> {
    z.chunks_exact(2).map(|c| Input::new(c[0], c[1])).collect()
}

fn project_flat(bounds: &InputBounds, z: &mut [f64]) {
    for c in z.chunks_exact_mut(2) {
        c[0] = c[0].clamp(bounds.thrust[0], bounds.thrust[1]);
        c[1] = c[1].clamp(bounds.moment[0], bounds.moment[1]);
    }
}

fn projected_gradient_norm(bounds: &InputBounds, z: &[f64], grad: &[f64]) -> f64 {
    let mut stepped: Vec<f64> = z.iter().zip(grad).map(|(a, g)| a - g).collect();
    project_flat(bounds, &mut stepped);
    z.iter()
        .zip(&stepped)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Shifts a previous solution left by one step and repeats its last input.
pub fn shift_warm_start(u_seq: &[Input]) -> Vec<Input> {
    match u_seq.split_first() {
        None => Vec::new(),
        Some((_, tail)) => {
            let mut shifted = tail.to_vec();
            shifted.push(*u_seq.last().unwrap());
            shifted
        }
    }
}

/// Solves the problem starting from `warm_start` (projected onto the box)
/// or from the zero sequence.
pub fn solve(
    prob: &CftocProblem,
    warm_start: Option<&[Input]>,
    opts: &SolverOptions,
) -> Result<Solution> {
    prob.validate()?;
    let mut z = match warm_start {
        Some(w) => {
            prob.check_len(w)?;
            flatten(w)
        }
        None => vec![0.0; 2 * prob.horizon],
    };
    project_flat(&prob.bounds, &mut z);

    let mut inputs = unflatten(&z);
    let mut states = rollout(&prob.x0, &inputs, &prob.theta, prob.dt)?;
    let mut j = cost_of_rollout(prob, &states, &inputs);
    let mut grad = gradient_of_rollout(prob, &states, &inputs);
    let mut grad_norm = projected_gradient_norm(&prob.bounds, &z, &grad);
    let mut history = vec![j];
    let mut iterations = 0;
    let mut converged = grad_norm <= opts.tol;

    while !converged && iterations < opts.max_iters {
        let mut step = opts.initial_step;
        let mut accepted = None;
        while step > 1e-16 {
            let mut trial: Vec<f64> = z.iter().zip(&grad).map(|(a, g)| a - step * g).collect();
            project_flat(&prob.bounds, &mut trial);
            let decrease: f64 = grad
                .iter()
                .zip(trial.iter().zip(&z))
                .map(|(g, (t, a))| g * (t - a))
                .sum();
            let trial_inputs = unflatten(&trial);
            // A diverging trial is treated like an insufficient decrease.
            if let Ok(trial_states) = rollout(&prob.x0, &trial_inputs, &prob.theta, prob.dt) {
                let trial_j = cost_of_rollout(prob, &trial_states, &trial_inputs);
                if trial_j.is_finite() && trial_j <= j + opts.armijo * decrease {
                    accepted = Some((trial, trial_inputs, trial_states, trial_j));
                    break;
                }
            }
            step *= opts.shrink;
        }
        let Some((trial, trial_inputs, trial_states, trial_j)) = accepted else {
            // No representable step decreases the cost.
            break;
        };
        iterations += 1;
        z = trial;
        inputs = trial_inputs;
        states = trial_states;
        j = trial_j;
        history.push(j);
        grad = gradient_of_rollout(prob, &states, &inputs);
        grad_norm = projected_gradient_norm(&prob.bounds, &z, &grad);
        converged = grad_norm <= opts.tol;
    }

    Ok(Solution {
        u_seq: inputs,
        x_pred: states,
        cost: j,
        iterations,
        converged,
        grad_norm,
        cost_history: history,
    })
}
