//! One finite-horizon optimal control problem, solved cold and then warm.
//!
//! ```bash
//! cargo run --example single_cftoc
//! ```

use ampc::cftoc::{shift_warm_start, solve, CftocProblem, InputBounds, SolverOptions, Weights};
use ampc::model::{step_discrete, to_proxy, PhysicalParams, State, DEFAULT_DT};

fn main() -> ampc::Result<()> {
    let theta = to_proxy(&PhysicalParams::default(), DEFAULT_DT);
    let prob = CftocProblem {
        x0: State::new(1.0, 1.0, 0.0, 0.0, 0.0),
        x_ref: State::REST,
        horizon: 30,
        weights: Weights::default(),
        bounds: InputBounds::default(),
        theta,
        dt: DEFAULT_DT,
    };
    let opts = SolverOptions::default();

    let cold = solve(&prob, None, &opts)?;
    println!(
        "cold: cost={:.6} iters={} converged={} |grad|={:.2e}",
        cold.cost, cold.iterations, cold.converged, cold.grad_norm
    );
    println!(
        "first input: R={:.5} M={:.5}",
        cold.u_seq[0].thrust, cold.u_seq[0].moment
    );
    let end = cold.x_pred.last().expect("prediction includes x_N");
    println!(
        "predicted x_N: ({:.4}, {:.4}, {:.4})",
        end.x, end.y, end.psi
    );

    // Apply the first input, then re-solve from the shifted sequence.
    let next = CftocProblem {
        x0: step_discrete(&prob.x0, &cold.u_seq[0], &theta, prob.dt),
        ..prob.clone()
    };
    let warm_guess = shift_warm_start(&cold.u_seq);
    let warm = solve(&next, Some(&warm_guess), &opts)?;
    let rewarm = solve(&next, None, &opts)?;
    println!(
        "next step: warm iters={} cost={:.6}, cold iters={} cost={:.6}",
        warm.iterations, warm.cost, rewarm.iterations, rewarm.cost
    );
    Ok(())
}
