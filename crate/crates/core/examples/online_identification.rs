//! Recursive least-squares identification of the proxy parameters from an
//! excited open-loop trajectory.
//!
//! ```bash
//! cargo run --example online_identification
//! ```

use ampc::estimator::{EstimatorInit, EstimatorState};
use ampc::model::{from_proxy, step_discrete, to_proxy, Input, PhysicalParams, State, DEFAULT_DT};

fn main() -> ampc::Result<()> {
    let truth = PhysicalParams::default();
    let dt = DEFAULT_DT;
    let theta = to_proxy(&truth, dt);

    let mut est = EstimatorState::new(&EstimatorInit::default());
    let mut x = State::REST;
    for k in 0..2000 {
        let t = k as f64 * dt;
        let u = Input {
            thrust: 3.0 * (0.7 * t).sin() + 1.5 * (2.3 * t).cos(),
            moment: 1.0 * (1.1 * t).sin() - 0.5 * (3.7 * t).cos(),
        };
        let next = step_discrete(&x, &u, &theta, dt);
        let eps = est.prediction_errors(&x, &u, &next);
        est = est.update(&x, &u, &next)?;
        x = next;
        if [0, 1, 5, 20, 100, 500, 1999].contains(&k) {
            let p = est.proxy();
            println!(
                "k={k:>4} eps=({:+.2e}, {:+.2e}) theta_hat=({:.6}, {:.6}, {:.6}, {:.6})",
                eps[0], eps[1], p.alpha_v, p.beta_v, p.alpha_w, p.beta_w
            );
        }
    }
    println!(
        "truth            theta=({:.6}, {:.6}, {:.6}, {:.6})",
        theta.alpha_v, theta.beta_v, theta.alpha_w, theta.beta_w
    );
    let phys = from_proxy(&est.proxy(), dt)?;
    println!(
        "recovered m={:.4} b={:.4} J={:.4} c={:.4}",
        phys.mass, phys.drag_linear, phys.inertia, phys.drag_angular
    );
    Ok(())
}
