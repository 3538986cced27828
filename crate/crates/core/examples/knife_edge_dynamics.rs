//! Open-loop stepping of the knife-edge model.
//!
//! Drives a constant thrust and moment for two seconds and prints the state,
//! the no-slip residual and the lateral force the wheel has to supply.
//!
//! ```bash
//! cargo run --example knife_edge_dynamics
//! ```

use ampc::model::{
    constraint_residual, from_proxy, lateral_force, step_discrete, to_proxy, Input, PhysicalParams,
    State, DEFAULT_DT,
};

fn main() -> ampc::Result<()> {
    let params = PhysicalParams::default();
    let dt = DEFAULT_DT;
    let theta = to_proxy(&params, dt);
    println!(
        "proxy: alpha_v={:.4} beta_v={:.4} alpha_w={:.4} beta_w={:.4}",
        theta.alpha_v, theta.beta_v, theta.alpha_w, theta.beta_w
    );
    let back = from_proxy(&theta, dt)?;
    println!(
        "recovered: m={:.4} b={:.4} J={:.4} c={:.4}",
        back.mass, back.drag_linear, back.inertia, back.drag_angular
    );

    let u = Input {
        thrust: 2.0,
        moment: 0.1,
    };
    let mut x = State::REST;
    println!(
        "{:>5} {:>8} {:>8} {:>8} {:>8} {:>8} {:>10} {:>9}",
        "t", "x", "y", "psi", "v", "omega", "residual", "F_lat"
    );
    for k in 0..=20 {
        if k % 4 == 0 {
            println!(
                "{:>5.1} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>10.2e} {:>9.4}",
                k as f64 * dt,
                x.x,
                x.y,
                x.psi,
                x.v,
                x.omega,
                constraint_residual(&x),
                lateral_force(&x, &params)
            );
        }
        x = step_discrete(&x, &u, &theta, dt);
    }
    Ok(())
}
