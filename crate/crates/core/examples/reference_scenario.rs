//! Adaptive closed loop on the reference scenario, with traces and figures.
//!
//! Artifacts go to the directory given as the first argument, or to
//! `target/ampc-examples/reference_scenario`.
//!
//! ```bash
//! cargo run --release --example reference_scenario -- /tmp/reference
//! ```

use std::path::PathBuf;

use ampc::controller::SimConfig;
use ampc::harness::run_simulate;

fn main() -> ampc::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/ampc-examples/reference_scenario"));
    let run = run_simulate(&SimConfig::default(), &out)?;
    let s = &run.summary;
    println!("wrote {}", run.dir.display());
    println!("steps                  {}", s.steps);
    println!("final position error   {:.4} m", s.final_position_error);
    println!("final heading error    {:.2e} rad", s.final_heading_error);
    println!("final speed            {:.2e} m/s", s.final_speed);
    println!("final yaw rate         {:.2e} rad/s", s.final_yaw_rate);
    println!("realized cost          {:.4}", s.total_cost);
    println!("converged solves       {}/{}", s.converged_solves, s.steps);
    let e = &s.final_estimate;
    println!(
        "final estimate         ({:.6}, {:.6}, {:.6}, {:.6})",
        e.alpha_v, e.beta_v, e.alpha_w, e.beta_w
    );
    Ok(())
}
