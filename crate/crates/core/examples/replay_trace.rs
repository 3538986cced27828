//! Writes a trajectory CSV, reads it back and replays the estimator over it,
//! the same path the `identify` subcommand takes.
//!
//! ```bash
//! cargo run --release --example replay_trace -- /tmp/replay
//! ```

use std::path::PathBuf;

use ampc::controller::{run_closed_loop, SimConfig};
use ampc::estimator::EstimatorInit;
use ampc::harness::{run_identify, trace};

fn main() -> ampc::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/ampc-examples/replay_trace"));
    std::fs::create_dir_all(&out).map_err(|source| ampc::Error::Io {
        path: out.clone(),
        source,
    })?;

    let cfg = SimConfig {
        total_steps: 100,
        ..SimConfig::default()
    };
    let log = run_closed_loop(&cfg)?;
    let csv = out.join("trajectory.csv");
    trace::write_trajectory_csv(&csv, &log)?;

    let id = run_identify(
        &csv,
        &EstimatorInit::default(),
        cfg.dt,
        &out.join("identify"),
    )?;
    let online = log.estimates.last().expect("log has estimates");
    let offline = id.summary.final_estimate;
    println!("transitions replayed  {}", id.summary.transitions);
    println!("online  estimate      {:?}", online.to_array());
    println!("offline estimate      {:?}", offline.to_array());
    let gap = online
        .to_array()
        .iter()
        .zip(offline.to_array())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("max difference        {gap:.2e}");
    Ok(())
}
