//! Adaptive closed loop over a grid of true masses and inertias. The
//! controller always starts from the same default estimate.
//!
//! ```bash
//! cargo run --release --example robustness_sweep
//! ```

use ampc::controller::{run_closed_loop, SimConfig};

fn main() -> ampc::Result<()> {
    let cases: Vec<(f64, f64)> = [2.0, 5.0, 10.0]
        .iter()
        .flat_map(|&m| [0.1, 0.2, 0.5].map(move |j| (m, j)))
        .collect();
    let logs = std::thread::scope(|s| {
        let handles: Vec<_> = cases
            .iter()
            .map(|&(m, j)| {
                s.spawn(move || {
                    let mut cfg = SimConfig::default();
                    cfg.true_params.mass = m;
                    cfg.true_params.inertia = j;
                    run_closed_loop(&cfg)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect::<Vec<_>>()
    });

    println!(
        "{:>5} {:>5} {:>10} {:>10} {:>10} {:>10}",
        "m", "J", "|pos|", "|psi|", "|v|", "|omega|"
    );
    for ((m, j), log) in cases.iter().zip(logs) {
        let log = log?;
        let x = log.final_state().expect("run has a final state");
        println!(
            "{m:>5.1} {j:>5.1} {:>10.4} {:>10.2e} {:>10.2e} {:>10.2e}",
            x.x.hypot(x.y),
            x.psi.abs(),
            x.v.abs(),
            x.omega.abs()
        );
    }
    Ok(())
}
