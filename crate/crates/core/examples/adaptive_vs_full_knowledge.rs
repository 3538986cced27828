//! Runs the reference scenario twice, once learning the model and once with
//! the true parameters, and overlays the two paths.
//!
//! ```bash
//! cargo run --release --example adaptive_vs_full_knowledge -- /tmp/compare
//! ```

use std::path::PathBuf;

use ampc::controller::SimConfig;
use ampc::harness::run_compare;

fn main() -> ampc::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("target/ampc-examples/adaptive_vs_full_knowledge"));
    let cmp = run_compare(&SimConfig::default(), &out)?;
    let s = &cmp.summary;
    println!("overlay: {}", cmp.overlay_figure.display());
    println!(
        "final position error: adaptive {:.4} m, full knowledge {:.4} m",
        s.adaptive_final_position_error, s.full_knowledge_final_position_error
    );
    println!(
        "realized cost:        adaptive {:.4}, full knowledge {:.4}",
        s.adaptive_total_cost, s.full_knowledge_total_cost
    );
    println!("max input deviation     {:.4}", s.max_input_deviation);
    println!("max position deviation  {:.4} m", s.max_position_deviation);
    Ok(())
}
