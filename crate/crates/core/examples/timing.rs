//! Wall-clock cost of a full run as the node count grows.
//!
//!     cargo run --release --example timing

use std::time::Instant;

use corona_sim::{run_with, NetworkConfig, Protocol, RunOptions};

fn main() -> corona_sim::Result<()> {
    let options = RunOptions { max_rounds: 8000, grid_res: None };
    for node_count in [100, 1000, 10_000] {
        let cfg = NetworkConfig { node_count, ..NetworkConfig::default() };
        for p in Protocol::ALL {
            let start = Instant::now();
            let out = run_with(&cfg, p, &options)?;
            println!(
                "L={node_count:>6} {p:>9}: {:>5} rounds in {:.3} s",
                out.metrics.len(),
                start.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}
