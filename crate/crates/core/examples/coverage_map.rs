//! Coverage of the initial deployment and how it decays as nodes die.
//! Writes the final coverage mask to `coverage.pgm`.
//!
//!     cargo run --release --example coverage_map

use std::fs::File;
use std::io::BufWriter;

use corona_sim::coverage::write_mask_pgm;
use corona_sim::{NetworkConfig, Protocol, Simulation};

fn main() -> corona_sim::Result<()> {
    let cfg = NetworkConfig::default();
    let mut sim = Simulation::new(&cfg, Protocol::Proposed, Some(1.0))?;
    let grid = sim.coverage_grid().expect("tracking enabled");
    println!("round 0: coverage {:.4}", grid.report().coverage_rate);
    while sim.alive() > cfg.node_count / 2 {
        let (m, _) = sim.step()?;
        if m.round % 200 == 0 {
            println!("round {}: {} alive, coverage {:.4}", m.round, m.alive, m.coverage_rate);
        }
    }
    println!("half the nodes dead after {} rounds", sim.rounds_done());
    let mut out = BufWriter::new(File::create("coverage.pgm")?);
    write_mask_pgm(&mut out, sim.coverage_grid().expect("tracking enabled"))?;
    println!("mask written to coverage.pgm");
    Ok(())
}
