//! Corona and region layout for a field, with the election of one round.
//!
//!     cargo run --example topology_layout [node_count]

use corona_sim::election::elect;
use corona_sim::topology::deploy_nodes;
use corona_sim::{build_topology, NetworkConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> corona_sim::Result<()> {
    let node_count = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let cfg = NetworkConfig { node_count, ..NetworkConfig::default() };
    let topo = build_topology(&cfg)?;
    println!(
        "D={} m, L={}: {} coronas of width {:.1} m, {} regions",
        cfg.diameter,
        cfg.node_count,
        topo.corona_count(),
        topo.corona_width(),
        topo.regions.len()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let deployment = deploy_nodes(&cfg, &topo, &mut rng)?;
    for r in &topo.regions {
        let members = deployment.nodes.iter().filter(|n| n.region == r.id).count();
        println!(
            "{:>4} corona {} r=[{:5.1},{:5.1}] area={:8.1} m2 nodes={members:3} lower={:?}",
            r.label(),
            r.corona,
            r.inner_radius,
            r.outer_radius,
            r.area(),
            topo.bordered_lower(r.id).iter().map(|&i| topo.region(i).label()).collect::<Vec<_>>()
        );
    }

    let result = elect(&topo, &deployment.nodes, 1);
    for step in &result.trace {
        println!(
            "round 1: {} elects node {:?} by {:?}",
            topo.region(step.region).label(),
            step.winner,
            step.criterion
        );
    }
    Ok(())
}
