//! Network lifetime of the corona protocol against LEACH over a few seeds.
//!
//!     cargo run --release --example lifetime_compare [seeds]

use corona_sim::{run, NetworkConfig, Protocol};

fn main() -> corona_sim::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    println!("{:>5} {:>9} {:>6} {:>6} {:>6}", "seed", "protocol", "FND", "half", "ADT");
    for seed in 1..=seeds {
        let cfg = NetworkConfig { rng_seed: seed, ..NetworkConfig::default() };
        for p in Protocol::ALL {
            let out = run(&cfg, p, 8000)?;
            let s = out.summary;
            let show = |v: Option<u64>| v.map_or("-".to_string(), |r| r.to_string());
            println!("{seed:>5} {p:>9} {:>6} {:>6} {:>6}", show(s.fnd), show(s.half), show(s.adt));
        }
    }
    Ok(())
}
