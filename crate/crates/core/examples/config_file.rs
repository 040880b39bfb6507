//! Load a network configuration from a `key = value` file, or print the
//! defaults in that format.
//!
//!     cargo run --example config_file [path]

use std::path::Path;

use corona_sim::NetworkConfig;

fn main() -> corona_sim::Result<()> {
    match std::env::args().nth(1) {
        Some(path) => {
            let cfg = NetworkConfig::load(Path::new(&path))?;
            println!("{cfg:#?}");
            println!("coronas: {}", cfg.effective_corona_count());
        }
        None => print!("{}", NetworkConfig::default().to_kv_string()),
    }
    Ok(())
}
