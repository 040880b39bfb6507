//! Per-packet energy of the first-order radio across distances.
//!
//!     cargo run --example radio_budget

use corona_sim::RadioParams;

fn main() -> corona_sim::Result<()> {
    let radio = RadioParams::default();
    let bits = 4000;
    println!("crossover distance: {:.2} m", radio.d_o);
    println!("{:>8} {:>14} {:>14}", "dist_m", "tx_uJ", "tx+rx_uJ");
    for d in [0.0, 10.0, 25.0, 50.0, 75.0, radio.d_o, 100.0, 150.0, 212.0] {
        let tx = radio.tx_energy(bits, d)?;
        let rx = radio.rx_energy(bits)?;
        println!("{d:>8.1} {:>14.3} {:>14.3}", tx * 1e6, (tx + rx) * 1e6);
    }
    println!("aggregating 5 signals: {:.3} uJ", radio.agg_energy(bits, 5)? * 1e6);
    Ok(())
}
