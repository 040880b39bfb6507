//! A weighted sum of two independent standard normals is normal with
//! variance rho^2 + delta^2; checks the variance and runs a KS test.
//!
//!     cargo run --release --example lemma1_check

use corona_sim::channel::{verify_lemma1, GaussianMixInput};

fn main() -> corona_sim::Result<()> {
    for (rho, delta) in [(3.0, 4.0), (1.0, 1.0), (0.5, 2.0)] {
        let r = verify_lemma1(&GaussianMixInput { rho, delta, samples: 1_000_000, seed: 11 })?;
        println!(
            "rho={rho} delta={delta}: var={:.4} in [{:.4}, {:.4}], KS D={:.5} p={:.3} -> {}",
            r.variance,
            r.ci_low,
            r.ci_high,
            r.ks_statistic,
            r.ks_p_value,
            if r.pass { "ok" } else { "REJECTED" }
        );
    }
    Ok(())
}
