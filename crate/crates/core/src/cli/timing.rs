use std::fmt::Write as _;
use std::time::Instant;

use super::output::Artifacts;
use super::ExperimentSpec;
use crate::engine::{run_with, RunOptions};
use crate::error::Result;

/// Median of a non-empty slice.
fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn machine_descriptor() -> String {
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!(
        "os={} arch={} cpus={} threads={}\n",
        std::env::consts::OS,
        std::env::consts::ARCH,
        cpus,
        rayon::current_num_threads()
    )
}

/// Wall-clock per run, sequential so trials do not compete for cores.
/// Uses the first seed only.
pub(super) fn run_timing(spec: &ExperimentSpec, out: &Artifacts) -> Result<Vec<String>> {
    let options = RunOptions {
        max_rounds: spec.max_rounds,
        grid_res: spec.grid_res,
    };
    let mut csv = String::from("protocol,node_count,trials,rounds,median_s,min_s,max_s\n");
    for &protocol in &spec.protocols {
        for &nodes in &spec.node_counts {
            let config = spec.cell_config(nodes, spec.seeds[0]);
            let mut times = Vec::with_capacity(spec.trials);
            let mut rounds = 0;
            for _ in 0..spec.trials {
                let start = Instant::now();
                let run = run_with(&config, protocol, &options)?;
                times.push(start.elapsed().as_secs_f64());
                rounds = run.metrics.len();
            }
            let med = median(&times);
            log::info!("{protocol} L={nodes}: median {med:.3} s over {} trials", spec.trials);
            let min = times.iter().copied().fold(f64::INFINITY, f64::min);
            let max = times.iter().copied().fold(0.0, f64::max);
            let _ = writeln!(csv, "{protocol},{nodes},{},{rounds},{med:.6},{min:.6},{max:.6}", spec.trials);
        }
    }
    let dir = spec.out.join("timing");
    out.write_str(&dir.join("timing.csv"), &csv)?;
    out.write_str(&dir.join("machine.txt"), &machine_descriptor())?;
    Ok(Vec::new())
}
