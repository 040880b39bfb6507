use rayon::prelude::*;
use serde::Serialize;

use super::output::Artifacts;
use super::ExperimentSpec;
use crate::coverage::{write_mask_pgm, CoverageReport, DEFAULT_RESOLUTION};
use crate::engine::{Protocol, Simulation};
use crate::error::Result;

#[derive(Debug, Serialize)]
struct CoverageFile {
    node_count: usize,
    seed: u64,
    sensing_radius: f64,
    #[serde(flatten)]
    report: CoverageReport,
}

/// Coverage of the initial deployment for every `(L, seed)` pair, with a
/// mask image of the covered samples.
pub(super) fn run_coverage(spec: &ExperimentSpec, out: &Artifacts) -> Result<Vec<String>> {
    let res = spec.grid_res.unwrap_or(DEFAULT_RESOLUTION);
    let cells: Vec<(usize, u64)> = spec
        .node_counts
        .iter()
        .flat_map(|&l| spec.seeds.iter().map(move |&s| (l, s)))
        .collect();
    cells.par_iter().try_for_each(|&(nodes, seed)| -> Result<()> {
        let config = spec.cell_config(nodes, seed);
        let sim = Simulation::new(&config, Protocol::Proposed, Some(res))?;
        let grid = sim.coverage_grid().expect("coverage tracking requested");
        let report = grid.report();
        log::info!("L={nodes} seed={seed}: coverage {:.4}", report.coverage_rate);
        let dir = spec.out.join("coverage");
        out.write_json(
            &dir.join(format!("coverage_L{nodes}_seed{seed}.json")),
            &CoverageFile {
                node_count: nodes,
                seed,
                sensing_radius: config.sensing_radius,
                report,
            },
        )?;
        let mut pgm = Vec::new();
        write_mask_pgm(&mut pgm, grid)?;
        out.write(&dir.join(format!("mask_L{nodes}_seed{seed}.pgm")), &pgm)
    })?;
    Ok(Vec::new())
}
