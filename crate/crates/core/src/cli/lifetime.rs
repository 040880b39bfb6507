use rayon::prelude::*;
use serde::Serialize;

use super::output::{two_column, Artifacts};
use super::ExperimentSpec;
use crate::engine::{write_metrics_csv, LifetimeSummary, Protocol, RoundMetrics, Simulation};
use crate::error::Result;
use crate::numeric::compensated_sum;
use crate::routing::write_hops_csv;

const CONSERVATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
struct SeedRun {
    seed: u64,
    fnd: Option<u64>,
    half: Option<u64>,
    adt: Option<u64>,
    rounds: u64,
    initial_energy_j: f64,
    final_energy_j: f64,
    ledger_energy_j: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct Stat {
    /// Runs that reached the milestone within the round limit.
    count: usize,
    mean: Option<f64>,
    min: Option<u64>,
    max: Option<u64>,
}

impl Stat {
    fn of(values: impl Iterator<Item = Option<u64>>) -> Self {
        let v: Vec<u64> = values.flatten().collect();
        Self {
            count: v.len(),
            mean: (!v.is_empty()).then(|| v.iter().sum::<u64>() as f64 / v.len() as f64),
            min: v.iter().copied().min(),
            max: v.iter().copied().max(),
        }
    }
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    protocol: Protocol,
    node_count: usize,
    max_rounds: u64,
    runs: &'a [SeedRun],
    fnd: Stat,
    half: Stat,
    adt: Stat,
}

fn run_cell(spec: &ExperimentSpec, out: &Artifacts, protocol: Protocol, nodes: usize, seed: u64) -> Result<SeedRun> {
    let config = spec.cell_config(nodes, seed);
    let mut sim = Simulation::new(&config, protocol, spec.grid_res)?;
    let initial = sim.residual();
    let mut metrics: Vec<RoundMetrics> = Vec::new();
    let mut spent = Vec::new();
    let mut hops = Vec::new();
    while sim.rounds_done() < spec.max_rounds && sim.alive() > 0 {
        let (m, ledger) = sim.step()?;
        if spec.hops {
            write_hops_csv(&mut hops, &ledger, m.round == 1)?;
        }
        spent.push(compensated_sum(ledger.energy_spent.iter().copied()));
        metrics.push(m);
    }
    let tag = format!("{protocol}_L{nodes}_seed{seed}");
    let dir = spec.out.join("lifetime");
    let mut csv = Vec::new();
    write_metrics_csv(&mut csv, &metrics)?;
    out.write(&dir.join(format!("metrics_{tag}.csv")), &csv)?;
    out.write_str(
        &dir.join(format!("plot_alive_{tag}.dat")),
        &two_column(("round", "alive"), metrics.iter().map(|m| (m.round, m.alive))),
    )?;
    out.write_str(
        &dir.join(format!("plot_energy_{tag}.dat")),
        &two_column(
            ("round", "residual_j"),
            metrics.iter().map(|m| (m.round, format!("{:.9}", m.residual_j))),
        ),
    )?;
    if spec.hops {
        out.write(&dir.join(format!("hops_{tag}.csv")), &hops)?;
    }
    let summary = LifetimeSummary::from_metrics(nodes, &metrics);
    log::info!("{tag}: fnd={:?} half={:?} adt={:?}", summary.fnd, summary.half, summary.adt);
    Ok(SeedRun {
        seed,
        fnd: summary.fnd,
        half: summary.half,
        adt: summary.adt,
        rounds: summary.rounds,
        initial_energy_j: initial,
        final_energy_j: sim.residual(),
        ledger_energy_j: compensated_sum(spent),
    })
}

pub(super) fn run_lifetime(spec: &ExperimentSpec, out: &Artifacts) -> Result<Vec<String>> {
    let cells: Vec<(Protocol, usize, u64)> = spec
        .protocols
        .iter()
        .flat_map(|&p| spec.node_counts.iter().flat_map(move |&l| spec.seeds.iter().map(move |&s| (p, l, s))))
        .collect();
    let runs = cells
        .par_iter()
        .map(|&(p, l, s)| run_cell(spec, out, p, l, s))
        .collect::<Result<Vec<_>>>()?;

    let mut failures = Vec::new();
    for ((p, l, _), run) in cells.iter().zip(&runs) {
        let drawn = run.initial_energy_j - run.final_energy_j;
        let rel = (run.ledger_energy_j - drawn).abs() / run.initial_energy_j;
        if rel > CONSERVATION_TOLERANCE {
            failures.push(format!("{p} L={l} seed={}: ledger off by {rel:e} of initial energy", run.seed));
        }
    }
    let per_group = spec.seeds.len();
    for (group, chunk) in runs.chunks(per_group).enumerate() {
        let (protocol, nodes, _) = cells[group * per_group];
        let summary = Summary {
            protocol,
            node_count: nodes,
            max_rounds: spec.max_rounds,
            runs: chunk,
            fnd: Stat::of(chunk.iter().map(|r| r.fnd)),
            half: Stat::of(chunk.iter().map(|r| r.half)),
            adt: Stat::of(chunk.iter().map(|r| r.adt)),
        };
        out.write_json(&spec.out.join(format!("summary_{protocol}_L{nodes}.json")), &summary)?;
    }
    Ok(failures)
}
