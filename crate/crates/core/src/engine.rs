//! Round-by-round lifetime simulation for the corona protocol and the LEACH
//! baseline.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::NetworkConfig;
use crate::coverage::{CoverageGrid, Field, SensorDisk, DEFAULT_RESOLUTION};
use crate::election::elect_round;
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::radio::RadioParams;
use crate::routing::{execute_round, Courier, Endpoint, RoundLedger, Tier};
use crate::topology::{build_topology, deploy_nodes, NodeId, NodeState, Role, Topology};

pub const DEFAULT_MAX_ROUNDS: u64 = 8000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Proposed,
    Leach,
}

impl Protocol {
    pub const ALL: [Protocol; 2] = [Protocol::Proposed, Protocol::Leach];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Proposed => "proposed",
            Protocol::Leach => "leach",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "proposed" | "corona" => Ok(Protocol::Proposed),
            "leach" => Ok(Protocol::Leach),
            other => Err(Error::invalid(format!("unknown protocol `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundMetrics {
    /// 1-based round number.
    pub round: u64,
    pub protocol: Protocol,
    pub alive: usize,
    pub residual_j: f64,
    pub packets_bs: u64,
    pub coverage_rate: f64,
    /// Energy drawn during this round.
    pub spent_j: f64,
}

/// Death milestones, each the 1-based round in which it was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifetimeSummary {
    /// First node death.
    pub fnd: Option<u64>,
    /// Half of the nodes dead.
    pub half: Option<u64>,
    /// All nodes dead.
    pub adt: Option<u64>,
    pub rounds: u64,
}

impl LifetimeSummary {
    pub fn from_metrics(node_count: usize, metrics: &[RoundMetrics]) -> Self {
        let first = |pred: &dyn Fn(usize) -> bool| metrics.iter().find(|m| pred(m.alive)).map(|m| m.round);
        Self {
            fnd: first(&|alive| alive < node_count),
            half: first(&|alive| 2 * alive <= node_count),
            adt: first(&|alive| alive == 0),
            rounds: metrics.len() as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub max_rounds: u64,
    /// Coverage grid spacing in meters; `None` skips coverage tracking and
    /// reports NaN.
    pub grid_res: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            max_rounds: DEFAULT_MAX_ROUNDS,
            grid_res: Some(DEFAULT_RESOLUTION),
        }
    }
}

/// Stepwise simulation state. Rounds must be driven in order.
pub struct Simulation {
    config: NetworkConfig,
    protocol: Protocol,
    topology: Topology,
    radio: RadioParams,
    nodes: Vec<NodeState>,
    rng: ChaCha8Rng,
    /// Last round each node served as LEACH cluster head.
    last_head: Vec<Option<u64>>,
    coverage: Option<CoverageGrid>,
    death_round: Vec<Option<u64>>,
    round: u64,
}

impl Simulation {
    pub fn new(config: &NetworkConfig, protocol: Protocol, grid_res: Option<f64>) -> Result<Self> {
        config.validate()?;
        let topology = build_topology(config)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let nodes = deploy_nodes(config, &topology, &mut rng)?.nodes;
        let coverage = match grid_res {
            Some(res) => {
                let mut grid = CoverageGrid::new(Field::from(&topology), res)?;
                for n in &nodes {
                    grid.add(&SensorDisk::new(n.position, config.sensing_radius));
                }
                Some(grid)
            }
            None => None,
        };
        Ok(Self {
            config: config.clone(),
            protocol,
            radio: config.radio(),
            last_head: vec![None; nodes.len()],
            death_round: vec![None; nodes.len()],
            nodes,
            topology,
            rng,
            coverage,
            round: 0,
        })
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Round in which each node died, if it has.
    pub fn death_rounds(&self) -> &[Option<u64>] {
        &self.death_round
    }

    pub fn rounds_done(&self) -> u64 {
        self.round
    }

    pub fn alive(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_alive()).count()
    }

    pub fn residual(&self) -> f64 {
        compensated_sum(self.nodes.iter().map(|n| n.residual_energy))
    }

    pub fn coverage_grid(&self) -> Option<&CoverageGrid> {
        self.coverage.as_ref()
    }

    /// Plays one round and returns its metrics and ledger.
    pub fn step(&mut self) -> Result<(RoundMetrics, RoundLedger)> {
        self.round += 1;
        let round = self.round;
        let was_alive: Vec<bool> = self.nodes.iter().map(NodeState::is_alive).collect();
        let ledger = match self.protocol {
            Protocol::Proposed => {
                let election = elect_round(&self.topology, &mut self.nodes, round);
                execute_round(
                    &mut self.nodes,
                    &election,
                    &self.topology,
                    &self.radio,
                    self.config.packet_bits,
                    self.config.bs_position,
                )?
            }
            Protocol::Leach => leach_round(
                &mut self.nodes,
                &mut self.last_head,
                &self.config,
                round,
                &mut self.rng,
            )?,
        };
        for (id, alive_before) in was_alive.into_iter().enumerate() {
            if alive_before && !self.nodes[id].is_alive() {
                self.death_round[id] = Some(round);
                if let Some(grid) = self.coverage.as_mut() {
                    grid.remove(&SensorDisk::new(self.nodes[id].position, self.config.sensing_radius));
                }
            }
        }
        let metrics = RoundMetrics {
            round,
            protocol: self.protocol,
            alive: self.alive(),
            residual_j: self.residual(),
            packets_bs: ledger.packets_delivered_to_bs,
            coverage_rate: self.coverage.as_ref().map_or(f64::NAN, |g| g.report().coverage_rate),
            spent_j: ledger.total_energy(),
        };
        Ok((metrics, ledger))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub metrics: Vec<RoundMetrics>,
    pub summary: LifetimeSummary,
    pub initial_energy_j: f64,
    pub final_energy_j: f64,
    /// Sum of every ledger entry over the run.
    pub ledger_energy_j: f64,
}

pub fn run(config: &NetworkConfig, protocol: Protocol, max_rounds: u64) -> Result<RunOutput> {
    run_with(
        config,
        protocol,
        &RunOptions {
            max_rounds,
            ..RunOptions::default()
        },
    )
}

/// Runs until every node is dead or `max_rounds` rounds have been played.
pub fn run_with(config: &NetworkConfig, protocol: Protocol, options: &RunOptions) -> Result<RunOutput> {
    if options.max_rounds == 0 {
        return Err(Error::invalid("max_rounds must be at least 1"));
    }
    let mut sim = Simulation::new(config, protocol, options.grid_res)?;
    let initial = sim.residual();
    let mut metrics = Vec::new();
    let mut spent = Vec::new();
    while sim.rounds_done() < options.max_rounds && sim.alive() > 0 {
        let (m, ledger) = sim.step()?;
        spent.extend_from_slice(&ledger.energy_spent);
        // fold per round to keep memory flat on long runs
        let folded = compensated_sum(spent.drain(..));
        spent.push(folded);
        metrics.push(m);
    }
    let summary = LifetimeSummary::from_metrics(config.node_count, &metrics);
    Ok(RunOutput {
        metrics,
        summary,
        initial_energy_j: initial,
        final_energy_j: sim.residual(),
        ledger_energy_j: compensated_sum(spent),
    })
}

/// Rounds in a LEACH epoch, `1/p` rounded.
pub fn leach_epoch(p: f64) -> u64 {
    ((1.0 / p).round() as u64).max(1)
}

/// LEACH election threshold for round `round` (0-based).
pub fn leach_threshold(p: f64, round: u64) -> f64 {
    let epoch = leach_epoch(p);
    p / (1.0 - p * (round % epoch) as f64)
}

/// Self-election of LEACH heads. Nodes that served within the last epoch
/// are ineligible; the others draw one uniform number each, in id order.
pub fn leach_elect<R: Rng + ?Sized>(
    nodes: &[NodeState],
    last_head: &[Option<u64>],
    p: f64,
    round: u64,
    rng: &mut R,
) -> Vec<NodeId> {
    let epoch = leach_epoch(p);
    let threshold = leach_threshold(p, round);
    let mut heads = Vec::new();
    for n in nodes.iter().filter(|n| n.is_alive()) {
        let eligible = last_head[n.id].is_none_or(|r| round >= r + epoch);
        if eligible && rng.random::<f64>() < threshold {
            heads.push(n.id);
        }
    }
    heads
}

/// One LEACH round: self-election, members join the nearest head, heads
/// fuse and transmit straight to the base station. With no head at all,
/// every node transmits directly. `round` is 1-based like the engine's.
pub fn leach_round<R: Rng + ?Sized>(
    nodes: &mut [NodeState],
    last_head: &mut [Option<u64>],
    config: &NetworkConfig,
    round: u64,
    rng: &mut R,
) -> Result<RoundLedger> {
    let r = round.saturating_sub(1);
    let heads = leach_elect(nodes, last_head, config.leach_p, r, rng);
    for n in nodes.iter_mut().filter(|n| n.is_alive()) {
        n.role = Role::Normal;
    }
    for &h in &heads {
        nodes[h].role = Role::ClusterHead;
        last_head[h] = Some(r);
    }

    let radio = config.radio();
    let mut courier = Courier::new(&radio, config.packet_bits, config.bs_position, round, nodes.len());
    let mut inbox = vec![0u64; nodes.len()];
    for id in 0..nodes.len() {
        if !nodes[id].is_alive() || nodes[id].role == Role::ClusterHead {
            continue;
        }
        let p = nodes[id].position;
        let nearest = heads
            .iter()
            .map(|&h| (p.distance(nodes[h].position), h))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        match nearest {
            Some((_, h)) => {
                if courier.send(nodes, id, Endpoint::Node(h), Tier::Member)? {
                    inbox[h] += 1;
                }
            }
            None => {
                courier.send(nodes, id, Endpoint::BaseStation, Tier::Direct)?;
            }
        }
    }
    for &h in &heads {
        if courier.aggregate(nodes, h, inbox[h] + 1)? {
            courier.send(nodes, h, Endpoint::BaseStation, Tier::Sink)?;
        }
    }
    Ok(courier.ledger)
}

/// Per-round metrics as `round,protocol,alive,residual_j,packets_bs,coverage_rate`.
pub fn write_metrics_csv<W: Write>(out: &mut W, metrics: &[RoundMetrics]) -> Result<()> {
    writeln!(out, "round,protocol,alive,residual_j,packets_bs,coverage_rate")?;
    for m in metrics {
        writeln!(
            out,
            "{},{},{},{:.9},{},{:.6}",
            m.round, m.protocol, m.alive, m.residual_j, m.packets_bs, m.coverage_rate
        )?;
    }
    Ok(())
}
