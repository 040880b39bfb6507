//! Three-tier data flow for one round of the corona protocol.
//!
//! Tier 1: normal nodes send one packet to the nearest legal cluster head,
//! which is their own region's head or a head in a bordered lower region.
//! Nodes of the innermost region have no head and talk to the base station
//! directly. Tier 2: heads of coronas three and up fuse what they received
//! with their own reading and forward one packet inward. Tier 3: corona-2
//! heads fuse and deliver to the base station.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::election::ElectionResult;
use crate::error::Result;
use crate::geometry::Point;
use crate::radio::RadioParams;
use crate::topology::{NodeId, NodeState, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Endpoint {
    Node(NodeId),
    BaseStation,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Node(id) => write!(f, "{id}"),
            Endpoint::BaseStation => f.write_str("BS"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    /// Innermost-region node, or any node without a head, straight to the BS.
    Direct,
    /// Normal node to cluster head.
    Member,
    /// Head to a head one corona further in.
    Relay,
    /// Head to the BS.
    Sink,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hop {
    pub src: NodeId,
    pub dst: Endpoint,
    pub bits: u64,
    pub distance: f64,
    /// Energy drawn from the sender.
    pub tx_energy: f64,
    /// Energy drawn from the receiving node; zero for the BS.
    pub rx_energy: f64,
    pub tier: Tier,
    pub delivered: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    Tx,
    Rx,
    Agg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEvent {
    pub node: NodeId,
    pub kind: EventKind,
    pub joules: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregation {
    pub head: NodeId,
    pub signals: u64,
    pub joules: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RoundLedger {
    pub round: u64,
    /// Joules drawn per node this round, indexed by node id.
    pub energy_spent: Vec<f64>,
    pub hops: Vec<Hop>,
    pub events: Vec<EnergyEvent>,
    pub aggregations: Vec<Aggregation>,
    pub packets_delivered_to_bs: u64,
}

impl RoundLedger {
    pub fn new(round: u64, node_count: usize) -> Self {
        Self {
            round,
            energy_spent: vec![0.0; node_count],
            ..Self::default()
        }
    }

    pub fn total_energy(&self) -> f64 {
        crate::numeric::compensated_sum(self.energy_spent.iter().copied())
    }

    fn record(&mut self, node: NodeId, kind: EventKind, joules: f64) {
        self.energy_spent[node] += joules;
        self.events.push(EnergyEvent { node, kind, joules });
    }
}

/// Moves packets between nodes and charges the radio costs, recording
/// every draw in a [`RoundLedger`].
pub(crate) struct Courier<'a> {
    pub radio: &'a RadioParams,
    pub bits: u64,
    pub bs: Point,
    pub ledger: RoundLedger,
}

impl<'a> Courier<'a> {
    pub fn new(radio: &'a RadioParams, bits: u64, bs: Point, round: u64, node_count: usize) -> Self {
        Self {
            radio,
            bits,
            bs,
            ledger: RoundLedger::new(round, node_count),
        }
    }

    /// Sends one packet; returns whether the receiver got it.
    pub fn send(&mut self, nodes: &mut [NodeState], src: NodeId, dst: Endpoint, tier: Tier) -> Result<bool> {
        if !nodes[src].is_alive() {
            return Ok(false);
        }
        let target = match dst {
            Endpoint::Node(id) => nodes[id].position,
            Endpoint::BaseStation => self.bs,
        };
        let distance = nodes[src].position.distance(target);
        let cost = self.radio.tx_energy(self.bits, distance)?;
        let (tx_energy, sent) = nodes[src].drain(cost);
        self.ledger.record(src, EventKind::Tx, tx_energy);

        let mut rx_energy = 0.0;
        let delivered = match dst {
            _ if !sent => false,
            Endpoint::BaseStation => true,
            Endpoint::Node(id) if !nodes[id].is_alive() => false,
            Endpoint::Node(id) => {
                let (drawn, ok) = nodes[id].drain(self.radio.rx_energy(self.bits)?);
                rx_energy = drawn;
                self.ledger.record(id, EventKind::Rx, drawn);
                ok
            }
        };
        if delivered && dst == Endpoint::BaseStation {
            self.ledger.packets_delivered_to_bs += 1;
        }
        self.ledger.hops.push(Hop {
            src,
            dst,
            bits: self.bits,
            distance,
            tx_energy,
            rx_energy,
            tier,
            delivered,
        });
        Ok(delivered)
    }

    /// Fuses `signals` packets at `head`; returns whether it completed.
    pub fn aggregate(&mut self, nodes: &mut [NodeState], head: NodeId, signals: u64) -> Result<bool> {
        if !nodes[head].is_alive() {
            return Ok(false);
        }
        let cost = self.radio.agg_energy(self.bits, signals)?;
        let (joules, ok) = nodes[head].drain(cost);
        self.ledger.record(head, EventKind::Agg, joules);
        self.ledger.aggregations.push(Aggregation { head, signals, joules });
        Ok(ok)
    }
}

fn nearest<I>(from: Point, candidates: I, nodes: &[NodeState]) -> Option<NodeId>
where
    I: IntoIterator<Item = NodeId>,
{
    candidates
        .into_iter()
        .map(|id| (from.distance(nodes[id].position), id))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, id)| id)
}

/// Nearest head in the first corona below `alpha` that has any, or the BS.
fn escalate(
    from: Point,
    alpha: usize,
    election: &ElectionResult,
    topology: &Topology,
    nodes: &[NodeState],
) -> Endpoint {
    for lower in (2..alpha).rev() {
        let heads = topology
            .regions_in_corona(lower)
            .iter()
            .filter_map(|&r| election.head_of(r));
        if let Some(id) = nearest(from, heads, nodes) {
            return Endpoint::Node(id);
        }
    }
    Endpoint::BaseStation
}

/// Destination of a normal node's packet.
///
/// Legal heads are the node's own region head and the heads of the regions
/// it borders one corona down; ties go to the lower node id. Without any
/// legal head the node escalates to the nearest head of the next populated
/// lower corona, and finally to the base station.
pub fn tier1_assign(
    node: &NodeState,
    election: &ElectionResult,
    topology: &Topology,
    nodes: &[NodeState],
) -> Endpoint {
    let alpha = topology.region(node.region).corona;
    if alpha <= 1 {
        return Endpoint::BaseStation;
    }
    let legal = std::iter::once(node.region)
        .chain(topology.bordered_lower(node.region).iter().copied())
        .filter_map(|r| election.head_of(r))
        .filter(|&h| h != node.id);
    match nearest(node.position, legal, nodes) {
        Some(id) => Endpoint::Node(id),
        None => escalate(node.position, alpha, election, topology, nodes),
    }
}

/// Destination of a head's fused packet.
pub fn relay_target(
    head: &NodeState,
    election: &ElectionResult,
    topology: &Topology,
    nodes: &[NodeState],
) -> Endpoint {
    let alpha = topology.region(head.region).corona;
    if alpha <= 2 {
        return Endpoint::BaseStation;
    }
    let lower = topology
        .bordered_lower(head.region)
        .iter()
        .filter_map(|&r| election.head_of(r));
    match nearest(head.position, lower, nodes) {
        Some(id) => Endpoint::Node(id),
        None => escalate(head.position, alpha, election, topology, nodes),
    }
}

/// Runs one round of the three-tier flow, mutating residual energies.
pub fn execute_round(
    nodes: &mut [NodeState],
    election: &ElectionResult,
    topology: &Topology,
    radio: &RadioParams,
    bits: u64,
    bs: Point,
) -> Result<RoundLedger> {
    let mut courier = Courier::new(radio, bits, bs, election.round, nodes.len());
    let mut inbox = vec![0u64; nodes.len()];

    for id in 0..nodes.len() {
        if !nodes[id].is_alive() || election.is_head(id) {
            continue;
        }
        let dst = tier1_assign(&nodes[id], election, topology, nodes);
        let tier = if dst == Endpoint::BaseStation { Tier::Direct } else { Tier::Member };
        if courier.send(nodes, id, dst, tier)? {
            if let Endpoint::Node(h) = dst {
                inbox[h] += 1;
            }
        }
    }

    // Outer coronas go first so relayed packets reach their next hop
    // before that head fuses its own inbox.
    let mut heads: Vec<(usize, NodeId)> = election
        .heads
        .values()
        .map(|&h| (topology.region(nodes[h].region).corona, h))
        .collect();
    heads.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (alpha, head) in heads {
        if !nodes[head].is_alive() {
            continue;
        }
        if !courier.aggregate(nodes, head, inbox[head] + 1)? {
            continue;
        }
        let dst = relay_target(&nodes[head], election, topology, nodes);
        let tier = if alpha <= 2 || dst == Endpoint::BaseStation { Tier::Sink } else { Tier::Relay };
        if courier.send(nodes, head, dst, tier)? {
            if let Endpoint::Node(h) = dst {
                inbox[h] += 1;
            }
        }
    }
    Ok(courier.ledger)
}

/// Writes hops as `round,src,dst,bits,distance_m,energy_j`; the energy column
/// is the sender's transmit draw.
pub fn write_hops_csv<W: Write>(out: &mut W, ledger: &RoundLedger, header: bool) -> Result<()> {
    if header {
        writeln!(out, "round,src,dst,bits,distance_m,energy_j")?;
    }
    for h in &ledger.hops {
        writeln!(
            out,
            "{},{},{},{},{:.6},{:.9e}",
            ledger.round, h.src, h.dst, h.bits, h.distance, h.tx_energy
        )?;
    }
    Ok(())
}
