//! Layer-controlled cluster-head election.
//!
//! Every round, each region outside the innermost corona shortlists its
//! highest-energy alive nodes and picks one of them as cluster head.
//! Coronas are processed from the inside out: corona-2 regions pick the
//! shortlisted node closest to the region centroid, and regions further out
//! pick the node with the smallest summed distance to the heads just elected
//! in the two regions they border below.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::topology::{NodeId, NodeState, RegionId, Role, Topology};

/// Share of a region's alive nodes that make the shortlist, in percent.
pub const SHORTLIST_PERCENT: usize = 5;

/// Shortlist size for `alive` nodes: `max(1, ceil(5% · alive))`, or zero
/// for an empty region.
pub fn shortlist_len(alive: usize) -> usize {
    if alive == 0 {
        0
    } else {
        (alive * SHORTLIST_PERCENT).div_ceil(100).max(1)
    }
}

/// Highest-energy alive nodes of a region, ties broken by lower id.
pub fn shortlist<'a, I>(nodes_in_region: I) -> Vec<&'a NodeState>
where
    I: IntoIterator<Item = &'a NodeState>,
{
    let mut alive: Vec<&NodeState> = nodes_in_region.into_iter().filter(|n| n.is_alive()).collect();
    alive.sort_by(|a, b| {
        b.residual_energy
            .total_cmp(&a.residual_energy)
            .then(a.id.cmp(&b.id))
    });
    alive.truncate(shortlist_len(alive.len()));
    alive
}

/// What a region's election saw when it ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectionStep {
    pub region: RegionId,
    pub corona: usize,
    /// Heads of the bordered lower regions as visible at decision time.
    pub lower_heads_seen: Vec<(RegionId, Option<NodeId>)>,
    pub criterion: Criterion,
    pub winner: Option<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// Distance to the region centroid.
    Centroid,
    /// Summed distance to the lower-corona heads that exist this round.
    LowerHeads,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectionResult {
    pub round: u64,
    /// Elected head per region; absent for `R1` and for regions with no
    /// alive node.
    pub heads: BTreeMap<RegionId, NodeId>,
    /// Decisions in processing order.
    pub trace: Vec<ElectionStep>,
}

impl ElectionResult {
    pub fn head_of(&self, region: RegionId) -> Option<NodeId> {
        self.heads.get(&region).copied()
    }

    pub fn is_head(&self, node: NodeId) -> bool {
        self.heads.values().any(|&h| h == node)
    }
}

/// Elects heads for one round without touching node state.
pub fn elect(topology: &Topology, nodes: &[NodeState], round: u64) -> ElectionResult {
    let mut members: Vec<Vec<&NodeState>> = vec![Vec::new(); topology.regions.len()];
    for n in nodes {
        members[n.region].push(n);
    }

    let mut heads = BTreeMap::new();
    let mut trace = Vec::new();
    for alpha in 2..=topology.corona_count() {
        for &region in topology.regions_in_corona(alpha) {
            let candidates = shortlist(members[region].iter().copied());
            let lower_heads_seen: Vec<(RegionId, Option<NodeId>)> = if alpha >= 3 {
                topology
                    .bordered_lower(region)
                    .iter()
                    .map(|&l| (l, heads.get(&l).copied()))
                    .collect()
            } else {
                Vec::new()
            };
            let anchors: Vec<Point> = lower_heads_seen
                .iter()
                .filter_map(|&(_, h)| h.map(|id: NodeId| nodes[id].position))
                .collect();
            let (criterion, score): (Criterion, Box<dyn Fn(&NodeState) -> f64>) =
                if anchors.is_empty() {
                    let c = topology.region(region).centroid;
                    (Criterion::Centroid, Box::new(move |n| n.position.distance(c)))
                } else {
                    (
                        Criterion::LowerHeads,
                        Box::new(move |n| anchors.iter().map(|a| n.position.distance(*a)).sum()),
                    )
                };
            let winner = candidates
                .iter()
                .map(|n| (score(n), n.id))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .map(|(_, id)| id);
            if let Some(id) = winner {
                heads.insert(region, id);
            }
            trace.push(ElectionStep {
                region,
                corona: alpha,
                lower_heads_seen,
                criterion,
                winner,
            });
        }
    }
    ElectionResult { round, heads, trace }
}

/// Marks elected heads as cluster heads and every other alive node normal.
pub fn apply_roles(nodes: &mut [NodeState], result: &ElectionResult) {
    for n in nodes.iter_mut().filter(|n| n.is_alive()) {
        n.role = Role::Normal;
    }
    for &id in result.heads.values() {
        if nodes[id].is_alive() {
            nodes[id].role = Role::ClusterHead;
        }
    }
}

/// Runs [`elect`] and applies the resulting roles.
pub fn elect_round(topology: &Topology, nodes: &mut [NodeState], round: u64) -> ElectionResult {
    let result = elect(topology, nodes, round);
    apply_roles(nodes, &result);
    result
}
