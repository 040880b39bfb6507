//! Circular field layout: coronas, angular sensing regions, the adjacency
//! between neighbouring coronas, and random node deployment.
//!
//! The field is a disk of radius `D/2` centred on the origin. It is cut into
//! `η` equal-width coronas. The innermost corona is one undivided region
//! (`R1`). Every other corona is split into `sectors_per_corona` equal
//! angular sectors, and consecutive coronas are rotated by half a sector so
//! that each upper sector straddles exactly two sectors below it.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Point};

pub type RegionId = usize;
pub type NodeId = usize;

/// Number of coronas for a field of diameter `diameter` holding `nodes`
/// nodes: `round(D / L)`, never less than one.
pub fn corona_count(diameter: f64, nodes: usize) -> usize {
    if nodes == 0 || !(diameter > 0.0) {
        return 1;
    }
    let eta = (diameter / nodes as f64).round();
    if eta < 1.0 {
        1
    } else {
        eta as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corona {
    /// 1-based corona index α.
    pub index: usize,
    pub inner_radius: f64,
    pub outer_radius: f64,
}

impl Corona {
    pub fn area(&self) -> f64 {
        std::f64::consts::PI * (self.outer_radius.powi(2) - self.inner_radius.powi(2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub id: RegionId,
    /// 1-based corona index α.
    pub corona: usize,
    /// Start of the angular span, radians. The span is `[start, end)` and
    /// `end` may exceed 2π when the sector wraps through angle zero.
    pub angle_start: f64,
    pub angle_end: f64,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub centroid: Point,
}

impl Region {
    pub fn angular_width(&self) -> f64 {
        self.angle_end - self.angle_start
    }

    pub fn area(&self) -> f64 {
        0.5 * self.angular_width() * (self.outer_radius.powi(2) - self.inner_radius.powi(2))
    }

    /// Human label, `R1` for the innermost region.
    pub fn label(&self) -> String {
        format!("R{}", self.id + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub center: Point,
    pub radius: f64,
    pub sectors_per_corona: usize,
    pub coronas: Vec<Corona>,
    pub regions: Vec<Region>,
    /// For each region, the regions of the next-lower corona it borders.
    lower: Vec<Vec<RegionId>>,
    /// Reverse of `lower`.
    upper: Vec<Vec<RegionId>>,
    by_corona: Vec<Vec<RegionId>>,
}

impl Topology {
    pub fn corona_count(&self) -> usize {
        self.coronas.len()
    }

    pub fn corona_width(&self) -> f64 {
        self.radius / self.coronas.len() as f64
    }

    pub fn region(&self, id: RegionId) -> &Region {
        &self.regions[id]
    }

    /// Regions of corona `alpha` (1-based), in ascending id order.
    pub fn regions_in_corona(&self, alpha: usize) -> &[RegionId] {
        alpha
            .checked_sub(1)
            .and_then(|i| self.by_corona.get(i))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// The one (corona 2) or two (corona ≥ 3) regions directly below `id`.
    pub fn bordered_lower(&self, id: RegionId) -> &[RegionId] {
        &self.lower[id]
    }

    pub fn bordered_upper(&self, id: RegionId) -> &[RegionId] {
        &self.upper[id]
    }

    pub fn total_area(&self) -> f64 {
        self.regions.iter().map(Region::area).sum()
    }

    /// Region containing `p`, or `None` outside the field.
    pub fn region_of(&self, p: Point) -> Option<RegionId> {
        let (r, theta) = p.polar_from(self.center);
        if !(r <= self.radius) {
            return None;
        }
        let eta = self.coronas.len();
        let band = ((r / self.corona_width()).floor() as usize).min(eta - 1);
        if band == 0 {
            return Some(0);
        }
        let alpha = band + 1;
        let width = TAU / self.sectors_per_corona as f64;
        let rel = normalize_angle(theta - sector_offset(alpha, self.sectors_per_corona));
        let sector = ((rel / width).floor() as usize).min(self.sectors_per_corona - 1);
        Some(self.by_corona[band][sector])
    }

    pub fn contains(&self, id: RegionId, p: Point) -> bool {
        self.region_of(p) == Some(id)
    }
}

/// Angular rotation of corona `alpha`'s sector grid: zero for even
/// coronas, half a sector for odd ones.
fn sector_offset(alpha: usize, sectors: usize) -> f64 {
    if alpha % 2 == 1 {
        0.5 * TAU / sectors as f64
    } else {
        0.0
    }
}

fn annular_sector_centroid(center: Point, r0: f64, r1: f64, start: f64, span: f64) -> Point {
    let half = 0.5 * span;
    let radial = (2.0 / 3.0) * (r1.powi(3) - r0.powi(3)) / (r1.powi(2) - r0.powi(2));
    let shrink = if half >= std::f64::consts::PI {
        0.0
    } else {
        half.sin() / half
    };
    Point::from_polar(center, radial * shrink, start + half)
}

/// Length of the overlap of two angular intervals on the circle.
fn angular_overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (-1..=1)
        .map(|k| {
            let shift = k as f64 * TAU;
            (a1.min(b1 + shift) - a0.max(b0 + shift)).max(0.0)
        })
        .sum()
}

pub fn build_topology(config: &NetworkConfig) -> Result<Topology> {
    config.validate()?;
    let eta = config.effective_corona_count();
    let radius = config.field_radius();
    let width = radius / eta as f64;
    let sectors = config.sectors_per_corona;
    let center = Point::ORIGIN;

    let coronas: Vec<Corona> = (1..=eta)
        .map(|alpha| Corona {
            index: alpha,
            inner_radius: (alpha - 1) as f64 * width,
            // last corona ends exactly at the field edge
            outer_radius: if alpha == eta { radius } else { alpha as f64 * width },
        })
        .collect();

    let mut regions = Vec::with_capacity(1 + (eta - 1) * sectors);
    let mut by_corona = vec![Vec::new(); eta];
    regions.push(Region {
        id: 0,
        corona: 1,
        angle_start: 0.0,
        angle_end: TAU,
        inner_radius: 0.0,
        outer_radius: coronas[0].outer_radius,
        centroid: center,
    });
    by_corona[0].push(0);

    let sector_width = TAU / sectors as f64;
    for c in coronas.iter().skip(1) {
        let offset = sector_offset(c.index, sectors);
        for s in 0..sectors {
            let id = regions.len();
            let start = offset + s as f64 * sector_width;
            regions.push(Region {
                id,
                corona: c.index,
                angle_start: start,
                angle_end: start + sector_width,
                inner_radius: c.inner_radius,
                outer_radius: c.outer_radius,
                centroid: annular_sector_centroid(
                    center,
                    c.inner_radius,
                    c.outer_radius,
                    start,
                    sector_width,
                ),
            });
            by_corona[c.index - 1].push(id);
        }
    }

    let mut lower = vec![Vec::new(); regions.len()];
    let mut upper = vec![Vec::new(); regions.len()];
    for region in regions.iter().filter(|r| r.corona >= 2) {
        let below = &by_corona[region.corona - 2];
        for &cand in below {
            let other = &regions[cand];
            let overlap = angular_overlap(
                region.angle_start,
                region.angle_end,
                other.angle_start,
                other.angle_end,
            );
            if overlap > 1e-9 {
                lower[region.id].push(cand);
                upper[cand].push(region.id);
            }
        }
    }

    Ok(Topology {
        center,
        radius,
        sectors_per_corona: sectors,
        coronas,
        regions,
        lower,
        upper,
        by_corona,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Normal,
    ClusterHead,
    Dead,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeState {
    pub id: NodeId,
    pub position: Point,
    pub residual_energy: f64,
    pub role: Role,
    pub region: RegionId,
}

impl NodeState {
    pub fn is_alive(&self) -> bool {
        self.role != Role::Dead
    }

    /// Spends up to `joules` and returns `(drawn, completed)`. A node that
    /// cannot cover the full cost is drained to zero and the action fails;
    /// a node left at exactly zero completes the action and dies.
    pub fn drain(&mut self, joules: f64) -> (f64, bool) {
        if !self.is_alive() {
            return (0.0, false);
        }
        if joules >= self.residual_energy {
            let spent = self.residual_energy;
            let completed = joules == spent;
            self.residual_energy = 0.0;
            self.role = Role::Dead;
            (spent, completed)
        } else {
            let left = self.residual_energy - joules;
            // record what actually left the battery, not the requested amount
            let drawn = self.residual_energy - left;
            self.residual_energy = left;
            (drawn, true)
        }
    }
}

/// Per-region node counts by joint largest-remainder apportionment:
/// the innermost region's quota is `inner_fraction · L`, the rest share
/// `(1 − inner_fraction) · L` equally. Ties go to the lower region id.
pub fn apportion(node_count: usize, region_count: usize, inner_fraction: f64) -> Vec<usize> {
    if region_count == 1 {
        return vec![node_count];
    }
    let l = node_count as f64;
    let outer_quota = (1.0 - inner_fraction) * l / (region_count - 1) as f64;
    let quotas: Vec<f64> = (0..region_count)
        .map(|i| if i == 0 { inner_fraction * l } else { outer_quota })
        .collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..region_count).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(node_count.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub nodes: Vec<NodeState>,
    /// Regions that received no node (only possible when `L` is smaller
    /// than the region count).
    pub empty_regions: Vec<RegionId>,
}

/// Uniform point inside `region`, resampled until it classifies back into
/// the same region so boundary rounding never misplaces a node.
pub fn sample_in_region<R: Rng + ?Sized>(topology: &Topology, region: RegionId, rng: &mut R) -> Point {
    let reg = &topology.regions[region];
    let r0sq = reg.inner_radius * reg.inner_radius;
    let r1sq = reg.outer_radius * reg.outer_radius;
    loop {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        let r = (r0sq + u * (r1sq - r0sq)).sqrt();
        let theta = reg.angle_start + v * reg.angular_width();
        let p = Point::from_polar(topology.center, r, theta);
        if topology.contains(region, p) {
            return p;
        }
    }
}

pub fn deploy_nodes<R: Rng + ?Sized>(
    config: &NetworkConfig,
    topology: &Topology,
    rng: &mut R,
) -> Result<Deployment> {
    if config.node_count == 0 {
        return Err(Error::invalid("cannot deploy zero nodes"));
    }
    let counts = apportion(
        config.node_count,
        topology.regions.len(),
        config.deployment_fraction_inner,
    );
    let mut nodes = Vec::with_capacity(config.node_count);
    let mut empty_regions = Vec::new();
    for (region, &count) in counts.iter().enumerate() {
        if count == 0 {
            log::warn!("region R{} received no nodes", region + 1);
            empty_regions.push(region);
        }
        for _ in 0..count {
            let position = sample_in_region(topology, region, rng);
            nodes.push(NodeState {
                id: nodes.len(),
                position,
                residual_energy: config.initial_energy,
                role: Role::Normal,
                region,
            });
        }
    }
    Ok(Deployment {
        nodes,
        empty_regions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn default_topology() -> Topology {
        build_topology(&NetworkConfig::default()).unwrap()
    }

    #[test]
    fn corona_count_examples() {
        assert_eq!(corona_count(300.0, 100), 3);
        assert_eq!(corona_count(300.0, 300), 1);
        assert_eq!(corona_count(300.0, 10_000), 1);
    }

    #[test]
    fn explicit_override_wins() {
        let cfg = NetworkConfig {
            corona_count: Some(5),
            ..NetworkConfig::default()
        };
        assert_eq!(build_topology(&cfg).unwrap().corona_count(), 5);
    }

    #[test]
    fn default_layout_has_nine_regions() {
        let t = default_topology();
        assert_eq!(t.corona_count(), 3);
        assert_eq!(t.regions.len(), 9);
        for c in &t.coronas {
            assert!((c.outer_radius - c.inner_radius - 50.0).abs() < 1e-12);
        }
        assert_eq!(t.regions_in_corona(1), &[0]);
        assert_eq!(t.regions_in_corona(2), &[1, 2, 3, 4]);
        assert_eq!(t.regions_in_corona(3), &[5, 6, 7, 8]);
    }

    #[test]
    fn region_areas() {
        let t = default_topology();
        let sector = PI * (100.0f64.powi(2) - 50.0f64.powi(2)) / 4.0;
        assert!((t.regions[1].area() - 5890.486_225_480_862).abs() < 1e-6);
        assert!((t.regions[1].area() - sector).abs() < 1e-9);
        // brute-force sum against π·150²
        let total: f64 = t.regions.iter().map(|r| r.area()).sum();
        assert!((total - 70_685.834_705_770_35).abs() / total < 1e-12);
    }

    #[test]
    fn coronas_partition_the_radius() {
        let t = default_topology();
        assert_eq!(t.coronas[0].inner_radius, 0.0);
        for w in t.coronas.windows(2) {
            assert_eq!(w[0].outer_radius, w[1].inner_radius);
        }
        assert_eq!(t.coronas.last().unwrap().outer_radius, 150.0);
    }

    #[test]
    fn adjacency_matches_layout() {
        let t = default_topology();
        for &id in t.regions_in_corona(2) {
            assert_eq!(t.bordered_lower(id), &[0]);
        }
        for &id in t.regions_in_corona(3) {
            assert_eq!(t.bordered_lower(id).len(), 2, "region {id}");
        }
        // R6 spans [45°, 135°), covering R2 [0°, 90°) and R3 [90°, 180°)
        assert_eq!(t.bordered_lower(5), &[1, 2]);
        // the wrapping sector R9 spans [315°, 405°)
        assert_eq!(t.bordered_lower(8), &[1, 4]);
        for (u, lows) in t.lower.iter().enumerate() {
            for &l in lows {
                assert!(t.bordered_upper(l).contains(&u));
            }
        }
    }

    #[test]
    fn single_corona_has_no_adjacency() {
        let cfg = NetworkConfig {
            corona_count: Some(1),
            ..NetworkConfig::default()
        };
        let t = build_topology(&cfg).unwrap();
        assert_eq!(t.regions.len(), 1);
        assert!(t.bordered_lower(0).is_empty());
        assert!(t.bordered_upper(0).is_empty());
    }

    #[test]
    fn region_lookup() {
        let t = default_topology();
        assert_eq!(t.region_of(Point::new(0.0, 0.0)), Some(0));
        assert_eq!(t.region_of(Point::new(49.9, 0.0)), Some(0));
        assert_eq!(t.region_of(Point::new(75.0, 1.0)), Some(1));
        assert_eq!(t.region_of(Point::new(-75.0, 1.0)), Some(2));
        assert_eq!(t.region_of(Point::new(-75.0, -1.0)), Some(3));
        assert_eq!(t.region_of(Point::new(0.0, 125.0)), Some(5));
        assert_eq!(t.region_of(Point::new(125.0, -1.0)), Some(8));
        assert_eq!(t.region_of(Point::new(150.0, 0.0)), Some(8));
        assert_eq!(t.region_of(Point::new(150.1, 0.0)), None);
    }

    #[test]
    fn centroids_match_numerical_integration() {
        for eta in [2usize, 3, 6] {
            let cfg = NetworkConfig {
                corona_count: Some(eta),
                ..NetworkConfig::default()
            };
            let t = build_topology(&cfg).unwrap();
            let step = 0.5;
            let n = (2.0 * t.radius / step) as i64;
            let mut sums = vec![(0.0f64, 0.0f64, 0usize); t.regions.len()];
            for i in 0..n {
                for j in 0..n {
                    let p = Point::new(-t.radius + (i as f64 + 0.5) * step, -t.radius + (j as f64 + 0.5) * step);
                    if let Some(id) = t.region_of(p) {
                        sums[id].0 += p.x;
                        sums[id].1 += p.y;
                        sums[id].2 += 1;
                    }
                }
            }
            for r in &t.regions {
                let (sx, sy, c) = sums[r.id];
                let mean = Point::new(sx / c as f64, sy / c as f64);
                assert!(mean.distance(r.centroid) < 0.5, "{} centroid {:?} vs {:?}", r.label(), r.centroid, mean);
            }
        }
    }

    #[test]
    fn apportion_examples() {
        assert_eq!(apportion(100, 9, 0.2), vec![20, 10, 10, 10, 10, 10, 10, 10, 10]);
        let small = apportion(9, 9, 0.2);
        assert_eq!(small.iter().sum::<usize>(), 9);
        assert!(small.iter().all(|&c| c >= 1), "{small:?}");
        assert_eq!(apportion(7, 1, 0.2), vec![7]);
    }

    #[test]
    fn apportion_brute_force_rounding() {
        // brute force: for every L, largest remainder assigns each region
        // either floor or ceil of its quota and totals L
        for l in 1..300 {
            for regions in [5usize, 9, 13] {
                let counts = apportion(l, regions, 0.2);
                assert_eq!(counts.iter().sum::<usize>(), l);
                let q0 = 0.2 * l as f64;
                let q = 0.8 * l as f64 / (regions - 1) as f64;
                assert!((counts[0] as f64 - q0).abs() < 1.0 + 1e-9);
                for &c in &counts[1..] {
                    assert!((c as f64 - q).abs() < 1.0 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn deployment_matches_apportionment_and_regions() {
        let cfg = NetworkConfig::default();
        let t = build_topology(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dep = deploy_nodes(&cfg, &t, &mut rng).unwrap();
        assert_eq!(dep.nodes.len(), 100);
        assert!(dep.empty_regions.is_empty());
        let mut per_region = vec![0; 9];
        for (i, n) in dep.nodes.iter().enumerate() {
            assert_eq!(n.id, i);
            assert!(t.contains(n.region, n.position));
            assert_eq!(n.role, Role::Normal);
            assert_eq!(n.residual_energy, 0.5);
            per_region[n.region] += 1;
        }
        assert_eq!(per_region, vec![20, 10, 10, 10, 10, 10, 10, 10, 10]);
    }

    #[test]
    fn small_network_flags_empty_regions() {
        let cfg = NetworkConfig {
            node_count: 5,
            corona_count: Some(3),
            ..NetworkConfig::default()
        };
        let t = build_topology(&cfg).unwrap();
        let dep = deploy_nodes(&cfg, &t, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(dep.nodes.len(), 5);
        assert_eq!(dep.empty_regions.len(), 4);
    }

    #[test]
    fn deployment_is_deterministic() {
        let cfg = NetworkConfig::default();
        let t = build_topology(&cfg).unwrap();
        let a = deploy_nodes(&cfg, &t, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let b = deploy_nodes(&cfg, &t, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        for (x, y) in a.nodes.iter().zip(&b.nodes) {
            assert_eq!(x.position.x.to_bits(), y.position.x.to_bits());
            assert_eq!(x.position.y.to_bits(), y.position.y.to_bits());
        }
    }

    #[test]
    fn drain_clamps_and_kills() {
        let mut n = NodeState {
            id: 0,
            position: Point::ORIGIN,
            residual_energy: 1.0,
            role: Role::Normal,
            region: 0,
        };
        assert_eq!(n.drain(0.25), (0.25, true));
        assert_eq!(n.residual_energy, 0.75);
        assert_eq!(n.drain(5.0), (0.75, false));
        assert_eq!(n.residual_energy, 0.0);
        assert_eq!(n.role, Role::Dead);
        assert_eq!(n.drain(1.0), (0.0, false));
        n.residual_energy = 0.5;
        n.role = Role::Normal;
        assert_eq!(n.drain(0.5), (0.5, true));
        assert_eq!(n.role, Role::Dead);
    }
}
