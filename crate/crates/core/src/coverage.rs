//! Binary disk sensing coverage.
//!
//! A point is covered by a node when it lies within the node's sensing
//! radius, boundary included. The union probability keeps the
//! complement-product form so stochastic sensing can slot in later; with
//! binary sensing it reduces to the disk-union indicator. Area coverage is
//! the fraction of grid sample points inside the field disk that are covered.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::topology::{NodeState, Topology};

/// Default spacing of the coverage sample grid, meters.
pub const DEFAULT_RESOLUTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorDisk {
    pub center: Point,
    pub radius: f64,
}

impl SensorDisk {
    pub fn new(center: Point, radius: f64) -> Self {
        Self { center, radius }
    }
}

/// The circular deployment field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub center: Point,
    pub radius: f64,
}

impl From<&Topology> for Field {
    fn from(t: &Topology) -> Self {
        Self {
            center: t.center,
            radius: t.radius,
        }
    }
}

pub fn point_covered(point: Point, node: &SensorDisk) -> bool {
    point.distance_sq(node.center) <= node.radius * node.radius
}

/// Probability that at least one node covers `point`:
/// `1 − Π (1 − P_cov)`.
pub fn p_union(point: Point, nodes: &[SensorDisk]) -> f64 {
    1.0 - nodes
        .iter()
        .map(|n| 1.0 - if point_covered(point, n) { 1.0 } else { 0.0 })
        .product::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub coverage_rate: f64,
    pub resolution: f64,
    pub covered: u64,
    pub total: u64,
}

/// Square sampling lattice over the field's bounding box. Sample points are
/// cell centres; only those inside the field disk count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    pub field: Field,
    pub resolution: f64,
    pub side: usize,
}

impl SampleGrid {
    pub fn new(field: Field, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::invalid(format!("grid resolution must be > 0, got {resolution}")));
        }
        if !(field.radius > 0.0) {
            return Err(Error::invalid("field radius must be > 0"));
        }
        if resolution > field.radius {
            return Err(Error::invalid(format!(
                "grid resolution {resolution} exceeds field radius {}",
                field.radius
            )));
        }
        let side = (2.0 * field.radius / resolution).ceil() as usize;
        Ok(Self { field, resolution, side })
    }

    pub fn point(&self, i: usize, j: usize) -> Point {
        let origin_x = self.field.center.x - self.field.radius;
        let origin_y = self.field.center.y - self.field.radius;
        Point::new(
            origin_x + (i as f64 + 0.5) * self.resolution,
            origin_y + (j as f64 + 0.5) * self.resolution,
        )
    }

    pub fn in_field(&self, p: Point) -> bool {
        p.distance_sq(self.field.center) <= self.field.radius * self.field.radius
    }

    /// Cell index range (inclusive-exclusive) whose centres can fall within
    /// `radius` of `center` along one axis.
    fn span(&self, c: f64, origin: f64, radius: f64) -> (usize, usize) {
        let lo = ((c - radius - origin) / self.resolution - 0.5).floor().max(0.0) as usize;
        let hi = (((c + radius - origin) / self.resolution - 0.5).ceil() + 1.0).max(0.0) as usize;
        (lo.min(self.side), hi.min(self.side))
    }

    fn cells_of(&self, disk: &SensorDisk) -> impl Iterator<Item = (usize, usize)> + '_ {
        let ox = self.field.center.x - self.field.radius;
        let oy = self.field.center.y - self.field.radius;
        let (i0, i1) = self.span(disk.center.x, ox, disk.radius);
        let (j0, j1) = self.span(disk.center.y, oy, disk.radius);
        let disk = *disk;
        (j0..j1).flat_map(move |j| (i0..i1).map(move |i| (i, j))).filter(move |&(i, j)| {
            let p = self.point(i, j);
            self.in_field(p) && point_covered(p, &disk)
        })
    }
}

/// Covered fraction of the field at the given grid resolution.
pub fn coverage_rate(nodes: &[SensorDisk], field: Field, resolution: f64) -> Result<CoverageReport> {
    let grid = SampleGrid::new(field, resolution)?;
    let mut covered = 0u64;
    let mut total = 0u64;
    for j in 0..grid.side {
        for i in 0..grid.side {
            let p = grid.point(i, j);
            if !grid.in_field(p) {
                continue;
            }
            total += 1;
            if nodes.iter().any(|n| point_covered(p, n)) {
                covered += 1;
            }
        }
    }
    Ok(CoverageReport {
        coverage_rate: if total == 0 { 0.0 } else { covered as f64 / total as f64 },
        resolution,
        covered,
        total,
    })
}

/// Sensing disks of the alive nodes.
pub fn alive_disks(nodes: &[NodeState], radius: f64) -> Vec<SensorDisk> {
    nodes
        .iter()
        .filter(|n| n.is_alive())
        .map(|n| SensorDisk::new(n.position, radius))
        .collect()
}

/// Per-cell count of covering nodes, kept up to date as nodes die so the
/// per-round coverage rate costs nothing once the grid is built.
#[derive(Debug, Clone)]
pub struct CoverageGrid {
    grid: SampleGrid,
    counts: Vec<u32>,
    covered: u64,
    total: u64,
}

impl CoverageGrid {
    pub fn new(field: Field, resolution: f64) -> Result<Self> {
        let grid = SampleGrid::new(field, resolution)?;
        let mut total = 0u64;
        for j in 0..grid.side {
            for i in 0..grid.side {
                if grid.in_field(grid.point(i, j)) {
                    total += 1;
                }
            }
        }
        Ok(Self {
            grid,
            counts: vec![0; grid.side * grid.side],
            covered: 0,
            total,
        })
    }

    pub fn add(&mut self, disk: &SensorDisk) {
        let side = self.grid.side;
        for (i, j) in self.grid.cells_of(disk) {
            let c = &mut self.counts[j * side + i];
            if *c == 0 {
                self.covered += 1;
            }
            *c += 1;
        }
    }

    /// Removes a disk previously passed to [`CoverageGrid::add`].
    pub fn remove(&mut self, disk: &SensorDisk) {
        let side = self.grid.side;
        for (i, j) in self.grid.cells_of(disk) {
            let c = &mut self.counts[j * side + i];
            debug_assert!(*c > 0, "removing a disk that was never added");
            *c -= 1;
            if *c == 0 {
                self.covered -= 1;
            }
        }
    }

    pub fn report(&self) -> CoverageReport {
        CoverageReport {
            coverage_rate: if self.total == 0 { 0.0 } else { self.covered as f64 / self.total as f64 },
            resolution: self.grid.resolution,
            covered: self.covered,
            total: self.total,
        }
    }

    /// Mask with 255 for covered samples, 0 elsewhere (including outside
    /// the field). Row 0 is the top of the field.
    pub fn mask(&self) -> (usize, Vec<u8>) {
        let side = self.grid.side;
        let mut out = vec![0u8; side * side];
        for j in 0..side {
            for i in 0..side {
                if self.counts[j * side + i] > 0 {
                    out[(side - 1 - j) * side + i] = 255;
                }
            }
        }
        (side, out)
    }
}

/// Writes a binary PGM mask of the covered samples.
pub fn write_mask_pgm<W: Write>(out: &mut W, grid: &CoverageGrid) -> Result<()> {
    let (side, pixels) = grid.mask();
    write!(out, "P5\n{side} {side}\n255\n")?;
    out.write_all(&pixels)?;
    Ok(())
}
