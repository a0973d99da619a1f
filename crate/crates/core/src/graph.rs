//! Random geometric graphs built over a uniform cell grid.
//!
//! Two nodes are adjacent when their distance is at most the radius (ties
//! count as adjacent). The grid uses square-ish cells whose sides are never
//! shorter than the radius, so every neighbor of a point lies in the 3x3
//! block of cells around it.

use crate::error::GraphError;
use crate::geometry::{Boundary, PointSet, Region};

/// An immutable random geometric graph.
///
/// Adjacency is stored in compressed rows: the neighbors of node `i` are
/// `targets[offsets[i]..offsets[i + 1]]`, sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialGraph {
    points: PointSet,
    radius: f64,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

/// Cell bookkeeping along one axis.
#[derive(Clone, Copy, Debug)]
struct Axis {
    cells: usize,
    inv_side: f64,
}

impl Axis {
    fn new(length: f64, radius: f64) -> Self {
        // Keep the side strictly above the radius so rounding in `cell_of`
        // can never push a true neighbor two cells away.
        let cells = ((length / (radius * (1.0 + 1e-9))).floor() as usize).max(1);
        Self {
            cells,
            inv_side: cells as f64 / length,
        }
    }

    #[inline]
    fn cell_of(&self, coord: f64) -> usize {
        ((coord * self.inv_side) as usize).min(self.cells - 1)
    }

    /// Distinct cells within one step of `c`, in ascending order.
    fn around(&self, c: usize, wrap: bool) -> ([usize; 3], usize) {
        let mut out = [0usize; 3];
        let mut len = 0;
        let mut push = |v: usize| {
            if !out[..len].contains(&v) {
                out[len] = v;
                len += 1;
            }
        };
        if wrap {
            push((c + self.cells - 1) % self.cells);
            push(c);
            push((c + 1) % self.cells);
        } else {
            if c > 0 {
                push(c - 1);
            }
            push(c);
            if c + 1 < self.cells {
                push(c + 1);
            }
        }
        out[..len].sort_unstable();
        (out, len)
    }
}

impl SpatialGraph {
    /// Connects every pair of points within `radius` of each other.
    pub fn build(points: PointSet, radius: f64) -> Result<Self, GraphError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GraphError::InvalidRadius(radius));
        }
        let region = points.region;
        let wrap = region.boundary == Boundary::Torus;
        let ax = Axis::new(region.width, radius);
        let ay = Axis::new(region.height, radius);
        let n = points.len();
        let coords = &points.coordinates;

        // Counting sort of points into cells.
        let cell_count = ax.cells * ay.cells;
        let cell_of: Vec<usize> = coords
            .iter()
            .map(|p| ay.cell_of(p[1]) * ax.cells + ax.cell_of(p[0]))
            .collect();
        let mut cell_start = vec![0usize; cell_count + 1];
        for &c in &cell_of {
            cell_start[c + 1] += 1;
        }
        for c in 0..cell_count {
            cell_start[c + 1] += cell_start[c];
        }
        let mut fill = cell_start.clone();
        let mut members = vec![0usize; n];
        for (i, &c) in cell_of.iter().enumerate() {
            members[fill[c]] = i;
            fill[c] += 1;
        }

        let r2 = radius * radius;
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        let mut scratch = Vec::new();
        for (i, &p) in coords.iter().enumerate() {
            let c = cell_of[i];
            let (cx, cy) = (c % ax.cells, c / ax.cells);
            let (xs, xl) = ax.around(cx, wrap);
            let (ys, yl) = ay.around(cy, wrap);
            scratch.clear();
            for &gy in &ys[..yl] {
                for &gx in &xs[..xl] {
                    let cell = gy * ax.cells + gx;
                    for &j in &members[cell_start[cell]..cell_start[cell + 1]] {
                        if j != i && region.distance_sq(p, coords[j]) <= r2 {
                            scratch.push(j);
                        }
                    }
                }
            }
            scratch.sort_unstable();
            targets.extend_from_slice(&scratch);
            offsets.push(targets.len());
        }

        Ok(Self {
            points,
            radius,
            offsets,
            targets,
        })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn region(&self) -> &Region {
        &self.points.region
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn position(&self, node: usize) -> [f64; 2] {
        self.points.coordinates[node]
    }

    #[inline]
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    #[inline]
    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.offsets.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Average degree over all nodes (0 for an empty graph).
    pub fn mean_degree(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.targets.len() as f64 / self.len() as f64
        }
    }

    pub(crate) fn check_mask(&self, mask: &[bool]) -> Result<(), GraphError> {
        if mask.len() != self.len() {
            return Err(GraphError::MaskLength {
                expected: self.len(),
                got: mask.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_node(&self, node: usize) -> Result<(), GraphError> {
        if node >= self.len() {
            return Err(GraphError::NodeOutOfRange {
                node,
                len: self.len(),
            });
        }
        Ok(())
    }
}
