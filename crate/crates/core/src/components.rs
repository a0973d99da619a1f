//! Connected components of the operational subgraph, and rectangle
//! crossings used as a finite-size percolation proxy.

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::geometry::Boundary;
use crate::graph::SpatialGraph;

/// Disjoint-set forest with union by size and path compression.
#[derive(Clone, Debug)]
pub struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    /// Merges the sets holding `a` and `b`; returns the surviving root.
    pub fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        ra
    }

    pub fn set_size(&mut self, node: usize) -> usize {
        let root = self.find(node);
        self.size[root]
    }
}

/// Component id assigned to dead nodes.
pub const DEAD: usize = usize::MAX;

/// Component membership for the alive nodes of a graph.
///
/// Ids are dense, `0..sizes.len()`, numbered in order of each component's
/// lowest node index. Dead nodes carry [`DEAD`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentLabeling {
    pub labels: Vec<usize>,
    pub sizes: Vec<usize>,
    /// Id of the largest component; ties go to the lowest id.
    pub largest: Option<usize>,
}

impl ComponentLabeling {
    pub fn largest_size(&self) -> usize {
        self.largest.map_or(0, |id| self.sizes[id])
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn alive_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn members(&self, id: usize) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |&(_, &l)| l == id)
            .map(|(i, _)| i)
    }

    /// Mask selecting the nodes of the largest component.
    pub fn largest_mask(&self) -> Vec<bool> {
        match self.largest {
            Some(id) => self.labels.iter().map(|&l| l == id).collect(),
            None => vec![false; self.labels.len()],
        }
    }
}

/// Labels the connected components of the subgraph induced by `alive`.
pub fn components(graph: &SpatialGraph, alive: &[bool]) -> Result<ComponentLabeling, GraphError> {
    graph.check_mask(alive)?;
    let n = graph.len();
    let mut sets = DisjointSet::new(n);
    for u in (0..n).filter(|&u| alive[u]) {
        for &v in graph.neighbors(u) {
            if v > u && alive[v] {
                sets.union(u, v);
            }
        }
    }

    let mut labels = vec![DEAD; n];
    let mut root_label = vec![DEAD; n];
    let mut sizes = Vec::new();
    for u in (0..n).filter(|&u| alive[u]) {
        let root = sets.find(u);
        if root_label[root] == DEAD {
            root_label[root] = sizes.len();
            sizes.push(0);
        }
        labels[u] = root_label[root];
        sizes[root_label[root]] += 1;
    }
    let largest = sizes
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, usize)>, (id, &s)| match best {
            Some((_, bs)) if bs >= s => best,
            _ => Some((id, s)),
        })
        .map(|(id, _)| id);
    Ok(ComponentLabeling {
        labels,
        sizes,
        largest,
    })
}

/// An axis-aligned rectangle `[x_min, x_max] x [y_min, y_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x_min && p[0] <= self.x_max && p[1] >= self.y_min && p[1] <= self.y_max
    }
}

impl std::fmt::Display for Rect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}, {}] x [{}, {}]",
            self.x_min, self.x_max, self.y_min, self.y_max
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    LeftRight,
    TopBottom,
}

/// Whether alive nodes inside `rect` form a connected chain across it.
///
/// A crossing is a sequence of alive nodes inside the closed rectangle,
/// consecutive ones adjacent, whose first node is strictly within one radius
/// of the entry side (but not on it) and whose last node is strictly within
/// one radius of the opposite side (but not on it).
pub fn crosses(
    graph: &SpatialGraph,
    alive: &[bool],
    rect: Rect,
    direction: Direction,
) -> Result<bool, GraphError> {
    graph.check_mask(alive)?;
    let region = graph.region();
    if region.boundary == Boundary::Torus {
        return Err(GraphError::CrossingOnTorus);
    }
    let valid = rect.x_min < rect.x_max
        && rect.y_min < rect.y_max
        && rect.x_min >= 0.0
        && rect.y_min >= 0.0
        && rect.x_max <= region.width
        && rect.y_max <= region.height;
    if !valid {
        return Err(GraphError::RectOutsideRegion(rect.to_string()));
    }

    let r = graph.radius();
    let (lo, hi, axis) = match direction {
        Direction::LeftRight => (rect.x_min, rect.x_max, 0),
        Direction::TopBottom => (rect.y_min, rect.y_max, 1),
    };
    let n = graph.len();
    let inside: Vec<bool> = (0..n)
        .map(|i| alive[i] && rect.contains(graph.position(i)))
        .collect();

    let mut sets = DisjointSet::new(n);
    for u in (0..n).filter(|&u| inside[u]) {
        for &v in graph.neighbors(u) {
            if v > u && inside[v] {
                sets.union(u, v);
            }
        }
    }

    let mut starts = vec![false; n];
    for u in (0..n).filter(|&u| inside[u]) {
        let d = graph.position(u)[axis] - lo;
        if d > 0.0 && d < r {
            starts[sets.find(u)] = true;
        }
    }
    for u in (0..n).filter(|&u| inside[u]) {
        let d = hi - graph.position(u)[axis];
        if d > 0.0 && d < r && starts[sets.find(u)] {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Left-right crossing of the whole region.
pub fn crosses_region(graph: &SpatialGraph, alive: &[bool]) -> Result<bool, GraphError> {
    let region = graph.region();
    crosses(
        graph,
        alive,
        Rect::new(0.0, region.width, 0.0, region.height),
        Direction::LeftRight,
    )
}
