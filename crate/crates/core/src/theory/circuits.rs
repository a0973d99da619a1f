//! Circuits of the square lattice that surround a point at a cell center.
//!
//! The lattice has vertices at `Z^2` and the reference point sits at
//! `(1/2, 1/2)`, the center of the unit cell `[0, 1]^2`. A circuit is a closed
//! path without repeated vertices. It surrounds the point when a ray from the
//! point crosses it an odd number of times.

use std::collections::HashSet;

use crate::error::TheoryError;

/// Enumeration is exhaustive, so lengths are capped at `2 * 6`.
pub const MAX_ENUMERATION_HALF_LENGTH: usize = 6;

/// A circuit as its cyclic vertex sequence (first vertex not repeated).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    pub vertices: Vec<(i32, i32)>,
}

impl Circuit {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn edges(&self) -> impl Iterator<Item = ((i32, i32), (i32, i32))> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Sorted undirected edge list; equal for the same circuit regardless of
    /// starting vertex or orientation.
    pub fn canonical_edges(&self) -> Vec<((i32, i32), (i32, i32))> {
        let mut edges: Vec<_> = self
            .edges()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        edges.sort_unstable();
        edges
    }

    /// Ray-crossing parity against `(1/2, 1/2)` with the ray along `+x`.
    ///
    /// Only vertical edges between `(c, 0)` and `(c, 1)` with `c >= 1` cross
    /// that ray.
    pub fn surrounds_cell_center(&self) -> bool {
        let crossings = self
            .edges()
            .filter(|&((x1, y1), (x2, y2))| x1 == x2 && x1 >= 1 && y1.min(y2) == 0 && y1.max(y2) == 1)
            .count();
        crossings % 2 == 1
    }
}

const STEPS: [(i32, i32); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

struct Search {
    length: usize,
    root: (i32, i32),
    path: Vec<(i32, i32)>,
    on_path: HashSet<(i32, i32)>,
    found: Vec<Circuit>,
}

impl Search {
    fn manhattan(a: (i32, i32), b: (i32, i32)) -> usize {
        ((a.0 - b.0).abs() + (a.1 - b.1).abs()) as usize
    }

    fn extend(&mut self) {
        let here = *self.path.last().expect("non-empty path");
        if self.path.len() == self.length {
            if Self::manhattan(here, self.root) == 1 {
                self.found.push(Circuit {
                    vertices: self.path.clone(),
                });
            }
            return;
        }
        for (dx, dy) in STEPS {
            let next = (here.0 + dx, here.1 + dy);
            // The root is the smallest vertex in (y, x) order.
            if (next.1, next.0) <= (self.root.1, self.root.0) || self.on_path.contains(&next) {
                continue;
            }
            // Steps left after moving to `next`, including the closing one.
            let remaining = self.length - self.path.len();
            if Self::manhattan(next, self.root) > remaining {
                continue;
            }
            self.path.push(next);
            self.on_path.insert(next);
            self.extend();
            self.on_path.remove(&next);
            self.path.pop();
        }
    }
}

/// All distinct circuits of exactly `length` edges that surround the cell
/// center at `(1/2, 1/2)`.
///
/// Each circuit is rooted at its lowest-then-leftmost vertex; both
/// orientations are found from that root and collapsed by edge set.
pub fn circuits_surrounding_origin(length: usize) -> Vec<Circuit> {
    if length < 4 {
        return Vec::new();
    }
    let half = (length / 2) as i32;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    // A surrounding circuit has a vertex with y <= 0 and spans at most
    // length/2 in x + y combined, so its root lies in this window.
    for ry in (1 - half)..=0 {
        for rx in (1 - half)..=half {
            let root = (rx, ry);
            let mut search = Search {
                length,
                root,
                path: vec![root],
                on_path: HashSet::from([root]),
                found: Vec::new(),
            };
            search.extend();
            for c in search.found {
                if c.surrounds_cell_center() && seen.insert(c.canonical_edges()) {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Exact number of circuits of length `2m` surrounding the cell center.
pub fn enumerate_circuits(m: usize) -> Result<u64, TheoryError> {
    if !(2..=MAX_ENUMERATION_HALF_LENGTH).contains(&m) {
        return Err(TheoryError::Parameter {
            name: "m",
            value: m as f64,
            reason: "enumeration supports 2 <= m <= 6",
        });
    }
    Ok(circuits_surrounding_origin(2 * m).len() as u64)
}

/// Upper bound `(4/27)(m - 1) 3^{2m} = 4 (m - 1) 3^{2m - 3}` on the number of
/// surrounding circuits of length `2m`, in exact integer arithmetic.
pub fn circuit_bound(m: usize) -> Result<u128, TheoryError> {
    if m < 2 {
        return Err(TheoryError::Parameter {
            name: "m",
            value: m as f64,
            reason: "must be at least 2",
        });
    }
    let overflow = || TheoryError::Parameter {
        name: "m",
        value: m as f64,
        reason: "bound overflows 128 bits",
    };
    let exp = u32::try_from(2 * m - 3).map_err(|_| overflow())?;
    3u128
        .checked_pow(exp)
        .and_then(|p| p.checked_mul(4 * (m as u128 - 1)))
        .ok_or_else(overflow)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_values() {
        assert_eq!(circuit_bound(2).unwrap(), 12);
        assert_eq!(circuit_bound(3).unwrap(), 216);
        assert!(circuit_bound(1).is_err());
        assert!(circuit_bound(1000).is_err());
    }

    #[test]
    fn unit_square_is_the_only_four_circuit() {
        let cs = circuits_surrounding_origin(4);
        assert_eq!(cs.len(), 1);
        let mut v = cs[0].vertices.clone();
        v.sort_unstable();
        assert_eq!(v, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(enumerate_circuits(2).unwrap(), 1);
    }

    #[test]
    fn six_circuits_are_the_four_dominoes() {
        // 2x1 rectangles covering the unit cell: two horizontal, two vertical.
        assert_eq!(enumerate_circuits(3).unwrap(), 4);
    }

    #[test]
    fn odd_lengths_have_no_circuits() {
        for len in [5, 7, 9] {
            assert!(circuits_surrounding_origin(len).is_empty());
        }
    }

    #[test]
    fn out_of_range() {
        assert!(enumerate_circuits(1).is_err());
        assert!(enumerate_circuits(7).is_err());
    }

    #[test]
    fn parity_test() {
        let unit = Circuit {
            vertices: vec![(0, 0), (1, 0), (1, 1), (0, 1)],
        };
        assert!(unit.surrounds_cell_center());
        let beside = Circuit {
            vertices: vec![(1, 0), (2, 0), (2, 1), (1, 1)],
        };
        assert!(!beside.surrounds_cell_center());
    }
}
