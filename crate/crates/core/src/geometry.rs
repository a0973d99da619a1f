//! Planar regions and point processes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::seed::{derive_seed, tag};

/// How distances are measured near the region edges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Plain Euclidean distance; nodes near the border have fewer neighbors.
    #[default]
    OpenBox,
    /// Periodic wrap in both axes, which removes border effects.
    Torus,
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::OpenBox => "open-box",
            Boundary::Torus => "torus",
        })
    }
}

impl std::str::FromStr for Boundary {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "open-box" | "open" | "box" => Ok(Boundary::OpenBox),
            "torus" => Ok(Boundary::Torus),
            other => Err(GraphError::InvalidBoundary(other.to_string())),
        }
    }
}

/// The rectangle `[0, width] x [0, height]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub width: f64,
    pub height: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl Region {
    pub fn new(width: f64, height: f64, boundary: Boundary) -> Result<Self, GraphError> {
        let region = Self {
            width,
            height,
            boundary,
        };
        region.validate()?;
        Ok(region)
    }

    pub fn square(side: f64, boundary: Boundary) -> Result<Self, GraphError> {
        Self::new(side, side, boundary)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(GraphError::InvalidRegion(format!(
                "width must be positive and finite, got {}",
                self.width
            )));
        }
        if !(self.height.is_finite() && self.height > 0.0) {
            return Err(GraphError::InvalidRegion(format!(
                "height must be positive and finite, got {}",
                self.height
            )));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Whether `p` lies in the closed region.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= 0.0 && p[0] <= self.width && p[1] >= 0.0 && p[1] <= self.height
    }

    /// Squared distance between two points under this region's metric.
    #[inline]
    pub fn distance_sq(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let mut dx = (a[0] - b[0]).abs();
        let mut dy = (a[1] - b[1]).abs();
        if self.boundary == Boundary::Torus {
            dx = dx.min(self.width - dx);
            dy = dy.min(self.height - dy);
        }
        dx * dx + dy * dy
    }
}

/// A finite sample of points inside a [`Region`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub region: Region,
    pub coordinates: Vec<[f64; 2]>,
    /// Points per unit area.
    pub intensity: f64,
}

impl PointSet {
    /// Wraps explicit coordinates, checking that each lies in the region.
    pub fn from_coordinates(region: Region, coordinates: Vec<[f64; 2]>) -> Result<Self, GraphError> {
        region.validate()?;
        for (index, &p) in coordinates.iter().enumerate() {
            if !(p[0].is_finite() && p[1].is_finite()) || !region.contains(p) {
                return Err(GraphError::PointOutsideRegion {
                    index,
                    x: p[0],
                    y: p[1],
                });
            }
        }
        let intensity = coordinates.len() as f64 / region.area();
        Ok(Self {
            region,
            coordinates,
            intensity,
        })
    }

    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.is_empty()
    }
}

fn sample_uniform(rng: &mut ChaCha8Rng, n: usize, region: &Region) -> Vec<[f64; 2]> {
    (0..n)
        .map(|_| {
            let x = rng.random::<f64>() * region.width;
            let y = rng.random::<f64>() * region.height;
            [x, y]
        })
        .collect()
}

/// Places exactly `n` points i.i.d. uniformly in `region`.
pub fn generate_uniform(n: usize, region: Region, seed: u64) -> Result<PointSet, GraphError> {
    region.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[tag::POINTS]));
    let coordinates = sample_uniform(&mut rng, n, &region);
    Ok(PointSet {
        region,
        intensity: n as f64 / region.area(),
        coordinates,
    })
}

/// Samples a homogeneous Poisson point process of density `lambda`.
///
/// The count is Poisson(`lambda * area`); given the count, points are
/// uniform. The stored intensity is the realized `count / area`.
pub fn generate_poisson(lambda: f64, region: Region, seed: u64) -> Result<PointSet, GraphError> {
    region.validate()?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(GraphError::InvalidDensity(lambda));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[tag::POINTS]));
    let mean = lambda * region.area();
    let n = if mean > 0.0 {
        let dist = Poisson::new(mean).map_err(|_| GraphError::InvalidDensity(lambda))?;
        dist.sample(&mut rng) as usize
    } else {
        0
    };
    let coordinates = sample_uniform(&mut rng, n, &region);
    Ok(PointSet {
        region,
        intensity: n as f64 / region.area(),
        coordinates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_uniform() {
        let r = Region::square(10.0, Boundary::OpenBox).unwrap();
        let p = generate_uniform(0, r, 1).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.intensity, 0.0);
    }

    #[test]
    fn fixed_n_intensity() {
        let r = Region::square(25.0, Boundary::OpenBox).unwrap();
        let p = generate_uniform(1600, r, 3).unwrap();
        assert_eq!(p.len(), 1600);
        assert_eq!(p.intensity, 2.56);
        assert!(p.coordinates.iter().all(|&c| r.contains(c)));
    }

    #[test]
    fn same_seed_same_points() {
        let r = Region::new(7.0, 3.0, Boundary::Torus).unwrap();
        assert_eq!(generate_uniform(50, r, 11).unwrap(), generate_uniform(50, r, 11).unwrap());
        assert_ne!(generate_uniform(50, r, 11).unwrap(), generate_uniform(50, r, 12).unwrap());
        assert_eq!(generate_poisson(2.0, r, 5).unwrap(), generate_poisson(2.0, r, 5).unwrap());
    }

    #[test]
    fn zero_density_is_empty() {
        let r = Region::square(100.0, Boundary::OpenBox).unwrap();
        assert!(generate_poisson(0.0, r, 1).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Region::new(0.0, 1.0, Boundary::OpenBox).is_err());
        assert!(Region::new(1.0, f64::NAN, Boundary::OpenBox).is_err());
        let r = Region::square(1.0, Boundary::OpenBox).unwrap();
        assert!(generate_poisson(-1.0, r, 0).is_err());
        let err = PointSet::from_coordinates(r, vec![[0.5, 0.5], [1.5, 0.2]]).unwrap_err();
        assert!(err.to_string().contains("index 1"), "{err}");
    }

    #[test]
    fn torus_distance_wraps() {
        let r = Region::square(10.0, Boundary::Torus).unwrap();
        assert!((r.distance_sq([0.2, 5.0], [9.8, 5.0]) - 0.16).abs() < 1e-12);
        let o = Region::square(10.0, Boundary::OpenBox).unwrap();
        assert!((o.distance_sq([0.2, 5.0], [9.8, 5.0]) - 9.6 * 9.6).abs() < 1e-9);
    }
}
