//! File formats: graph JSON, experiment configs, result CSV/JSON.
//!
//! Graph files hold the region, the radius and the point coordinates; the
//! adjacency is always recomputed on load.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GraphError, IoError};
use crate::experiments::{ExperimentConfig, SweepResult};
use crate::geometry::{Boundary, PointSet, Region};
use crate::graph::SpatialGraph;

#[derive(Debug, Serialize, Deserialize)]
struct RegionFile {
    width: f64,
    height: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boundary: Option<Boundary>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    region: RegionFile,
    radius: f64,
    points: Vec<[f64; 2]>,
}

/// A graph read from disk plus anything the reader had to assume.
#[derive(Debug)]
pub struct LoadedGraph {
    pub graph: SpatialGraph,
    pub warnings: Vec<String>,
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), IoError> {
    fs::write(path, contents).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn schema(path: &str, field: impl Into<String>, reason: impl ToString) -> IoError {
    IoError::Schema {
        path: path.to_string(),
        field: field.into(),
        reason: reason.to_string(),
    }
}

/// Parses graph JSON. `origin` names the source in error messages.
pub fn parse_graph(text: &str, origin: &str) -> Result<LoadedGraph, IoError> {
    let file: GraphFile = serde_json::from_str(text).map_err(|source| IoError::Json {
        path: origin.to_string(),
        source,
    })?;
    let mut warnings = Vec::new();
    let boundary = file.region.boundary.unwrap_or_else(|| {
        warnings.push(format!("{origin}: no boundary given, assuming open-box"));
        Boundary::OpenBox
    });
    let region = Region::new(file.region.width, file.region.height, boundary)
        .map_err(|e| schema(origin, "region", e))?;
    let points = PointSet::from_coordinates(region, file.points).map_err(|e| match e {
        GraphError::PointOutsideRegion { index, .. } => schema(origin, format!("points[{index}]"), e),
        other => schema(origin, "points", other),
    })?;
    let graph = SpatialGraph::build(points, file.radius).map_err(|e| schema(origin, "radius", e))?;
    Ok(LoadedGraph { graph, warnings })
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<LoadedGraph, IoError> {
    let path = path.as_ref();
    parse_graph(&read(path)?, &path.display().to_string())
}

pub fn graph_to_json(graph: &SpatialGraph) -> String {
    let region = graph.region();
    let file = GraphFile {
        region: RegionFile {
            width: region.width,
            height: region.height,
            boundary: Some(region.boundary),
        },
        radius: graph.radius(),
        points: graph.points().coordinates.clone(),
    };
    serde_json::to_string_pretty(&file).expect("graph serializes")
}

pub fn save_graph(graph: &SpatialGraph, path: impl AsRef<Path>) -> Result<(), IoError> {
    write(path.as_ref(), &graph_to_json(graph))
}

/// Parses and validates an experiment config.
pub fn parse_config(text: &str, origin: &str) -> Result<ExperimentConfig, IoError> {
    let config: ExperimentConfig = serde_json::from_str(text).map_err(|source| IoError::Json {
        path: origin.to_string(),
        source,
    })?;
    config.validate().map_err(|e| schema(origin, "config", e))?;
    Ok(config)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, IoError> {
    let path = path.as_ref();
    parse_config(&read(path)?, &path.display().to_string())
}

#[derive(Serialize)]
struct CsvRow<'a> {
    index: usize,
    lambda: Option<f64>,
    nodes: Option<usize>,
    rule: Option<&'a str>,
    distribution: Option<&'a str>,
    q: Option<f64>,
    estimate: f64,
    stderr: f64,
    trials: usize,
}

/// One row per grid point; for critical-density searches one row per probe.
pub fn write_result_csv(result: &SweepResult, out: impl Write) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    for p in &result.points {
        w.serialize(CsvRow {
            index: p.index,
            lambda: p.lambda,
            nodes: p.nodes,
            rule: p.rule.as_deref(),
            distribution: p.distribution.as_deref(),
            q: None,
            estimate: p.estimate,
            stderr: p.stderr,
            trials: p.trials,
        })?;
    }
    if let Some(iv) = &result.interval {
        for (index, e) in iv.evaluations.iter().enumerate() {
            w.serialize(CsvRow {
                index,
                lambda: Some(e.value),
                nodes: None,
                rule: None,
                distribution: None,
                q: None,
                estimate: e.estimate,
                stderr: e.stderr,
                trials: e.trials,
            })?;
        }
    }
    w.flush().map_err(|source| IoError::Write {
        path: "<csv>".into(),
        source,
    })
}

pub fn result_to_json(result: &SweepResult) -> String {
    serde_json::to_string_pretty(result).expect("result serializes")
}
