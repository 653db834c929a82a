//! File formats: workspace JSON, graph dumps, path exports, and traces.

use crate::cfs::CoveragePath;
use crate::geom::{GeomError, Point2, Workspace};
use crate::isograph::Isograph;
use crate::refine::TraceRecord;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("workspace: {0}")]
    Workspace(#[from] GeomError),
}

/// On-disk workspace: a named exterior ring plus hole rings.
#[derive(Debug, Serialize, Deserialize)]
struct WorkspaceFile {
    name: String,
    exterior: Vec<[f64; 2]>,
    #[serde(default)]
    holes: Vec<Vec<[f64; 2]>>,
}

pub fn read_workspace(path: &Path) -> Result<Workspace, IoError> {
    let text = std::fs::read_to_string(path)?;
    let file: WorkspaceFile = serde_json::from_str(&text)?;
    let ring = |pts: &[[f64; 2]]| -> Vec<Point2> {
        pts.iter().map(|&[x, y]| Point2::new(x, y)).collect()
    };
    let holes = file.holes.iter().map(|h| ring(h)).collect();
    Ok(Workspace::new(&file.name, ring(&file.exterior), holes)?)
}

pub fn write_workspace(ws: &Workspace, path: &Path) -> Result<(), IoError> {
    let file = WorkspaceFile {
        name: ws.name.clone(),
        exterior: ws.exterior.iter().map(|p| [p.x, p.y]).collect(),
        holes: ws
            .holes
            .iter()
            .map(|h| h.iter().map(|p| [p.x, p.y]).collect())
            .collect(),
    };
    Ok(std::fs::write(path, serde_json::to_string_pretty(&file)? + "\n")?)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GraphVertexDump {
    pub id: usize,
    pub layer: u32,
    pub weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GraphEdgeDump {
    pub u: usize,
    pub v: usize,
    pub kind: crate::isograph::EdgeKind,
    pub weight: f64,
    pub n_tuples: usize,
}

/// Structural graph dump: variable weights and adjacency, no geometry.
#[derive(Debug, Serialize, Deserialize)]
pub struct GraphDump {
    pub vertices: Vec<GraphVertexDump>,
    pub edges: Vec<GraphEdgeDump>,
}

/// Serialize a graph's structure (not its geometry) as JSON.
pub fn graph_json(g: &Isograph) -> Result<String, IoError> {
    let dump = GraphDump {
        vertices: g
            .vertices
            .iter()
            .map(|v| GraphVertexDump { id: v.id, layer: v.layer(), weight: v.weight() })
            .collect(),
        edges: g
            .edges
            .iter()
            .map(|e| GraphEdgeDump {
                u: e.u,
                v: e.v,
                kind: e.kind,
                weight: e.weight,
                n_tuples: e.tuples.len(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&dump)?)
}

/// Parse a structural graph dump written by [`graph_json`].
pub fn read_graph(path: &Path) -> Result<GraphDump, IoError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Paths as JSON (full structure including sources).
pub fn paths_json(paths: &[CoveragePath]) -> Result<String, IoError> {
    Ok(serde_json::to_string_pretty(paths)?)
}

/// Parse a path file written by [`paths_json`].
pub fn read_paths(path: &Path) -> Result<Vec<CoveragePath>, IoError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Paths as CSV: one `robot,x,y` row per point.
pub fn paths_csv(paths: &[CoveragePath]) -> String {
    let mut out = String::from("robot,x,y\n");
    for p in paths {
        for pt in &p.points {
            out.push_str(&format!("{},{:.6},{:.6}\n", p.robot, pt.x, pt.y));
        }
    }
    out
}

/// Refinement trace as JSON lines.
pub fn write_trace(trace: &[TraceRecord], path: &Path) -> Result<(), IoError> {
    let mut f = std::fs::File::create(path)?;
    for rec in trace {
        writeln!(f, "{}", serde_json::to_string(rec)?)?;
    }
    Ok(())
}
