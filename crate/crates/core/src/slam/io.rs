//! Plain-text pose-graph interchange in the `VERTEX_SE2`/`EDGE_SE2` format
//! understood by common graph-optimization toolkits.
//!
//! Vertex ids pack `(robot, index)` as `robot * 100000 + index`. `EDGE_SE2`
//! measurements follow the toolkit convention (destination expressed in the
//! source frame), so odometry edges are converted from their
//! destination-frame storage on export and back on import: a consecutive
//! same-robot id pair is read as an odometry edge, anything else as a loop
//! closure with confidence 1. The anchored first vertex exports as `FIX`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::geometry::{normalize_angle, Pose2};
use crate::scalar::Real;
use crate::slam::closures::{ClosureKind, LoopClosure};
use crate::slam::graph::{OdomEdge, PoseGraph, SlamError, VertexId};

const ROBOT_STRIDE: usize = 100_000;

fn pack(v: VertexId) -> usize {
    v.robot * ROBOT_STRIDE + v.index
}

fn unpack(id: usize) -> VertexId {
    VertexId::new(id / ROBOT_STRIDE, id % ROBOT_STRIDE)
}

/// Serializes a graph. Measurements are written with shortest-round-trip
/// float formatting and an identity information matrix.
pub fn export_g2o<T: Real>(graph: &PoseGraph<T>) -> String {
    let mut out = String::new();
    for (v, pose) in &graph.vertices {
        out.push_str(&format!(
            "VERTEX_SE2 {} {} {} {}\n",
            pack(*v),
            pose.x,
            pose.y,
            pose.theta
        ));
    }
    if let Some(first) = graph.vertices.keys().next() {
        out.push_str(&format!("FIX {}\n", pack(*first)));
    }
    let info = "1 0 0 1 0 1";
    for e in &graph.odom_edges {
        // Destination-frame translation to source-frame: rotate by the
        // heading change.
        let (c, s) = (e.rel.theta.cos(), e.rel.theta.sin());
        let dx = c * e.rel.x - s * e.rel.y;
        let dy = s * e.rel.x + c * e.rel.y;
        out.push_str(&format!(
            "EDGE_SE2 {} {} {} {} {} {}\n",
            pack(VertexId::new(e.robot, e.from_index)),
            pack(VertexId::new(e.robot, e.to_index)),
            dx,
            dy,
            e.rel.theta,
            info
        ));
    }
    for c in &graph.loop_edges {
        out.push_str(&format!(
            "EDGE_SE2 {} {} {} {} {} {}\n",
            pack(c.from),
            pack(c.to),
            c.rel_transform.x,
            c.rel_transform.y,
            c.rel_transform.theta,
            info
        ));
    }
    out
}

pub fn save_g2o<T: Real>(graph: &PoseGraph<T>, path: &Path) -> Result<(), SlamError> {
    std::fs::write(path, export_g2o(graph))?;
    Ok(())
}

/// Parses the format written by [`export_g2o`]. `FIX` lines are accepted and
/// ignored (the optimizer always anchors the first vertex).
pub fn import_g2o<T: Real>(text: &str) -> Result<PoseGraph<T>, SlamError> {
    let mut vertices: BTreeMap<VertexId, Pose2<T>> = BTreeMap::new();
    let mut edges: Vec<(usize, VertexId, VertexId, Pose2<T>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let parse_err = |msg: &str| SlamError::Parse {
            line,
            msg: msg.to_string(),
        };
        let fields: Vec<&str> = raw.split_whitespace().collect();
        match fields.first().copied() {
            None => {}
            Some("VERTEX_SE2") => {
                if fields.len() != 5 {
                    return Err(parse_err("VERTEX_SE2 expects id x y theta"));
                }
                let id: usize = fields[1].parse().map_err(|_| parse_err("bad vertex id"))?;
                let mut nums = [0.0f64; 3];
                for (slot, f) in nums.iter_mut().zip(&fields[2..5]) {
                    *slot = f.parse().map_err(|_| parse_err("bad float"))?;
                }
                vertices.insert(
                    unpack(id),
                    Pose2::new(
                        T::from_f64_lossy(nums[0]),
                        T::from_f64_lossy(nums[1]),
                        T::from_f64_lossy(nums[2]),
                    ),
                );
            }
            Some("EDGE_SE2") => {
                if fields.len() != 12 {
                    return Err(parse_err("EDGE_SE2 expects from to dx dy dtheta and 6 information entries"));
                }
                let from: usize = fields[1].parse().map_err(|_| parse_err("bad vertex id"))?;
                let to: usize = fields[2].parse().map_err(|_| parse_err("bad vertex id"))?;
                let mut nums = [0.0f64; 3];
                for (slot, f) in nums.iter_mut().zip(&fields[3..6]) {
                    *slot = f.parse().map_err(|_| parse_err("bad float"))?;
                }
                for f in &fields[6..12] {
                    let _: f64 = f.parse().map_err(|_| parse_err("bad float"))?;
                }
                edges.push((
                    line,
                    unpack(from),
                    unpack(to),
                    Pose2::new(
                        T::from_f64_lossy(nums[0]),
                        T::from_f64_lossy(nums[1]),
                        T::from_f64_lossy(nums[2]),
                    ),
                ));
            }
            Some("FIX") => {
                if fields.len() != 2 {
                    return Err(parse_err("FIX expects one id"));
                }
                let _: usize = fields[1].parse().map_err(|_| parse_err("bad vertex id"))?;
            }
            Some(tag) => {
                return Err(SlamError::Parse {
                    line,
                    msg: format!("unknown record '{tag}'"),
                });
            }
        }
    }
    let mut odom_edges = Vec::new();
    let mut loop_edges = Vec::new();
    for (_, from, to, rel) in edges {
        for v in [from, to] {
            if !vertices.contains_key(&v) {
                return Err(SlamError::MissingVertex {
                    robot: v.robot,
                    index: v.index,
                });
            }
        }
        if from.robot == to.robot && to.index == from.index + 1 {
            // Source-frame translation back to destination-frame storage.
            let (c, s) = (rel.theta.cos(), rel.theta.sin());
            odom_edges.push(OdomEdge {
                robot: from.robot,
                from_index: from.index,
                to_index: to.index,
                rel: Pose2::new(
                    c * rel.x + s * rel.y,
                    -s * rel.x + c * rel.y,
                    normalize_angle(rel.theta),
                ),
            });
        } else {
            loop_edges.push(LoopClosure {
                from,
                to,
                rel_transform: rel,
                confidence: T::one(),
                kind: if from.robot == to.robot {
                    ClosureKind::Intra
                } else {
                    ClosureKind::Inter
                },
            });
        }
    }
    Ok(PoseGraph {
        vertices,
        odom_edges,
        loop_edges,
    })
}

pub fn load_g2o<T: Real>(path: &Path) -> Result<PoseGraph<T>, SlamError> {
    let text = std::fs::read_to_string(path)?;
    import_g2o(&text)
}
