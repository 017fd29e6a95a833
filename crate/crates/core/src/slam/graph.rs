//! Pose-graph structure: per-robot odometry chains plus loop-closure edges.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::{normalize_angle, Pose2};
use crate::scalar::Real;
use crate::slam::closures::{ClosureKind, LoopClosure};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SlamError {
    #[error("submap window is empty")]
    EmptyWindow,
    #[error("robot {robot} has an empty odometry chain")]
    EmptyChain { robot: usize },
    #[error("edge references missing vertex ({robot}, {index})")]
    MissingVertex { robot: usize, index: usize },
    #[error("vertex ({robot}, {index}) is not constrained by any anchored component")]
    RankDeficient { robot: usize, index: usize },
    #[error("g2o line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SlamError {
    fn from(e: std::io::Error) -> Self {
        SlamError::Io(e.to_string())
    }
}

/// Identifies one pose estimate: `index` counts a robot's graph vertices in
/// time order (for submap-level graphs it is the submap index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId {
    pub robot: usize,
    pub index: usize,
}

impl VertexId {
    pub fn new(robot: usize, index: usize) -> Self {
        Self { robot, index }
    }
}

impl std::fmt::Display for VertexId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.robot, self.index)
    }
}

/// Relative motion between a robot's consecutive vertices. `rel` holds the
/// heading change and the translation expressed in the destination frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdomEdge<T> {
    pub robot: usize,
    pub from_index: usize,
    pub to_index: usize,
    pub rel: Pose2<T>,
}

/// Vertices with initial estimates, one odometry chain per robot, and the
/// accepted loop closures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseGraph<T> {
    pub vertices: BTreeMap<VertexId, Pose2<T>>,
    pub odom_edges: Vec<OdomEdge<T>>,
    pub loop_edges: Vec<LoopClosure<T>>,
}

/// Measurement for the step `prev -> next`: heading change plus the world
/// displacement rotated into the destination frame.
pub fn odometry_delta<T: Real>(prev: &Pose2<T>, next: &Pose2<T>) -> Pose2<T> {
    let (c, s) = next.rot();
    let dx = next.x - prev.x;
    let dy = next.y - prev.y;
    Pose2::new(
        c * dx + s * dy,
        -s * dx + c * dy,
        normalize_angle(next.theta - prev.theta),
    )
}

/// Inverse of [`odometry_delta`]: advances `prev` by a measurement, rotating
/// the stored translation out of the destination frame it was expressed in.
pub fn apply_odometry<T: Real>(prev: &Pose2<T>, delta: &Pose2<T>) -> Pose2<T> {
    let theta = normalize_angle(prev.theta + delta.theta);
    let (c, s) = (theta.cos(), theta.sin());
    Pose2::new(
        prev.x + c * delta.x - s * delta.y,
        prev.y + s * delta.x + c * delta.y,
        theta,
    )
}

/// Builds a graph from per-robot pose chains (robot id = chain position) and
/// accepted closures. Vertices start at the chain poses; consecutive chain
/// poses become odometry edges.
pub fn build_pose_graph<T: Real>(
    chains: &[Vec<Pose2<T>>],
    closures: &[LoopClosure<T>],
) -> Result<PoseGraph<T>, SlamError> {
    let mut vertices = BTreeMap::new();
    let mut odom_edges = Vec::new();
    for (robot, chain) in chains.iter().enumerate() {
        if chain.is_empty() {
            return Err(SlamError::EmptyChain { robot });
        }
        for (index, pose) in chain.iter().enumerate() {
            vertices.insert(VertexId::new(robot, index), *pose);
        }
        for index in 1..chain.len() {
            odom_edges.push(OdomEdge {
                robot,
                from_index: index - 1,
                to_index: index,
                rel: odometry_delta(&chain[index - 1], &chain[index]),
            });
        }
    }
    for closure in closures {
        for v in [closure.from, closure.to] {
            if !vertices.contains_key(&v) {
                return Err(SlamError::MissingVertex {
                    robot: v.robot,
                    index: v.index,
                });
            }
        }
        debug_assert_eq!(
            closure.kind,
            if closure.from.robot == closure.to.robot {
                ClosureKind::Intra
            } else {
                ClosureKind::Inter
            }
        );
    }
    Ok(PoseGraph {
        vertices,
        odom_edges,
        loop_edges: closures.to_vec(),
    })
}

impl<T: Real> PoseGraph<T> {
    /// Robot ids present, ascending.
    pub fn robots(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.vertices.keys().map(|v| v.robot).collect();
        ids.dedup();
        ids
    }

    /// True when some loop edge joins two different robots.
    pub fn has_inter_edges(&self) -> bool {
        self.loop_edges.iter().any(|c| c.kind == ClosureKind::Inter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn odometry_delta_round_trips_through_apply() {
        let a = Pose2::new(1.2, -0.7, 0.9);
        let b = Pose2::new(1.9, -0.1, -2.8);
        let d = odometry_delta(&a, &b);
        let back = apply_odometry(&a, &d);
        assert_abs_diff_eq!(back.x, b.x, epsilon = 1e-12);
        assert_abs_diff_eq!(back.y, b.y, epsilon = 1e-12);
        assert_abs_diff_eq!(back.theta, b.theta, epsilon = 1e-12);
    }

    #[test]
    fn delta_translation_lives_in_the_destination_frame() {
        // Step 1 m along world +x while ending at heading pi/2: in the
        // destination frame that displacement points along -y.
        let a = Pose2::new(0.0, 0.0, 0.0);
        let b = Pose2::new(1.0, 0.0, std::f64::consts::FRAC_PI_2);
        let d = odometry_delta(&a, &b);
        assert_abs_diff_eq!(d.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.y, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.theta, std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn chain_becomes_vertices_and_odom_edges() {
        let chain = vec![
            Pose2::new(0.0, 0.0, 0.0),
            Pose2::new(1.0, 0.0, 0.0),
            Pose2::new(2.0, 0.0, 0.1),
        ];
        let g = build_pose_graph(&[chain], &[]).unwrap();
        assert_eq!(g.vertices.len(), 3);
        assert_eq!(g.odom_edges.len(), 2);
        assert_eq!(g.loop_edges.len(), 0);
        assert_eq!(g.robots(), vec![0]);
        assert!(!g.has_inter_edges());
    }

    #[test]
    fn closure_endpoints_must_exist() {
        let chain = vec![Pose2::new(0.0, 0.0, 0.0), Pose2::new(1.0, 0.0, 0.0)];
        let c = LoopClosure {
            from: VertexId::new(0, 0),
            to: VertexId::new(0, 5),
            rel_transform: Pose2::identity(),
            confidence: 1.0,
            kind: ClosureKind::Intra,
        };
        assert_eq!(
            build_pose_graph(&[chain], &[c]).unwrap_err(),
            SlamError::MissingVertex { robot: 0, index: 5 }
        );
        assert_eq!(
            build_pose_graph::<f64>(&[vec![]], &[]).unwrap_err(),
            SlamError::EmptyChain { robot: 0 }
        );
    }

    #[test]
    fn intra_and_inter_closures_are_kept() {
        let chains = vec![
            vec![Pose2::new(0.0, 0.0, 0.0), Pose2::new(1.0, 0.0, 0.0), Pose2::new(2.0, 0.0, 0.0)],
            vec![Pose2::new(0.0, 1.0, 0.0), Pose2::new(1.0, 1.0, 0.0)],
        ];
        let intra = LoopClosure {
            from: VertexId::new(0, 0),
            to: VertexId::new(0, 2),
            rel_transform: Pose2::new(2.0, 0.0, 0.0),
            confidence: 0.9,
            kind: ClosureKind::Intra,
        };
        let inter = LoopClosure {
            from: VertexId::new(0, 1),
            to: VertexId::new(1, 1),
            rel_transform: Pose2::new(0.0, 1.0, 0.0),
            confidence: 0.8,
            kind: ClosureKind::Inter,
        };
        let g = build_pose_graph(&chains, &[intra, inter]).unwrap();
        assert_eq!(g.vertices.len(), 5);
        assert_eq!(g.odom_edges.len(), 3);
        assert_eq!(g.loop_edges.len(), 2);
        assert!(g.has_inter_edges());
        assert_eq!(g.robots(), vec![0, 1]);
    }
}
