//! Distributed submap mapping: submap assembly, synthetic loop-closure
//! proposal with distance gating and confidence thresholding, pose-graph
//! construction, centralized and per-robot block-coordinate optimization,
//! and global map merging from optimized poses.
//!
//! Rotation terms are expressed in chordal (matrix Frobenius) form, so the
//! objective is the plain least-squares sum over translation residuals
//! `p_to - p_from - R(theta_ref) * p_bar` and rotation residuals
//! `sqrt(2) * (unit(theta_to) - unit(theta_from + theta_bar))`, where
//! `theta_ref` is the destination pose for odometry edges and the source
//! pose for loop edges, matching the odometry measurement convention below.
//!
//! Odometry measurements store the translation in the frame of the pose the
//! step arrives at: `p_t = p_{t-1} + R(theta_t) * delta_p`. Loop closures
//! use the usual source-frame convention `x_bar = from^-1 * to`.

mod closures;
mod graph;
mod io;
mod linalg;
mod merge;
mod optimize;
mod submap;

pub use closures::{
    accepts_confidence, propose_and_score_closures, ClosureConfig, ClosureKind, LoopClosure,
};
pub use graph::{
    apply_odometry, build_pose_graph, odometry_delta, OdomEdge, PoseGraph, SlamError, VertexId,
};
pub use io::{export_g2o, import_g2o, load_g2o, save_g2o};
pub use merge::merge_global_map;
pub use optimize::{objective, optimize_centralized, optimize_distributed, OptimizeResult};
pub use submap::{build_submap, Submap};
