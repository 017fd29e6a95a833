//! Gauss-Newton minimization of the pose-graph least-squares objective,
//! centralized or as per-robot block-coordinate descent.
//!
//! Every edge contributes four residual rows: two translation rows
//! `p_to - p_from - R(theta_ref) * p_bar` and two chordal rotation rows
//! `sqrt(2) * (unit(theta_to) - unit(theta_from + theta_bar))`, whose squared
//! norm equals the Frobenius distance between the rotation matrices.
//! `theta_ref` is the destination pose for odometry edges (matching the
//! destination-frame odometry convention) and the source pose for loop
//! closures (matching the source-frame closure convention).

use std::collections::BTreeMap;

use crate::geometry::{normalize_angle, Pose2};
use crate::scalar::Real;
use crate::slam::graph::{PoseGraph, SlamError, VertexId};
use crate::slam::linalg::{cholesky_solve_in_place, SymMatrix};

/// Optimized estimates plus the objective value before iterating and after
/// every accepted step (centralized) or completed round (distributed). The
/// trace never increases.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult<T> {
    pub estimates: BTreeMap<VertexId, Pose2<T>>,
    pub trace: Vec<T>,
}

impl<T: Real> OptimizeResult<T> {
    pub fn final_objective(&self) -> T {
        *self.trace.last().expect("trace always holds the initial value")
    }
}

/// Which endpoint's rotation carries the measured translation.
#[derive(Debug, Clone, Copy, PartialEq)]
enum RefFrame {
    From,
    To,
}

#[derive(Debug, Clone, Copy)]
struct Constraint<T> {
    from: VertexId,
    to: VertexId,
    rel: Pose2<T>,
    frame: RefFrame,
}

fn constraints_of<T: Real>(graph: &PoseGraph<T>) -> Vec<Constraint<T>> {
    let mut out = Vec::with_capacity(graph.odom_edges.len() + graph.loop_edges.len());
    for e in &graph.odom_edges {
        out.push(Constraint {
            from: VertexId::new(e.robot, e.from_index),
            to: VertexId::new(e.robot, e.to_index),
            rel: e.rel,
            frame: RefFrame::To,
        });
    }
    for c in &graph.loop_edges {
        out.push(Constraint {
            from: c.from,
            to: c.to,
            rel: c.rel_transform,
            frame: RefFrame::From,
        });
    }
    out
}

/// Residual rows of one constraint at the current estimates.
fn residual<T: Real>(c: &Constraint<T>, pv: &Pose2<T>, pw: &Pose2<T>) -> [T; 4] {
    let theta_ref = match c.frame {
        RefFrame::From => pv.theta,
        RefFrame::To => pw.theta,
    };
    let (cr, sr) = (theta_ref.cos(), theta_ref.sin());
    let sq2 = T::from_f64_lossy(2.0).sqrt();
    let b = pv.theta + c.rel.theta;
    [
        pw.x - pv.x - (cr * c.rel.x - sr * c.rel.y),
        pw.y - pv.y - (sr * c.rel.x + cr * c.rel.y),
        sq2 * (pw.theta.cos() - b.cos()),
        sq2 * (pw.theta.sin() - b.sin()),
    ]
}

/// Sum of squared residuals of the full graph at the given estimates.
pub fn objective<T: Real>(graph: &PoseGraph<T>, estimates: &BTreeMap<VertexId, Pose2<T>>) -> T {
    constraints_of(graph)
        .iter()
        .map(|c| {
            let r = residual(c, &estimates[&c.from], &estimates[&c.to]);
            r.iter().fold(T::zero(), |a, &v| a + v * v)
        })
        .fold(T::zero(), |a, v| a + v)
}

fn subset_objective<T: Real>(
    constraints: &[Constraint<T>],
    estimates: &BTreeMap<VertexId, Pose2<T>>,
) -> T {
    constraints
        .iter()
        .map(|c| {
            let r = residual(c, &estimates[&c.from], &estimates[&c.to]);
            r.iter().fold(T::zero(), |a, &v| a + v * v)
        })
        .fold(T::zero(), |a, v| a + v)
}

struct UnionFind {
    parent: Vec<usize>,
    pinned: Vec<bool>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            pinned: vec![false; n],
        }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let pinned = self.pinned[ra] || self.pinned[rb];
            self.parent[ra] = rb;
            self.pinned[rb] = pinned;
        }
    }

    fn pin(&mut self, i: usize) {
        let r = self.find(i);
        self.pinned[r] = true;
    }
}

/// One Gauss-Newton solve over `free` vertices; all other vertices referenced
/// by `constraints` are held fixed. Returns the trace of the constraint-set
/// objective: the initial value, then one value per accepted step.
fn solve_subset<T: Real>(
    estimates: &mut BTreeMap<VertexId, Pose2<T>>,
    constraints: &[Constraint<T>],
    free: &[VertexId],
    max_iters: usize,
    tol: T,
) -> Result<Vec<T>, SlamError> {
    let index_of: BTreeMap<VertexId, usize> =
        free.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // Every free vertex must connect (possibly through other free vertices)
    // to some fixed pose, or the normal system has a gauge null space.
    let mut uf = UnionFind::new(free.len());
    for c in constraints {
        match (index_of.get(&c.from), index_of.get(&c.to)) {
            (Some(&a), Some(&b)) => uf.union(a, b),
            (Some(&a), None) => uf.pin(a),
            (None, Some(&b)) => uf.pin(b),
            (None, None) => {}
        }
    }
    for i in 0..free.len() {
        let r = uf.find(i);
        if !uf.pinned[r] {
            return Err(SlamError::RankDeficient {
                robot: free[i].robot,
                index: free[i].index,
            });
        }
    }

    let mut trace = vec![subset_objective(constraints, estimates)];
    if free.is_empty() {
        return Ok(trace);
    }
    let n = free.len() * 3;
    let sq2 = T::from_f64_lossy(2.0).sqrt();
    for _ in 0..max_iters {
        let mut h = SymMatrix::zeros(n);
        let mut gvec = vec![T::zero(); n];
        for c in constraints {
            let pv = estimates[&c.from];
            let pw = estimates[&c.to];
            let r = residual(c, &pv, &pw);
            let theta_ref = match c.frame {
                RefFrame::From => pv.theta,
                RefFrame::To => pw.theta,
            };
            let (cr, sr) = (theta_ref.cos(), theta_ref.sin());
            // d(R(theta) u)/dtheta with u = measured translation.
            let du_x = -sr * c.rel.x - cr * c.rel.y;
            let du_y = cr * c.rel.x - sr * c.rel.y;
            let b = pv.theta + c.rel.theta;
            // Local Jacobian, columns (xv, yv, tv, xw, yw, tw).
            let mut jac = [[T::zero(); 6]; 4];
            jac[0][0] = -T::one();
            jac[0][3] = T::one();
            jac[1][1] = -T::one();
            jac[1][4] = T::one();
            let tcol = match c.frame {
                RefFrame::From => 2,
                RefFrame::To => 5,
            };
            jac[0][tcol] = -du_x;
            jac[1][tcol] = -du_y;
            jac[2][2] = sq2 * b.sin();
            jac[3][2] = -sq2 * b.cos();
            jac[2][5] = -sq2 * pw.theta.sin();
            jac[3][5] = sq2 * pw.theta.cos();
            let col_base = |v: &VertexId| index_of.get(v).map(|&i| i * 3);
            let bases = [col_base(&c.from), col_base(&c.to)];
            for row in 0..4 {
                for (side_a, base_a) in bases.iter().enumerate() {
                    let Some(ga) = base_a else { continue };
                    for la in 0..3 {
                        let ja = jac[row][side_a * 3 + la];
                        if ja == T::zero() {
                            continue;
                        }
                        gvec[ga + la] += ja * r[row];
                        for (side_b, base_b) in bases.iter().enumerate() {
                            let Some(gb) = base_b else { continue };
                            for lb in 0..3 {
                                let jb = jac[row][side_b * 3 + lb];
                                if jb != T::zero() {
                                    h.add(ga + la, gb + lb, ja * jb);
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut delta: Vec<T> = gvec.iter().map(|&v| -v).collect();
        cholesky_solve_in_place(&mut h, &mut delta).map_err(|col| {
            let v = free[col / 3];
            SlamError::RankDeficient {
                robot: v.robot,
                index: v.index,
            }
        })?;
        // Backtracking: halve the step until the objective stops increasing.
        let base = *trace.last().unwrap();
        let mut step = T::one();
        let accepted = loop {
            let mut candidate = estimates.clone();
            for (i, v) in free.iter().enumerate() {
                let p = candidate.get_mut(v).unwrap();
                p.x += step * delta[i * 3];
                p.y += step * delta[i * 3 + 1];
                p.theta = normalize_angle(p.theta + step * delta[i * 3 + 2]);
            }
            let obj = subset_objective(constraints, &candidate);
            if obj <= base {
                break Some((candidate, obj));
            }
            step = step * T::from_f64_lossy(0.5);
            if step < T::from_f64_lossy(1e-12) {
                break None;
            }
        };
        let Some((candidate, obj)) = accepted else {
            // No descent along the Gauss-Newton direction: converged.
            trace.push(base);
            break;
        };
        *estimates = candidate;
        trace.push(obj);
        let max_change = delta
            .iter()
            .map(|&d| (step * d).abs())
            .fold(T::zero(), |m, v| if v > m { v } else { m });
        if max_change < tol {
            break;
        }
    }
    Ok(trace)
}

/// Minimizes the full objective with the first robot's first pose anchored.
/// Stops when the applied update's max component drops below `tol` or after
/// `max_iters` Gauss-Newton steps. A graph whose vertices do not all connect
/// to the anchor is rejected as rank-deficient, naming a stranded vertex.
pub fn optimize_centralized<T: Real>(
    graph: &PoseGraph<T>,
    max_iters: usize,
    tol: T,
) -> Result<OptimizeResult<T>, SlamError> {
    let mut estimates = graph.vertices.clone();
    let anchor = *estimates.keys().next().ok_or(SlamError::EmptyChain { robot: 0 })?;
    let free: Vec<VertexId> = estimates.keys().copied().filter(|v| *v != anchor).collect();
    let constraints = constraints_of(graph);
    let trace = solve_subset(&mut estimates, &constraints, &free, max_iters, tol)?;
    Ok(OptimizeResult { estimates, trace })
}

/// Block-coordinate descent: each round visits the robots in id order; each
/// robot re-solves its own poses against the latest published estimates of
/// the others (the separator poses touched by inter-robot closures), then
/// publishes. Robot 0 anchors its first pose; so does any robot with no
/// inter-robot edges, since nothing else fixes its gauge. Visiting blocks
/// sequentially against fresh separators keeps the full objective
/// non-increasing round over round. Stops early when a round improves the
/// objective by less than `tol`.
pub fn optimize_distributed<T: Real>(
    graph: &PoseGraph<T>,
    rounds: usize,
    inner_iters: usize,
    tol: T,
) -> Result<OptimizeResult<T>, SlamError> {
    let mut estimates = graph.vertices.clone();
    if estimates.is_empty() {
        return Err(SlamError::EmptyChain { robot: 0 });
    }
    let robots = graph.robots();
    let constraints = constraints_of(graph);
    let mut anchored: Vec<VertexId> = Vec::new();
    for &r in &robots {
        let has_inter = graph
            .loop_edges
            .iter()
            .any(|c| (c.from.robot == r) != (c.to.robot == r));
        if r == robots[0] || !has_inter {
            let first = *estimates
                .keys()
                .find(|v| v.robot == r)
                .expect("robot listed implies a vertex");
            anchored.push(first);
        }
    }
    let mut trace = vec![objective(graph, &estimates)];
    for _ in 0..rounds {
        for &r in &robots {
            let free: Vec<VertexId> = estimates
                .keys()
                .copied()
                .filter(|v| v.robot == r && !anchored.contains(v))
                .collect();
            let touching: Vec<Constraint<T>> = constraints
                .iter()
                .copied()
                .filter(|c| c.from.robot == r || c.to.robot == r)
                .collect();
            solve_subset(&mut estimates, &touching, &free, inner_iters, tol)?;
        }
        let obj = objective(graph, &estimates);
        let prev = *trace.last().unwrap();
        trace.push(obj);
        if prev - obj < tol {
            break;
        }
    }
    Ok(OptimizeResult { estimates, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::GaussianStream;
    use crate::slam::closures::{ClosureKind, LoopClosure};
    use crate::slam::graph::build_pose_graph;
    use approx::assert_abs_diff_eq;

    fn closure_between(
        from: VertexId,
        to: VertexId,
        truth: &BTreeMap<VertexId, Pose2<f64>>,
    ) -> LoopClosure<f64> {
        LoopClosure {
            from,
            to,
            rel_transform: truth[&from].relative_to(&truth[&to]),
            confidence: 1.0,
            kind: if from.robot == to.robot {
                ClosureKind::Intra
            } else {
                ClosureKind::Inter
            },
        }
    }

    /// Unit square traversed counterclockwise with a 90-degree turn at each
    /// corner.
    fn unit_square() -> Vec<Pose2<f64>> {
        let q = std::f64::consts::FRAC_PI_2;
        vec![
            Pose2::new(0.0, 0.0, 0.0),
            Pose2::new(1.0, 0.0, q),
            Pose2::new(1.0, 1.0, 2.0 * q),
            Pose2::new(0.0, 1.0, 3.0 * q),
        ]
    }

    #[test]
    fn exact_measurements_give_zero_residual_and_zero_update() {
        let truth = unit_square();
        let ids: Vec<VertexId> = (0..4).map(|i| VertexId::new(0, i)).collect();
        let tmap: BTreeMap<_, _> = ids.iter().copied().zip(truth.iter().copied()).collect();
        let closure = closure_between(ids[0], ids[3], &tmap);
        let graph = build_pose_graph(&[truth.clone()], &[closure]).unwrap();
        // Zero up to the trig round-off of deriving the measurements.
        assert!(objective(&graph, &graph.vertices) < 1e-30);
        let res = optimize_centralized(&graph, 10, 1e-12).unwrap();
        assert!(res.final_objective() < 1e-30);
        for (id, pose) in &res.estimates {
            let init = graph.vertices[id];
            assert_abs_diff_eq!(pose.x, init.x, epsilon = 1e-12);
            assert_abs_diff_eq!(pose.y, init.y, epsilon = 1e-12);
        }
    }

    #[test]
    fn perturbed_unit_square_recovers_ground_truth() {
        let truth = unit_square();
        let ids: Vec<VertexId> = (0..4).map(|i| VertexId::new(0, i)).collect();
        let tmap: BTreeMap<_, _> = ids.iter().copied().zip(truth.iter().copied()).collect();
        let closure = closure_between(ids[0], ids[3], &tmap);
        let mut graph = build_pose_graph(&[truth.clone()], &[closure]).unwrap();
        // Perturb every non-anchor initial estimate; measurements stay exact,
        // so the minimum sits exactly at the ground truth.
        let mut gauss = GaussianStream::new(2024);
        for i in 1..4 {
            let v = graph.vertices.get_mut(&ids[i]).unwrap();
            v.x += 0.1 * gauss.next_standard();
            v.y += 0.1 * gauss.next_standard();
            v.theta = normalize_angle(v.theta + 0.1 * gauss.next_standard());
        }
        let res = optimize_centralized(&graph, 50, 1e-12).unwrap();
        for (i, id) in ids.iter().enumerate() {
            let got = res.estimates[id];
            assert!(
                (got.x - truth[i].x).abs() < 1e-3 && (got.y - truth[i].y).abs() < 1e-3,
                "vertex {i}: {got:?} vs {:?}",
                truth[i]
            );
        }
        for w in res.trace.windows(2) {
            assert!(w[1] <= w[0], "trace must never increase: {:?}", res.trace);
        }
        assert!(res.final_objective() < 1e-12);
    }

    #[test]
    fn noisy_chain_without_loops_keeps_dead_reckoning() {
        // Odometry terms alone are exactly satisfiable by the dead-reckoned
        // initialization, so the optimizer must not move anything.
        let chain = vec![
            Pose2::new(0.0, 0.0, 0.0),
            Pose2::new(1.1, 0.2, 0.3),
            Pose2::new(1.9, 0.7, 0.4),
            Pose2::new(2.2, 1.5, 1.2),
        ];
        let graph = build_pose_graph(&[chain.clone()], &[]).unwrap();
        let res = optimize_centralized(&graph, 20, 1e-12).unwrap();
        assert!(res.final_objective() < 1e-24);
        for (i, id) in graph.vertices.keys().enumerate() {
            let got = res.estimates[id];
            assert_abs_diff_eq!(got.x, chain[i].x, epsilon = 1e-9);
            assert_abs_diff_eq!(got.y, chain[i].y, epsilon = 1e-9);
        }
    }

    #[test]
    fn disconnected_gauge_is_rejected_with_the_stranded_vertex() {
        let chains = vec![
            vec![Pose2::new(0.0, 0.0, 0.0), Pose2::new(1.0, 0.0, 0.0)],
            vec![Pose2::new(5.0, 5.0, 0.0), Pose2::new(6.0, 5.0, 0.0)],
        ];
        let graph = build_pose_graph(&chains, &[]).unwrap();
        let err = optimize_centralized(&graph, 10, 1e-12).unwrap_err();
        assert_eq!(err, SlamError::RankDeficient { robot: 1, index: 0 });
    }

    #[test]
    fn gauge_invariance_under_rigid_transform() {
        let truth = unit_square();
        let ids: Vec<VertexId> = (0..4).map(|i| VertexId::new(0, i)).collect();
        let tmap: BTreeMap<_, _> = ids.iter().copied().zip(truth.iter().copied()).collect();
        let closure = closure_between(ids[0], ids[3], &tmap);
        let mut graph = build_pose_graph(&[truth.clone()], &[closure]).unwrap();
        let mut gauss = GaussianStream::new(7);
        let noise: Vec<(f64, f64, f64)> = (0..3)
            .map(|_| (
                0.05 * gauss.next_standard(),
                0.05 * gauss.next_standard(),
                0.05 * gauss.next_standard(),
            ))
            .collect();
        for (i, (nx, ny, nt)) in noise.iter().enumerate() {
            let v = graph.vertices.get_mut(&ids[i + 1]).unwrap();
            v.x += nx;
            v.y += ny;
            v.theta = normalize_angle(v.theta + nt);
        }
        let res_a = optimize_centralized(&graph, 50, 1e-14).unwrap();

        // Same problem rigidly moved by g: inputs, initial estimates, and
        // measurements all transform consistently.
        let g = Pose2::new(3.0, -2.0, 0.8);
        let moved: Vec<Pose2<f64>> = truth.iter().map(|p| g.compose(p)).collect();
        let tmap_g: BTreeMap<_, _> = ids.iter().copied().zip(moved.iter().copied()).collect();
        let closure_g = closure_between(ids[0], ids[3], &tmap_g);
        let mut graph_g = build_pose_graph(&[moved.clone()], &[closure_g]).unwrap();
        for (i, (nx, ny, nt)) in noise.iter().enumerate() {
            // Perturb in the moved frame: compose the same local nudge.
            let v = graph_g.vertices.get_mut(&ids[i + 1]).unwrap();
            let local = g.inverse().compose(v);
            let nudged = Pose2::new(local.x + nx, local.y + ny, normalize_angle(local.theta + nt));
            *v = g.compose(&nudged);
        }
        let res_b = optimize_centralized(&graph_g, 50, 1e-14).unwrap();
        for id in &ids {
            let a = res_a.estimates[id];
            let b = res_b.estimates[id];
            let mapped = g.compose(&a);
            assert_abs_diff_eq!(b.x, mapped.x, epsilon = 1e-9);
            assert_abs_diff_eq!(b.y, mapped.y, epsilon = 1e-9);
        }
    }

    fn two_robot_square_world() -> (Vec<Vec<Pose2<f64>>>, BTreeMap<VertexId, Pose2<f64>>) {
        let truth0 = unit_square();
        let truth1: Vec<Pose2<f64>> = unit_square()
            .iter()
            .map(|p| Pose2::new(p.x + 0.5, p.y, p.theta))
            .collect();
        let mut tmap = BTreeMap::new();
        for (i, p) in truth0.iter().enumerate() {
            tmap.insert(VertexId::new(0, i), *p);
        }
        for (i, p) in truth1.iter().enumerate() {
            tmap.insert(VertexId::new(1, i), *p);
        }
        (vec![truth0, truth1], tmap)
    }

    #[test]
    fn single_robot_distributed_equals_centralized() {
        let truth = unit_square();
        let ids: Vec<VertexId> = (0..4).map(|i| VertexId::new(0, i)).collect();
        let tmap: BTreeMap<_, _> = ids.iter().copied().zip(truth.iter().copied()).collect();
        let closure = closure_between(ids[0], ids[3], &tmap);
        let mut graph = build_pose_graph(&[truth], &[closure]).unwrap();
        let mut gauss = GaussianStream::new(31);
        for i in 1..4 {
            let v = graph.vertices.get_mut(&ids[i]).unwrap();
            v.x += 0.08 * gauss.next_standard();
            v.y += 0.08 * gauss.next_standard();
        }
        let c = optimize_centralized(&graph, 60, 1e-13).unwrap();
        let d = optimize_distributed(&graph, 60, 60, 1e-13).unwrap();
        for id in graph.vertices.keys() {
            assert_abs_diff_eq!(c.estimates[id].x, d.estimates[id].x, epsilon = 1e-8);
            assert_abs_diff_eq!(c.estimates[id].y, d.estimates[id].y, epsilon = 1e-8);
            assert_abs_diff_eq!(c.estimates[id].theta, d.estimates[id].theta, epsilon = 1e-8);
        }
    }

    #[test]
    fn independent_blocks_solve_like_separate_centralized_runs() {
        // Two robots, no inter edges: the distributed solver anchors both
        // chains and solves them independently.
        let (chains, tmap) = two_robot_square_world();
        let intra0 = closure_between(VertexId::new(0, 0), VertexId::new(0, 3), &tmap);
        let intra1 = closure_between(VertexId::new(1, 0), VertexId::new(1, 3), &tmap);
        let mut graph = build_pose_graph(&chains, &[intra0, intra1]).unwrap();
        let mut gauss = GaussianStream::new(55);
        for (v, pose) in graph.vertices.iter_mut() {
            if v.index > 0 {
                pose.x += 0.05 * gauss.next_standard();
                pose.y += 0.05 * gauss.next_standard();
            }
        }
        let d = optimize_distributed(&graph, 40, 40, 1e-13).unwrap();
        // Oracle: solve each robot's subgraph centralized with identical
        // measurements and identical (perturbed) initial estimates.
        for (robot, closure) in [(0usize, intra0), (1usize, intra1)] {
            let mut sub = build_pose_graph(&[chains[robot].clone()], &[]).unwrap();
            sub.loop_edges.push(LoopClosure {
                from: VertexId::new(0, 0),
                to: VertexId::new(0, 3),
                ..closure
            });
            for i in 0..4 {
                let init = graph.vertices[&VertexId::new(robot, i)];
                sub.vertices.insert(VertexId::new(0, i), init);
            }
            let c = optimize_centralized(&sub, 40, 1e-13).unwrap();
            for i in 0..4 {
                let got = d.estimates[&VertexId::new(robot, i)];
                let want = c.estimates[&VertexId::new(0, i)];
                assert_abs_diff_eq!(got.x, want.x, epsilon = 1e-8);
                assert_abs_diff_eq!(got.y, want.y, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn distributed_tracks_centralized_on_connected_graphs() {
        // Conflicting (noisy) measurements give a strictly positive optimum,
        // so the 1% comparison is meaningful.
        let (chains, tmap) = two_robot_square_world();
        let mut closures = vec![
            closure_between(VertexId::new(0, 0), VertexId::new(0, 3), &tmap),
            closure_between(VertexId::new(0, 1), VertexId::new(1, 0), &tmap),
            closure_between(VertexId::new(0, 2), VertexId::new(1, 3), &tmap),
        ];
        let mut gauss = GaussianStream::new(513);
        for c in &mut closures {
            c.rel_transform.x += 0.05 * gauss.next_standard();
            c.rel_transform.y += 0.05 * gauss.next_standard();
            c.rel_transform.theta =
                normalize_angle(c.rel_transform.theta + 0.02 * gauss.next_standard());
        }
        let graph = build_pose_graph(&chains, &closures).unwrap();
        let c = optimize_centralized(&graph, 80, 1e-13).unwrap();
        let d = optimize_distributed(&graph, 200, 25, 1e-13).unwrap();
        for w in d.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "round trace non-increasing");
        }
        assert!(c.final_objective() > 1e-6, "noisy loops force a nonzero optimum");
        let gap = d.final_objective() - c.final_objective();
        assert!(
            gap <= 0.01 * c.final_objective(),
            "distributed {} vs centralized {}",
            d.final_objective(),
            c.final_objective()
        );
    }

    #[test]
    fn noisy_measurement_square_converges_to_a_nonzero_minimum() {
        // Perturb the measurements instead of the initialization: residual
        // cannot reach zero, but the trace still never increases.
        let truth = unit_square();
        let ids: Vec<VertexId> = (0..4).map(|i| VertexId::new(0, i)).collect();
        let tmap: BTreeMap<_, _> = ids.iter().copied().zip(truth.iter().copied()).collect();
        let mut closure = closure_between(ids[0], ids[3], &tmap);
        closure.rel_transform.x += 0.05;
        closure.rel_transform.y -= 0.04;
        let graph = build_pose_graph(&[truth], &[closure]).unwrap();
        let res = optimize_centralized(&graph, 50, 1e-12).unwrap();
        assert!(res.final_objective() > 1e-6, "conflicting loop keeps residual positive");
        for w in res.trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
        // The optimum beats both endpoints' naive layouts.
        assert!(res.final_objective() < objective(&graph, &graph.vertices));
    }

    #[test]
    fn single_vertex_graph_is_a_fixed_point() {
        let graph = build_pose_graph(&[vec![Pose2::<f64>::new(1.0, 2.0, 0.5)]], &[]).unwrap();
        let res = optimize_centralized(&graph, 5, 1e-12).unwrap();
        assert_eq!(res.estimates[&VertexId::new(0, 0)], Pose2::new(1.0, 2.0, 0.5));
        assert_eq!(res.trace, vec![0.0]);
    }

    #[test]
    fn f32_instantiation_works() {
        let chain = vec![
            Pose2::<f32>::new(0.0, 0.0, 0.0),
            Pose2::new(1.0, 0.0, 0.0),
            Pose2::new(2.0, 0.1, 0.05),
        ];
        let graph = build_pose_graph(&[chain], &[]).unwrap();
        let res = optimize_centralized(&graph, 10, 1e-6f32).unwrap();
        assert!(res.final_objective() < 1e-8);
    }
}
