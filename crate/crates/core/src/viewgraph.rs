//! Global camera poses from pairwise relative poses.
//!
//! Rotations: spanning-tree chaining from camera 0 followed by block
//! coordinate descent on the chordal cost `Σ ‖R_ij − R_j R_iᵀ‖²_F`, where
//! each camera's update is the exact minimizer given its neighbours.
//!
//! Positions: with rotations fixed every edge direction is known in the world
//! frame and `c_j − c_i = s_ij w_ij` is linear in the centers and the per-edge
//! scales. Gauge: `c_0 = 0` and the first edge has unit scale.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::{DMatrix, DVector, Matrix3};

use crate::error::{Error, Result};
use crate::geometry::{project_to_rotation, Point3, Rotation, Vec3};
use crate::relpose::RelativePose;

pub const ROTATION_TOL: f64 = 1e-12;
pub const ROTATION_MAX_ITER: usize = 100;

/// Stacked position systems with a larger condition number are rejected.
pub const MAX_POSITION_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    /// Pose of camera `j` relative to camera `i`.
    pub pose: RelativePose,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViewingGraph {
    nodes: usize,
    edges: Vec<Edge>,
}

impl ViewingGraph {
    pub fn new(nodes: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !(e.i < e.j && e.j < nodes) {
                return Err(Error::InvalidInput(format!(
                    "edge ({}, {}) needs i < j < {nodes}",
                    e.i, e.j
                )));
            }
            if !seen.insert((e.i, e.j)) {
                return Err(Error::InvalidInput(format!(
                    "edge ({}, {}) appears twice",
                    e.i, e.j
                )));
            }
        }
        Ok(Self { nodes, edges })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_tree().iter().all(|p| p.is_some())
    }

    /// Parent edge index of every node in a BFS tree rooted at 0
    /// (`Some(usize::MAX)` marks the root).
    fn bfs_tree(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.nodes];
        if self.nodes == 0 {
            return parent;
        }
        parent[0] = Some(usize::MAX);
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            for (idx, e) in self.edges.iter().enumerate() {
                let other = if e.i == k {
                    e.j
                } else if e.j == k {
                    e.i
                } else {
                    continue;
                };
                if parent[other].is_none() {
                    parent[other] = Some(idx);
                    queue.push_back(other);
                }
            }
        }
        parent
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalPoses {
    /// World-to-camera rotations; `rotations[0]` is the identity.
    pub rotations: Vec<Rotation>,
    /// Camera centers; `centers[0]` is the origin and the first edge has unit
    /// length.
    pub centers: Vec<Point3>,
}

/// `Σ ‖R_ij − R_j R_iᵀ‖²_F` over all edges.
pub fn rotation_residual(graph: &ViewingGraph, rotations: &[Rotation]) -> f64 {
    graph
        .edges
        .iter()
        .map(|e| {
            let pred = rotations[e.j].matrix() * rotations[e.i].matrix().transpose();
            (e.pose.rotation.matrix() - pred).norm_squared()
        })
        .sum()
}

fn chain_rotations(graph: &ViewingGraph) -> Result<Vec<Rotation>> {
    let parent = graph.bfs_tree();
    if parent.iter().any(|p| p.is_none()) {
        return Err(Error::DisconnectedGraph);
    }
    // BFS order guarantees parents are assigned first.
    let mut order: Vec<usize> = (0..graph.nodes).collect();
    let mut depth = vec![0usize; graph.nodes];
    for k in 1..graph.nodes {
        let mut d = 0;
        let mut cur = k;
        while cur != 0 {
            let e = &graph.edges[parent[cur].expect("connected")];
            cur = if e.j == cur { e.i } else { e.j };
            d += 1;
        }
        depth[k] = d;
    }
    order.sort_by_key(|&k| depth[k]);
    let mut rot = vec![Rotation::identity(); graph.nodes];
    for &k in order.iter().skip(1) {
        let e = &graph.edges[parent[k].expect("connected")];
        rot[k] = if e.j == k {
            e.pose.rotation * rot[e.i]
        } else {
            e.pose.rotation.inverse() * rot[e.j]
        };
    }
    Ok(rot)
}

/// Global rotations with camera 0 fixed to the identity.
pub fn solve_rotations(graph: &ViewingGraph, tol: f64, max_iter: usize) -> Result<Vec<Rotation>> {
    let init = chain_rotations(graph)?;
    let init_residual = rotation_residual(graph, &init);
    let mut rot = init.clone();
    for _ in 0..max_iter {
        let mut change = 0.0f64;
        for k in 1..graph.nodes {
            let mut m = Matrix3::zeros();
            for e in &graph.edges {
                if e.j == k {
                    m += e.pose.rotation.matrix() * rot[e.i].matrix();
                } else if e.i == k {
                    m += e.pose.rotation.matrix().transpose() * rot[e.j].matrix();
                }
            }
            let next = project_to_rotation(&m);
            change = change.max((next.matrix() - rot[k].matrix()).norm());
            rot[k] = next;
        }
        if change < tol {
            break;
        }
    }
    if rotation_residual(graph, &rot) > init_residual {
        return Ok(init);
    }
    Ok(rot)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionSolution {
    pub centers: Vec<Point3>,
    /// Per-edge baseline lengths, in edge order; the first is 1.
    pub scales: Vec<f64>,
}

/// Camera centers from edge directions and solved rotations.
pub fn solve_positions(graph: &ViewingGraph, rotations: &[Rotation]) -> Result<PositionSolution> {
    if rotations.len() != graph.nodes {
        return Err(Error::InvalidInput(format!(
            "{} rotations for {} cameras",
            rotations.len(),
            graph.nodes
        )));
    }
    if !graph.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let n = graph.nodes;
    if n == 1 {
        return Ok(PositionSolution {
            centers: vec![Point3::origin()],
            scales: vec![],
        });
    }
    let n_edges = graph.edges.len();
    let cols = 3 * (n - 1) + n_edges - 1;
    let rows = 3 * n_edges;
    if rows < cols {
        return Err(Error::CollinearDegeneracy {
            condition: f64::INFINITY,
        });
    }
    let center_col = |k: usize| 3 * (k - 1);
    let scale_col = |e: usize| 3 * (n - 1) + e - 1;
    let mut a = DMatrix::zeros(rows, cols);
    let mut b = DVector::zeros(rows);
    for (idx, e) in graph.edges.iter().enumerate() {
        let w: Vec3 = rotations[e.i].inverse() * e.pose.direction;
        for d in 0..3 {
            let r = 3 * idx + d;
            if e.j != 0 {
                a[(r, center_col(e.j) + d)] += 1.0;
            }
            if e.i != 0 {
                a[(r, center_col(e.i) + d)] -= 1.0;
            }
            if idx == 0 {
                b[r] = w[d];
            } else {
                a[(r, scale_col(idx))] = -w[d];
            }
        }
    }
    let svd = a.svd(true, true);
    let max = svd.singular_values.max();
    let min = svd.singular_values.min();
    let condition = max / min;
    if !(min > 0.0) || condition > MAX_POSITION_CONDITION {
        return Err(Error::CollinearDegeneracy { condition });
    }
    let x = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::DegenerateGeometry(e.to_string()))?;
    let mut centers = vec![Point3::origin(); n];
    for (k, c) in centers.iter_mut().enumerate().skip(1) {
        let o = center_col(k);
        *c = Point3::new(x[o], x[o + 1], x[o + 2]);
    }
    let mut scales = vec![1.0];
    scales.extend((1..n_edges).map(|e| x[scale_col(e)]));
    Ok(PositionSolution { centers, scales })
}

/// Rotations then positions, with the default refinement settings.
pub fn solve_viewing_graph(graph: &ViewingGraph) -> Result<GlobalPoses> {
    let rotations = solve_rotations(graph, ROTATION_TOL, ROTATION_MAX_ITER)?;
    let centers = solve_positions(graph, &rotations)?.centers;
    Ok(GlobalPoses { rotations, centers })
}
