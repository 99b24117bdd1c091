//! The radius graph `G(n, r)` and neighborhood queries.
//!
//! Neighbor sets are stored twice: as sorted id lists for iteration and as
//! fixed-width bit rows for `O(n/64)` subset tests, which dominate the
//! dismantling workload.

use alloc::vec::Vec;

use crate::domains::PointCloud;
use crate::pointgrid::PointGrid;
use crate::ABS_TOL;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {v} out of range (n = {n})")]
    VertexOutOfRange { v: u32, n: usize },
    #[error("edge endpoints must differ")]
    SelfLoop,
}

/// An undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    words: usize,
    lists: Vec<Vec<u32>>,
    /// Row-major closed-neighborhood bitsets: row v has bit v and one bit per
    /// neighbor.
    closed: Vec<u64>,
}

impl Graph {
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Graph, GraphError> {
        let words = n.div_ceil(64).max(1);
        let mut lists = vec![Vec::new(); n];
        let mut closed = vec![0u64; n * words];
        for v in 0..n {
            closed[v * words + v / 64] |= 1u64 << (v % 64);
        }
        for &(a, b) in edges {
            if a as usize >= n {
                return Err(GraphError::VertexOutOfRange { v: a, n });
            }
            if b as usize >= n {
                return Err(GraphError::VertexOutOfRange { v: b, n });
            }
            if a == b {
                return Err(GraphError::SelfLoop);
            }
            let (ai, bi) = (a as usize, b as usize);
            if closed[ai * words + bi / 64] & (1u64 << (bi % 64)) != 0 {
                continue; // duplicate edge
            }
            closed[ai * words + bi / 64] |= 1u64 << (bi % 64);
            closed[bi * words + ai / 64] |= 1u64 << (ai % 64);
            lists[ai].push(b);
            lists[bi].push(a);
        }
        for l in &mut lists {
            l.sort_unstable();
        }
        Ok(Graph {
            n,
            words,
            lists,
            closed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.lists.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    pub fn degree(&self, v: u32) -> usize {
        self.lists[v as usize].len()
    }

    /// Open neighborhood, sorted ascending.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.lists[v as usize]
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        a != b && self.bit(a as usize, b as usize)
    }

    pub fn is_complete(&self) -> bool {
        self.n >= 1 && self.lists.iter().all(|l| l.len() == self.n - 1)
    }

    pub fn words(&self) -> usize {
        self.words
    }

    /// Closed-neighborhood bit row of `v`.
    pub fn closed_row(&self, v: u32) -> &[u64] {
        let v = v as usize;
        &self.closed[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    fn bit(&self, row: usize, col: usize) -> bool {
        self.closed[row * self.words + col / 64] & (1u64 << (col % 64)) != 0
    }

    /// Vertex ids set in a bit row, ascending.
    pub fn row_to_ids(&self, row: &[u64]) -> Vec<u32> {
        let mut out = Vec::new();
        for (w, &bits) in row.iter().enumerate() {
            let mut b = bits;
            while b != 0 {
                let t = b.trailing_zeros();
                out.push((w * 64) as u32 + t);
                b &= b - 1;
            }
        }
        out
    }

    /// Induced subgraph on `verts` (ascending, deduplicated by the caller);
    /// vertex `i` of the result is `verts[i]`.
    pub fn induced(&self, verts: &[u32]) -> Graph {
        let mut edges = Vec::new();
        for (i, &v) in verts.iter().enumerate() {
            for (j, &w) in verts.iter().enumerate().skip(i + 1) {
                if self.has_edge(v, w) {
                    edges.push((i as u32, j as u32));
                }
            }
        }
        Graph::from_edges(verts.len(), &edges).expect("induced edges are valid")
    }

    /// BFS distances from `src`; `u32::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, src: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n];
        let mut queue = alloc::collections::VecDeque::new();
        dist[src as usize] = 0;
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v as usize];
            for &w in self.neighbors(v) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dv + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Closed neighborhood `N[v] = N(v) ∪ {v}`, sorted ascending.
pub fn closed_neighborhood(g: &Graph, v: u32) -> Result<Vec<u32>, GraphError> {
    if v as usize >= g.n() {
        return Err(GraphError::VertexOutOfRange { v, n: g.n() });
    }
    let mut out = Vec::with_capacity(g.degree(v) + 1);
    out.extend_from_slice(g.neighbors(v));
    let pos = out.partition_point(|&w| w < v);
    out.insert(pos, v);
    Ok(out)
}

/// The radius graph of a cloud: vertices are the sample points, with an edge
/// whenever `‖X_i − X_j‖ ≤ r` (closed, crate tolerance).
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricGraph {
    pub graph: Graph,
    pub r: f64,
}

/// Builds the radius graph with a uniform grid of cell size `r`, comparing
/// only points in adjacent cells. Output is identical to the all-pairs
/// definition.
pub fn build_graph(cloud: &PointCloud, r: f64) -> GeometricGraph {
    assert!(r > 0.0, "radius must be > 0");
    let n = cloud.points.len();
    let grid = PointGrid::build(&cloud.points, r);
    let r2 = (r + ABS_TOL) * (r + ABS_TOL);
    let mut edges = Vec::new();
    for i in 0..n {
        let p = &cloud.points[i];
        grid.for_each_candidate(p, |j| {
            if (j as usize) > i && p.dist_sq(&cloud.points[j as usize]) <= r2 {
                edges.push((i as u32, j));
            }
        });
    }
    GeometricGraph {
        graph: Graph::from_edges(n, &edges).expect("grid edges are valid"),
        r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{sample, DensitySpec, Domain};
    use crate::geometry::Point;

    fn cloud_of(points: Vec<Point>) -> PointCloud {
        PointCloud {
            dim: points[0].dim(),
            points,
            seed: 0,
            domain_tag: alloc::string::String::from("test"),
        }
    }

    #[test]
    fn edge_at_exact_threshold() {
        let cloud = cloud_of(vec![
            Point::new(vec![0.0, 0.0]),
            Point::new(vec![0.25, 0.0]),
        ]);
        let gg = build_graph(&cloud, 0.25);
        assert!(gg.graph.has_edge(0, 1));
        let gg = build_graph(&cloud, 0.2499);
        assert!(!gg.graph.has_edge(0, 1));
    }

    #[test]
    fn complete_graph_when_r_exceeds_cloud_diameter() {
        let dom = Domain::unit_box(2);
        let dens = DensitySpec::uniform(&dom);
        let cloud = sample(&dom, &dens, 40, 3).unwrap();
        let gg = build_graph(&cloud, dom.diameter() + 0.01);
        assert!(gg.graph.is_complete());
        assert_eq!(gg.graph.edge_count(), 40 * 39 / 2);
    }

    #[test]
    fn closed_neighborhood_cases() {
        // path a-b-c plus an isolated vertex
        let g = Graph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(closed_neighborhood(&g, 1).unwrap(), vec![0, 1, 2]);
        assert_eq!(closed_neighborhood(&g, 3).unwrap(), vec![3]);
        assert!(matches!(
            closed_neighborhood(&g, 4),
            Err(GraphError::VertexOutOfRange { .. })
        ));
        // complete graph
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(closed_neighborhood(&k4, 2).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn closed_rows_match_lists() {
        let g = Graph::from_edges(70, &[(0, 69), (1, 64), (64, 69)]).unwrap();
        assert_eq!(g.row_to_ids(g.closed_row(69)), vec![0, 64, 69]);
        assert_eq!(g.row_to_ids(g.closed_row(1)), vec![1, 64]);
    }

    #[test]
    fn grid_matches_brute_force_on_random_clouds() {
        // all-pairs oracle over mixed dimensions and radii
        for (k, (d, n)) in [(2usize, 120usize), (3, 80), (2, 200), (3, 150)]
            .into_iter()
            .enumerate()
        {
            let dom = Domain::unit_box(d);
            let dens = DensitySpec::uniform(&dom);
            let cloud = sample(&dom, &dens, n, 1000 + k as u64).unwrap();
            for r in [0.05, 0.17, 0.4] {
                let gg = build_graph(&cloud, r);
                let mut expect = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        if cloud.points[i].dist(&cloud.points[j]) <= r + ABS_TOL {
                            expect.push((i as u32, j as u32));
                        }
                    }
                }
                let oracle = Graph::from_edges(n, &expect).unwrap();
                assert_eq!(gg.graph, oracle, "d={d} n={n} r={r}");
            }
        }
    }

    #[test]
    fn edge_set_monotone_in_radius() {
        let dom = Domain::unit_box(2);
        let dens = DensitySpec::uniform(&dom);
        let cloud = sample(&dom, &dens, 150, 8).unwrap();
        let small = build_graph(&cloud, 0.1);
        let large = build_graph(&cloud, 0.15);
        for v in 0..150u32 {
            for &w in small.graph.neighbors(v) {
                assert!(large.graph.has_edge(v, w));
            }
        }
    }

    #[test]
    fn induced_subgraph_keeps_edges() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let sub = g.induced(&[0, 1, 4]);
        assert_eq!(sub.n(), 3);
        assert!(sub.has_edge(0, 1)); // 0-1
        assert!(sub.has_edge(0, 2)); // 0-4
        assert!(!sub.has_edge(1, 2)); // 1-4 absent
    }
}
