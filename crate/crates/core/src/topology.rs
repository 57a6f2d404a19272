//! Undirected communication graphs.
//!
//! Vertices are numbered `1..=N` in the public API. Edge `k` is stored as the
//! pair `(head, tail)` in the order it was listed; that order fixes the sign
//! convention of the incidence matrix (`+1` at the head, `-1` at the tail).

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite undirected graph with ordered edge list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct CommGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for CommGraph {
    type Error = Error;
    fn try_from(raw: RawGraph) -> Result<Self> {
        CommGraph::new(raw.vertex_count, raw.edges)
    }
}

impl From<CommGraph> for RawGraph {
    fn from(g: CommGraph) -> Self {
        RawGraph {
            vertex_count: g.vertex_count,
            edges: g.edges,
        }
    }
}

impl CommGraph {
    /// Validates and builds a graph. Rejects self-loops, out-of-range
    /// endpoints and duplicate undirected edges.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidSize("graph needs at least one vertex".into()));
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(h, t) in &edges {
            for v in [h, t] {
                if v == 0 || v > vertex_count {
                    return Err(Error::VertexOutOfRange {
                        vertex: v,
                        count: vertex_count,
                    });
                }
            }
            if h == t {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {h}")));
            }
            if adjacency[h - 1].contains(&t) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({h},{t})")));
            }
            adjacency[h - 1].push(t);
            adjacency[t - 1].push(h);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            vertex_count,
            edges,
            adjacency,
        })
    }

    /// The cycle `C_n`: edges `(1,2), …, (n-1,n), (n,1)`. For `n = 2` the
    /// closing edge would duplicate `(1,2)`, so only one edge is kept.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("cycle needs n >= 2, got {n}")));
        }
        let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
        if n > 2 {
            edges.push((n, 1));
        }
        Self::new(n, edges)
    }

    /// Graph without edges.
    pub fn edgeless(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `D ∈ {−1,0,1}^{N×|E|}` with `+1` at each edge head and `−1` at its tail.
    pub fn incidence(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.vertex_count, self.edges.len());
        for (k, &(h, t)) in self.edges.iter().enumerate() {
            d[(h - 1, k)] = 1.0;
            d[(t - 1, k)] = -1.0;
        }
        d
    }

    /// Graph Laplacian, built as degree minus adjacency.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let n = self.vertex_count;
        let mut l = DMatrix::zeros(n, n);
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            l[(i, i)] = nbrs.len() as f64;
            for &j in nbrs {
                l[(i, j - 1)] = -1.0;
            }
        }
        l
    }

    /// Breadth-first reachability from vertex 1.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &u in &self.adjacency[v] {
                if !seen[u - 1] {
                    seen[u - 1] = true;
                    reached += 1;
                    queue.push_back(u - 1);
                }
            }
        }
        reached == self.vertex_count
    }

    /// Sorted neighbors of vertex `i` (1-indexed).
    pub fn neighbors(&self, i: usize) -> Result<&[usize]> {
        self.check_vertex(i)?;
        Ok(&self.adjacency[i - 1])
    }

    pub fn degree(&self, i: usize) -> Result<usize> {
        Ok(self.neighbors(i)?.len())
    }

    pub fn are_adjacent(&self, i: usize, j: usize) -> bool {
        i >= 1 && i <= self.vertex_count && self.adjacency[i - 1].binary_search(&j).is_ok()
    }

    /// Index of the edge joining `i` and `j` and whether `i` is its head.
    pub fn edge_index(&self, i: usize, j: usize) -> Option<(usize, bool)> {
        self.edges.iter().enumerate().find_map(|(k, &(h, t))| {
            if h == i && t == j {
                Some((k, true))
            } else if h == j && t == i {
                Some((k, false))
            } else {
                None
            }
        })
    }

    /// A fundamental cycle basis: for each non-tree edge of a BFS spanning
    /// forest, the cycle it closes, given as `(edge index, sign)` pairs where
    /// the sign orients the edge along the cycle traversal.
    pub fn cycle_basis(&self) -> Vec<Vec<(usize, f64)>> {
        let n = self.vertex_count;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        let mut tree_edge = vec![false; self.edges.len()];
        for root in 0..n {
            if depth[root] != usize::MAX {
                continue;
            }
            depth[root] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &u1 in &self.adjacency[v] {
                    let u = u1 - 1;
                    if depth[u] == usize::MAX {
                        depth[u] = depth[v] + 1;
                        let (k, _) = self.edge_index(v + 1, u1).expect("adjacent");
                        parent[u] = Some((v, k));
                        tree_edge[k] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        // Path from a vertex up to the root as (edge, sign) with sign +1 when
        // the edge is traversed head -> tail.
        let walk_up = |mut v: usize| {
            let mut steps = Vec::new();
            while let Some((p, k)) = parent[v] {
                let (h, _) = self.edges[k];
                let sign = if h - 1 == v { 1.0 } else { -1.0 };
                steps.push((v, k, sign));
                v = p;
            }
            steps
        };
        let mut cycles = Vec::new();
        for (k, &(h, t)) in self.edges.iter().enumerate() {
            if tree_edge[k] {
                continue;
            }
            // Cycle: h -> t along edge k, then t up to the common ancestor,
            // then down to h.
            let up_t = walk_up(t - 1);
            let up_h = walk_up(h - 1);
            let anc_t: Vec<usize> = std::iter::once(t - 1)
                .chain(up_t.iter().map(|&(v, kk, _)| {
                    let (a, b) = self.edges[kk];
                    if a - 1 == v {
                        b - 1
                    } else {
                        a - 1
                    }
                }))
                .collect();
            let anc_h: Vec<usize> = std::iter::once(h - 1)
                .chain(up_h.iter().map(|&(v, kk, _)| {
                    let (a, b) = self.edges[kk];
                    if a - 1 == v {
                        b - 1
                    } else {
                        a - 1
                    }
                }))
                .collect();
            let lca = *anc_t
                .iter()
                .find(|v| anc_h.contains(v))
                .expect("same component");
            let mut cycle = vec![(k, 1.0)];
            for &(v, kk, sign) in &up_t {
                if v == lca {
                    break;
                }
                cycle.push((kk, sign));
            }
            let mut down: Vec<(usize, f64)> = Vec::new();
            for &(v, kk, sign) in &up_h {
                if v == lca {
                    break;
                }
                down.push((kk, -sign));
            }
            down.reverse();
            cycle.extend(down);
            cycles.push(cycle);
        }
        cycles
    }

    fn check_vertex(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.vertex_count {
            Err(Error::VertexOutOfRange {
                vertex: i,
                count: self.vertex_count,
            })
        } else {
            Ok(())
        }
    }
}
