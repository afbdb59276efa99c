use crate::pointcloud::DistanceMatrix;
use crate::rips::{build_filtration, Edge};

use super::Bar;

/// Union-find with path compression and union by rank.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
        true
    }
}

/// Dimension-zero bars of the full (unthresholded) Rips filtration, zero-length
/// bars included. Finite deaths are the minimum spanning tree edge weights.
pub fn compute_h0(dm: &DistanceMatrix) -> Vec<Bar> {
    let filtration = build_filtration(dm.clone(), f64::INFINITY).expect("infinite threshold is valid");
    h0_from_edges(dm.len(), filtration.edges(), true).0
}

/// Runs the elder rule over `edges` (already in filtration order). Returns the
/// bars and, per edge, whether it killed a component.
pub(crate) fn h0_from_edges(n: usize, edges: &[Edge], include_zero: bool) -> (Vec<Bar>, Vec<bool>) {
    let mut sets = DisjointSet::new(n);
    let mut negative = vec![false; edges.len()];
    let mut bars = Vec::with_capacity(n);
    let mut components = n;
    for (slot, edge) in negative.iter_mut().zip(edges) {
        if components == 1 {
            break;
        }
        if sets.union(edge.u, edge.v) {
            *slot = true;
            components -= 1;
            if include_zero || edge.diameter > 0.0 {
                bars.push(Bar::new(0, 0.0, edge.diameter));
            }
        }
    }
    bars.extend((0..components).map(|_| Bar::new(0, 0.0, f64::INFINITY)));
    (bars, negative)
}
