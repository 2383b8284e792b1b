//! Weighted graphs and multi-source Dijkstra, shared by the grafted, collapsed
//! and flat distance nets.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Default)]
pub struct Graph {
    adj: Vec<Vec<(usize, f64, u32)>>,
    edges: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of a single-query search: distance, the node sequence of a
/// shortest path (empty when the endpoints are joined without graph nodes)
/// and the tags of the edges between consecutive nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub distance: f64,
    pub nodes: Vec<usize>,
    pub tags: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    prev: Vec<usize>,
    prev_tag: Vec<u32>,
}

impl ShortestPaths {
    /// Nodes from a source to `node`, inclusive.
    pub fn path_to(&self, node: usize) -> Vec<usize> {
        if !self.dist[node].is_finite() {
            return Vec::new();
        }
        let mut out = vec![node];
        let mut cur = node;
        while self.prev[cur] != usize::MAX {
            cur = self.prev[cur];
            out.push(cur);
        }
        out.reverse();
        out
    }

    /// Tags of the edges along the path to `node`.
    pub fn tags_to(&self, node: usize) -> Vec<u32> {
        let mut out = Vec::new();
        let mut cur = node;
        while self.dist[cur].is_finite() && self.prev[cur] != usize::MAX {
            out.push(self.prev_tag[cur]);
            cur = self.prev[cur];
        }
        out.reverse();
        out
    }
}

impl Graph {
    pub fn new(nodes: usize) -> Self {
        Graph { adj: vec![Vec::new(); nodes], edges: 0 }
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize, w: f64) {
        self.add_tagged_edge(a, b, w, 0);
    }

    pub fn add_tagged_edge(&mut self, a: usize, b: usize, w: f64, tag: u32) {
        debug_assert!(w >= 0.0 && w.is_finite());
        self.adj[a].push((b, w, tag));
        self.adj[b].push((a, w, tag));
        self.edges += 1;
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn neighbours(&self, a: usize) -> &[(usize, f64, u32)] {
        &self.adj[a]
    }

    /// Dijkstra from several sources with initial offsets.
    pub fn dijkstra(&self, sources: &[(usize, f64)]) -> ShortestPaths {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        let mut prev_tag = vec![0u32; n];
        let mut heap = BinaryHeap::new();
        for &(s, d) in sources {
            if d < dist[s] {
                dist[s] = d;
                heap.push(Entry { dist: d, node: s });
            }
        }
        while let Some(Entry { dist: d, node }) = heap.pop() {
            if d > dist[node] {
                continue;
            }
            for &(m, w, tag) in &self.adj[node] {
                let nd = d + w;
                if nd < dist[m] {
                    dist[m] = nd;
                    prev[m] = node;
                    prev_tag[m] = tag;
                    heap.push(Entry { dist: nd, node: m });
                }
            }
        }
        ShortestPaths { dist, prev, prev_tag }
    }

    /// Shortest route between two external points attached to the graph by
    /// `(node, offset)` lists, optionally also joined directly.
    pub fn route(&self, from: &[(usize, f64)], to: &[(usize, f64)], direct: Option<f64>) -> Route {
        let sp = self.dijkstra(from);
        let mut best = Route { distance: direct.unwrap_or(f64::INFINITY), nodes: Vec::new(), tags: Vec::new() };
        let mut best_node = None;
        for &(t, d) in to {
            let total = sp.dist[t] + d;
            if total < best.distance {
                best.distance = total;
                best_node = Some(t);
            }
        }
        if let Some(t) = best_node {
            best.nodes = sp.path_to(t);
            best.tags = sp.tags_to(t);
        }
        best
    }
}
