//! Weighted undirected actant graphs built from co-occurrence matrices.

mod cluster;
mod compare;
mod layout;

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use crate::actant::{ActantClass, ActantKey};
use crate::error::{Error, Result};
use crate::freq::VocabEntry;
use crate::matrix::{Block, CooccurrenceMatrix};

pub use cluster::{cluster, modularity};
pub use compare::{compare_modes, ComparisonReport};
pub use layout::{
    hop_distances, layout, layout_components, layout_with_trace, stress, LayoutParams, LayoutTrace,
    Point,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub key: ActantKey,
    /// Marker-bearing label.
    pub display: String,
    pub doc_frequency: u64,
}

impl From<&VocabEntry> for Node {
    fn from(e: &VocabEntry) -> Self {
        Node {
            key: e.key.clone(),
            display: e.display.clone(),
            doc_frequency: e.doc_frequency,
        }
    }
}

/// Undirected edge with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActantGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    partition: Option<Vec<u32>>,
    coords: Option<Vec<Point>>,
}

impl ActantGraph {
    /// Validates and normalizes an edge list: endpoints are reordered so
    /// `a < b` and edges are sorted. Self-loops, duplicate edges, zero
    /// weights, out-of-range endpoints and duplicate node keys are rejected.
    pub fn new(nodes: Vec<Node>, edges: impl IntoIterator<Item = (usize, usize, u64)>) -> Result<Self> {
        let mut keys = HashSet::with_capacity(nodes.len());
        for n in &nodes {
            if !keys.insert(&n.key) {
                return Err(Error::domain(format!("duplicate node {}", n.key)));
            }
        }
        let mut list = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::domain(format!("self-loop on node {a}")));
            }
            if a >= nodes.len() || b >= nodes.len() {
                return Err(Error::domain(format!("edge {a}-{b} has an endpoint outside the node list")));
            }
            if w == 0 {
                return Err(Error::domain(format!("edge {a}-{b} has zero weight")));
            }
            list.push(Edge {
                a: a.min(b),
                b: a.max(b),
                weight: w,
            });
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| (w[0].a, w[0].b) == (w[1].a, w[1].b)) {
            return Err(Error::domain(format!("duplicate edge {}-{}", w[0].a, w[0].b)));
        }
        Ok(ActantGraph {
            nodes,
            edges: list,
            partition: None,
            coords: None,
        })
    }

    pub fn empty() -> Self {
        ActantGraph {
            nodes: Vec::new(),
            edges: Vec::new(),
            partition: None,
            coords: None,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Edges sorted by `(a, b)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn partition(&self) -> Option<&[u32]> {
        self.partition.as_deref()
    }

    pub fn coords(&self) -> Option<&[Point]> {
        self.coords.as_deref()
    }

    /// Sets 1-based cluster ids, one per node.
    pub fn set_partition(&mut self, partition: Vec<u32>) -> Result<()> {
        if partition.len() != self.nodes.len() {
            return Err(Error::domain("partition length differs from node count"));
        }
        if partition.contains(&0) {
            return Err(Error::domain("cluster ids start at 1"));
        }
        self.partition = Some(partition);
        Ok(())
    }

    pub fn set_coords(&mut self, coords: Vec<Point>) -> Result<()> {
        if coords.len() != self.nodes.len() {
            return Err(Error::domain("coordinate count differs from node count"));
        }
        if coords.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(Error::domain("non-finite coordinate"));
        }
        self.coords = Some(coords);
        Ok(())
    }

    pub fn node_index(&self, key: &ActantKey) -> Option<usize> {
        self.nodes.iter().position(|n| &n.key == key)
    }

    /// Neighbour lists `(node, weight)`, ascending by node.
    pub fn adjacency(&self) -> Vec<Vec<(usize, u64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.a].push((e.b, e.weight));
            adj[e.b].push((e.a, e.weight));
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for e in &self.edges {
            d[e.a] += 1;
            d[e.b] += 1;
        }
        d
    }

    /// Subgraph induced by `keep`, in the original node order. Partition and
    /// coordinates are carried over.
    pub fn induced(&self, keep: &[usize]) -> ActantGraph {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let remap: HashMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|e| Some(Edge { a: *remap.get(&e.a)?, b: *remap.get(&e.b)?, weight: e.weight }))
            .collect();
        ActantGraph {
            nodes: keep.iter().map(|&i| self.nodes[i].clone()).collect(),
            edges,
            partition: self.partition.as_ref().map(|p| keep.iter().map(|&i| p[i]).collect()),
            coords: self.coords.as_ref().map(|c| keep.iter().map(|&i| c[i]).collect()),
        }
    }

    /// Connected components, each sorted ascending, ordered by descending
    /// size and then by their smallest `(class, canonical)` key. Isolated
    /// nodes are components of size one.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.nodes.len()];
        let mut comps = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.nodes.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &(w, _) in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        let min_key = |c: &Vec<usize>| c.iter().map(|&i| &self.nodes[i].key).min().cloned();
        comps.sort_by_cached_key(|c| (std::cmp::Reverse(c.len()), min_key(c)));
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Count of nodes per class.
    pub fn class_counts(&self) -> BTreeMap<ActantClass, usize> {
        let mut m = BTreeMap::new();
        for n in &self.nodes {
            *m.entry(n.key.class).or_default() += 1;
        }
        m
    }
}

/// Whole-matrix graph: one node per column of the selected classes, one edge
/// per off-diagonal cell of at least `min_edge_weight`. The diagonal only
/// feeds node document frequencies.
pub fn to_graph(c: &CooccurrenceMatrix, min_edge_weight: u64, classes: &[ActantClass]) -> Result<ActantGraph> {
    if min_edge_weight == 0 {
        return Err(Error::config("minimum edge weight must be positive"));
    }
    for cl in classes {
        if c.blocks().range(*cl).is_none() && !c.columns().is_empty() {
            return Err(Error::domain(format!("class {cl} is not present in the matrix")));
        }
    }
    let selected: Vec<usize> = (0..c.dim())
        .filter(|&i| classes.contains(&c.columns()[i].key.class))
        .collect();
    let mut local = vec![usize::MAX; c.dim()];
    for (n, &i) in selected.iter().enumerate() {
        local[i] = n;
    }
    let nodes = selected
        .iter()
        .map(|&i| {
            let mut n = Node::from(&c.columns()[i]);
            n.doc_frequency = c.diagonal(i);
            n
        })
        .collect();
    let edges = c
        .triplets()
        .filter(|&(i, j, v)| i < j && v >= min_edge_weight && local[i] != usize::MAX && local[j] != usize::MAX)
        .map(|(i, j, v)| (local[i], local[j], v));
    ActantGraph::new(nodes, edges)
}

/// 2-mode graph of a cross-class block: all row and column actants as nodes,
/// edges only between the two classes.
pub fn bipartite_graph(block: &Block, min_edge_weight: u64) -> Result<ActantGraph> {
    if block.row_class == block.col_class {
        return Err(Error::domain(format!(
            "2-mode graph needs two classes, got {} twice",
            block.row_class
        )));
    }
    if min_edge_weight == 0 {
        return Err(Error::config("minimum edge weight must be positive"));
    }
    let offset = block.rows.len();
    let nodes = block.rows.iter().chain(&block.cols).map(Node::from).collect();
    let edges = block
        .cells
        .iter()
        .filter(|&&(_, _, v)| v >= min_edge_weight)
        .map(|&(i, j, v)| (i, offset + j, v));
    ActantGraph::new(nodes, edges)
}

/// Induced subgraph on the largest connected component.
pub fn largest_component(g: &ActantGraph) -> ActantGraph {
    match g.components().first() {
        Some(c) => g.induced(c),
        None => ActantGraph::empty(),
    }
}
