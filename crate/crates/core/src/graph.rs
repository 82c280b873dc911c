//! Random graph ensembles and simple structural probes.
//!
//! Every message-passing routine in this crate runs on a [`Graph`]: an
//! immutable, undirected simple graph with dense node ids `0..n`. Besides
//! the adjacency lists the graph keeps a directed-edge index, so that the
//! two messages living on each undirected edge can be stored in flat vectors.

use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::GraphError;
use crate::rng::seeded;

/// Restarts allowed when pairing stubs for a regular graph.
const REGULAR_MAX_RESTARTS: usize = 1000;
/// Redraws of a stub pair before the current attempt is abandoned.
const REGULAR_PAIR_TRIES: usize = 1000;

/// Undirected simple graph with symmetric adjacency.
///
/// Directed edges ("arcs") are numbered so that the arc `u -> adjacency[u][k]`
/// has id `offsets[u] + k`; `reverse[a]` is the id of the opposite arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    arc_target: Vec<usize>,
    reverse: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an edge list, validating the simple-graph
    /// invariants. Edge orientation in the input is irrelevant.
    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n_nodes || b >= n_nodes {
                return Err(GraphError::NodeOutOfRange { node: a.max(b), n_nodes });
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
            normalized.push(e);
        }
        Ok(Self::build(n_nodes, normalized))
    }

    // Assumes the edges are already valid and normalized (i < j).
    fn build(n_nodes: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n_nodes];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let mut offsets = Vec::with_capacity(n_nodes + 1);
        let mut total = 0;
        for list in &adjacency {
            offsets.push(total);
            total += list.len();
        }
        offsets.push(total);
        let mut arc_target = Vec::with_capacity(total);
        for list in &adjacency {
            arc_target.extend_from_slice(list);
        }
        let mut reverse = vec![0; total];
        for u in 0..n_nodes {
            for (k, &v) in adjacency[u].iter().enumerate() {
                let back = adjacency[v].binary_search(&u).expect("symmetric adjacency");
                reverse[offsets[u] + k] = offsets[v] + back;
            }
        }
        Self { n_nodes, edges, adjacency, offsets, arc_target, reverse }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges in insertion order, each stored as `(i, j)` with `i < j`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n_nodes == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.n_nodes as f64
        }
    }

    /// Number of directed edges, twice the number of undirected ones.
    pub fn n_arcs(&self) -> usize {
        self.arc_target.len()
    }

    /// Ids of the arcs leaving `node`, aligned with [`Graph::neighbors`].
    pub fn out_arcs(&self, node: usize) -> std::ops::Range<usize> {
        self.offsets[node]..self.offsets[node + 1]
    }

    pub fn arc_source(&self, arc: usize) -> usize {
        // offsets is sorted; the source is the last node whose offset is <= arc.
        self.offsets.partition_point(|&o| o <= arc) - 1
    }

    pub fn arc_target(&self, arc: usize) -> usize {
        self.arc_target[arc]
    }

    /// The arc pointing the other way along the same edge.
    pub fn reverse_arc(&self, arc: usize) -> usize {
        self.reverse[arc]
    }

    /// Arc id of `from -> to`, if the edge exists.
    pub fn arc_between(&self, from: usize, to: usize) -> Option<usize> {
        self.adjacency
            .get(from)?
            .binary_search(&to)
            .ok()
            .map(|k| self.offsets[from] + k)
    }

    /// Edges sorted lexicographically; the canonical order used when writing.
    pub fn sorted_edges(&self) -> Vec<(usize, usize)> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }

    pub fn degree_histogram(&self) -> Vec<usize> {
        let max = self.adjacency.iter().map(Vec::len).max().unwrap_or(0);
        let mut hist = vec![0; max + 1];
        for list in &self.adjacency {
            hist[list.len()] += 1;
        }
        hist
    }

    /// Subgraph induced by the nodes with `keep[v]`, relabelled densely.
    /// Returns the subgraph and the map from new ids to old ids.
    pub fn induced_subgraph(&self, keep: &[bool]) -> (Graph, Vec<usize>) {
        let mut new_id = vec![usize::MAX; self.n_nodes];
        let mut old_id = Vec::new();
        for v in 0..self.n_nodes {
            if keep[v] {
                new_id[v] = old_id.len();
                old_id.push(v);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| keep[a] && keep[b])
            .map(|&(a, b)| {
                let (x, y) = (new_id[a], new_id[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        (Self::build(old_id.len(), edges), old_id)
    }

    pub fn path(n: usize) -> Self {
        Self::build(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least 3 nodes");
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((0, n - 1));
        Self::build(n, edges)
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Self::build(n, edges)
    }

    pub fn empty(n: usize) -> Self {
        Self::build(n, Vec::new())
    }
}

/// Random graph ensembles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegreeModel {
    /// Exactly `round(alpha * n)` edges chosen uniformly among all pairs.
    PoissonFixedM { alpha: f64 },
    /// Each pair independently present with probability `z / (n - 1)`.
    Gnp { z: f64 },
    /// Uniform-ish `z`-regular graph from the configuration model.
    Regular { z: usize },
}

impl DegreeModel {
    /// Expected mean degree of the ensemble.
    pub fn mean_degree(&self) -> f64 {
        match *self {
            DegreeModel::PoissonFixedM { alpha } => 2.0 * alpha,
            DegreeModel::Gnp { z } => z,
            DegreeModel::Regular { z } => z as f64,
        }
    }

    fn validate(&self, n: usize) -> Result<(), GraphError> {
        if n < 2 {
            return Err(GraphError::InvalidParameter(format!("need at least 2 nodes, got {n}")));
        }
        match *self {
            DegreeModel::PoissonFixedM { alpha } => {
                if !(alpha >= 0.0 && alpha.is_finite()) {
                    return Err(GraphError::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
                }
                let m = (alpha * n as f64).round();
                let pairs = (n * (n - 1) / 2) as f64;
                if m > pairs {
                    return Err(GraphError::InvalidParameter(format!(
                        "{m} edges requested but only {pairs} pairs exist"
                    )));
                }
            }
            DegreeModel::Gnp { z } => {
                if !(z >= 0.0 && z <= (n - 1) as f64) {
                    return Err(GraphError::InvalidParameter(format!("z must be in [0, n-1], got {z}")));
                }
            }
            DegreeModel::Regular { z } => {
                if z >= n {
                    return Err(GraphError::InvalidParameter(format!("degree {z} needs more than {n} nodes")));
                }
                if (n * z) % 2 == 1 {
                    return Err(GraphError::InvalidParameter(format!("n*z = {} is odd", n * z)));
                }
            }
        }
        Ok(())
    }
}

/// Draws a graph from `model` on `n` nodes. The same `(model, n, seed)`
/// always yields the same graph.
pub fn generate(model: DegreeModel, n: usize, seed: u64) -> Result<Graph, GraphError> {
    model.validate(n)?;
    let mut rng = seeded(seed);
    match model {
        DegreeModel::PoissonFixedM { alpha } => {
            let m = (alpha * n as f64).round() as usize;
            Ok(fixed_edge_count(n, m, &mut rng))
        }
        DegreeModel::Gnp { z } => Ok(gnp(n, z / (n - 1) as f64, &mut rng)),
        DegreeModel::Regular { z } => regular(n, z, &mut rng),
    }
}

fn fixed_edge_count(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Graph {
    let pairs = n * (n - 1) / 2;
    // Dense requests would spin in rejection; sample the complement instead.
    if m > pairs / 2 {
        let mut all: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        all.shuffle(rng);
        all.truncate(m);
        return Graph::build(n, all);
    }
    let mut chosen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b {
            continue;
        }
        let e = (a.min(b), a.max(b));
        if chosen.insert(e) {
            edges.push(e);
        }
    }
    Graph::build(n, edges)
}

// Geometric skipping over the n(n-1)/2 candidate pairs (Batagelj & Brandes).
fn gnp(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    if p <= 0.0 {
        return Graph::build(n, edges);
    }
    if p >= 1.0 {
        return Graph::complete(n);
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w): (usize, i64) = (1, -1);
    while v < n {
        let r: f64 = 1.0 - rng.random::<f64>();
        w += 1 + (r.ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    Graph::build(n, edges)
}

/// Pairs random open stubs one edge at a time, redrawing a pair that would
/// make a loop or a repeated edge; restarts only when the last few stubs
/// admit no legal pair. Whole-graph rejection would need about
/// `exp((z^2 - 1) / 4)` attempts, which is hopeless beyond z = 5.
fn regular(n: usize, z: usize, rng: &mut ChaCha8Rng) -> Result<Graph, GraphError> {
    let n_edges = n * z / 2;
    let mut seen = HashSet::with_capacity(n_edges);
    'restart: for _ in 0..REGULAR_MAX_RESTARTS {
        let mut open: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, z)).collect();
        seen.clear();
        let mut edges = Vec::with_capacity(n_edges);
        while !open.is_empty() {
            let mut tries = 0;
            let (i, j) = loop {
                let i = rng.random_range(0..open.len());
                let j = rng.random_range(0..open.len());
                let (a, b) = (open[i], open[j]);
                if a != b && !seen.contains(&(a.min(b), a.max(b))) {
                    break (i, j);
                }
                tries += 1;
                if tries == REGULAR_PAIR_TRIES {
                    continue 'restart;
                }
            };
            let (a, b) = (open[i], open[j]);
            let e = (a.min(b), a.max(b));
            seen.insert(e);
            edges.push(e);
            // Remove the higher index first so the lower one stays valid.
            open.swap_remove(i.max(j));
            open.swap_remove(i.min(j));
        }
        return Ok(Graph::build(n, edges));
    }
    Err(GraphError::GenerationFailed { attempts: REGULAR_MAX_RESTARTS })
}

/// True iff the ball of radius `depth` around `node` contains no cycle.
///
/// The ball is the subgraph induced by all nodes within `depth` hops; it is
/// a tree exactly when its edge count is one less than its node count.
pub fn local_tree_check(g: &Graph, node: usize, depth: usize) -> bool {
    let mut dist = std::collections::HashMap::new();
    dist.insert(node, 0usize);
    let mut queue = VecDeque::from([node]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        if d == depth {
            continue;
        }
        for &v in g.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(slot) = dist.entry(v) {
                slot.insert(d + 1);
                queue.push_back(v);
            }
        }
    }
    let twice_edges: usize = dist
        .keys()
        .map(|&u| g.neighbors(u).iter().filter(|v| dist.contains_key(v)).count())
        .sum();
    twice_edges / 2 + 1 == dist.len()
}

/// Connected components as a label per node, labels dense from 0.
pub fn component_labels(g: &Graph) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; g.n_nodes()];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..g.n_nodes() {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &v in g.neighbors(u) {
                if label[v] == usize::MAX {
                    label[v] = count;
                    stack.push(v);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Size of the largest connected component over the number of nodes.
pub fn giant_component_fraction(g: &Graph) -> f64 {
    if g.n_nodes() == 0 {
        return 0.0;
    }
    let (label, count) = component_labels(g);
    let mut sizes = vec![0usize; count];
    for l in label {
        sizes[l] += 1;
    }
    *sizes.iter().max().unwrap() as f64 / g.n_nodes() as f64
}
