//! Key-sharing graphs for classical DC-style protocols.
//!
//! Nodes are players; an edge `{i, j}` means `i` and `j` share one key bit. A
//! set of colluders that disconnects the remaining honest players can break
//! sender anonymity, which bounds how many key bits a protocol needs.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Largest graph for which colluder subsets are enumerated exhaustively.
pub const SUBSET_ENUMERATION_LIMIT: usize = 12;
/// Largest node count for which all graphs are enumerated.
pub const GRAPH_ENUMERATION_LIMIT: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeySharingGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl KeySharingGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                g.edges.insert((a, b));
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n >= 3 {
            g.edges.insert((0, n - 1));
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::empty(n);
        for a in 1..n {
            g.edges.insert((a - 1, a));
        }
        g
    }

    /// Node 0 joined to every other node.
    pub fn star(n: usize) -> Self {
        let mut g = Self::empty(n);
        for a in 1..n {
            g.edges.insert((0, a));
        }
        g
    }

    /// Adds `{a, b}`. Self-loops and duplicates are rejected.
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        ensure!(
            a < self.n && b < self.n,
            "edge ({a}, {b}) out of range for {} nodes",
            self.n
        );
        ensure!(a != b, "self-loop at node {a}");
        let e = (a.min(b), a.max(b));
        ensure!(self.edges.insert(e), "duplicate edge ({}, {})", e.0, e.1);
        Ok(())
    }

    /// Copy with `{a, b}` added; an existing edge is left as is.
    pub fn with_edge(&self, a: usize, b: usize) -> Result<Self> {
        let mut g = self.clone();
        if !g.has_edge(a, b) {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj.iter_mut().for_each(|l| l.sort_unstable());
        adj
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|(a, b)| *a == node || *b == node).count()
    }

    /// Connected components of the subgraph induced by nodes not in `removed`.
    fn component_count(&self, removed: &[bool]) -> usize {
        let adj = self.adjacency();
        let mut seen = removed.to_vec();
        let mut count = 0;
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count(&vec![false; self.n]) <= 1
    }

    /// Adjacency-list JSON: `{"n": .., "adjacency": [[..], ..]}`.
    pub fn to_adjacency_json(&self) -> String {
        serde_json::to_string_pretty(&AdjacencyJson {
            n: self.n,
            adjacency: self.adjacency(),
        })
        .expect("adjacency serializes")
    }

    pub fn from_adjacency_json(text: &str) -> Result<Self> {
        let doc: AdjacencyJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        ensure!(
            doc.adjacency.len() == doc.n,
            "adjacency has {} lists for {} nodes",
            doc.adjacency.len(),
            doc.n
        );
        let mut g = Self::empty(doc.n);
        for (a, list) in doc.adjacency.iter().enumerate() {
            for &b in list {
                ensure!(b < doc.n, "neighbor {b} of node {a} out of range");
                ensure!(a != b, "self-loop at node {a}");
                ensure!(
                    doc.adjacency[b].contains(&a),
                    "adjacency is not symmetric: {a} lists {b} but not vice versa"
                );
                if a < b {
                    g.add_edge(a, b)?;
                }
            }
        }
        Ok(g)
    }

    /// Edge-list text: a `# nodes N` header, then one `i j` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# nodes {}\n", self.n);
        for (a, b) in &self.edges {
            writeln!(out, "{a} {b}").expect("write to string");
        }
        out
    }

    /// Parses edge-list text. Without a `# nodes N` header the node count is
    /// one more than the largest index seen. Blank lines and other `#`
    /// comments are ignored.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(count) = rest.trim().strip_prefix("nodes") {
                    declared = Some(
                        count
                            .trim()
                            .parse::<usize>()
                            .map_err(|e| Error::Format(format!("line {}: bad node count: {e}", lineno + 1)))?,
                    );
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::Format(format!(
                    "line {}: expected \"i j\", got {line:?}",
                    lineno + 1
                )));
            }
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::Format(format!("line {}: {e}", lineno + 1)))
            };
            pairs.push((parse(fields[0])?, parse(fields[1])?));
        }
        let inferred = pairs.iter().map(|(a, b)| a.max(b) + 1).max().unwrap_or(0);
        let n = declared.unwrap_or(inferred);
        Self::from_edges(n, pairs)
    }
}

#[derive(Serialize, Deserialize)]
struct AdjacencyJson {
    n: usize,
    adjacency: Vec<Vec<usize>>,
}

/// Whether removing `colluders` splits the honest players into two or more
/// components. Colluder sets larger than `n − 2` are rejected.
pub fn is_partitioning_set(g: &KeySharingGraph, colluders: &[usize]) -> Result<bool> {
    let n = g.node_count();
    let mut removed = vec![false; n];
    for &c in colluders {
        ensure!(c < n, "colluder {c} out of range for {n} nodes");
        ensure!(!removed[c], "colluder {c} listed twice");
        removed[c] = true;
    }
    ensure!(
        colluders.len() + 2 <= n,
        "at most n − 2 = {} colluders are meaningful, got {}",
        n.saturating_sub(2),
        colluders.len()
    );
    Ok(g.component_count(&removed) >= 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub min_degree: usize,
    /// Every node shares keys with at least two others.
    pub requirement_met: bool,
}

pub fn min_degree(g: &KeySharingGraph) -> DegreeReport {
    let min_degree = g.adjacency().iter().map(Vec::len).min().unwrap_or(0);
    DegreeReport {
        min_degree,
        requirement_met: min_degree >= 2,
    }
}

/// Largest `t` such that no colluder set of size `≤ t` partitions `g`.
/// Disconnected graphs give `−1`.
///
/// Exhaustive for `n ≤ 12`, vertex connectivity otherwise.
pub fn tolerance(g: &KeySharingGraph) -> i64 {
    if g.node_count() <= SUBSET_ENUMERATION_LIMIT {
        tolerance_by_enumeration(g)
    } else {
        tolerance_by_connectivity(g)
    }
}

fn max_colluders(n: usize) -> i64 {
    n as i64 - 2
}

/// Tolerance from the smallest partitioning colluder set, found by trying
/// every subset in order of size.
pub fn tolerance_by_enumeration(g: &KeySharingGraph) -> i64 {
    let n = g.node_count();
    if !g.is_connected() {
        return -1;
    }
    if n < 2 {
        return 0;
    }
    for size in 1..=n - 2 {
        let found = Subsets::new(n, size).any(|set| {
            let mut removed = vec![false; n];
            set.iter().for_each(|&c| removed[c] = true);
            g.component_count(&removed) >= 2
        });
        if found {
            return size as i64 - 1;
        }
    }
    max_colluders(n)
}

/// Tolerance as `min(κ − 1, n − 2)` with `κ` the vertex connectivity.
pub fn tolerance_by_connectivity(g: &KeySharingGraph) -> i64 {
    let n = g.node_count();
    if !g.is_connected() {
        return -1;
    }
    if n < 2 {
        return 0;
    }
    (vertex_connectivity(g) as i64 - 1).min(max_colluders(n))
}

/// `κ(g)`: minimum number of nodes whose removal disconnects `g`, or `n − 1`
/// for complete graphs. Computed with unit-capacity max-flow on the
/// node-split graph.
pub fn vertex_connectivity(g: &KeySharingGraph) -> usize {
    let n = g.node_count();
    let mut best = n.saturating_sub(1);
    for s in 0..n {
        for t in s + 1..n {
            if !g.has_edge(s, t) {
                best = best.min(local_connectivity(g, s, t));
            }
        }
    }
    best
}

/// Number of internally node-disjoint paths between non-adjacent `s` and `t`.
fn local_connectivity(g: &KeySharingGraph, s: usize, t: usize) -> usize {
    // node v becomes v_in = 2v and v_out = 2v + 1
    let n = g.node_count();
    let size = 2 * n;
    let big = n;
    let mut cap = vec![vec![0usize; size]; size];
    for v in 0..n {
        cap[2 * v][2 * v + 1] = if v == s || v == t { big } else { 1 };
    }
    for (a, b) in g.edges() {
        cap[2 * a + 1][2 * b] = big;
        cap[2 * b + 1][2 * a] = big;
    }
    let (source, sink) = (2 * s + 1, 2 * t);
    let mut flow = 0;
    loop {
        let mut parent = vec![usize::MAX; size];
        parent[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for v in 0..size {
                if parent[v] == usize::MAX && cap[u][v] > 0 {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[sink] == usize::MAX {
            return flow;
        }
        let mut v = sink;
        while v != source {
            let u = parent[v];
            cap[u][v] -= 1;
            cap[v][u] += 1;
            v = u;
        }
        flow += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    /// Closed-form bound (`n` at `t = 0`, `n(n−1)/2` at `t = n − 2`).
    Corollary,
    /// Minimum over all graphs on `n` nodes, found by exhaustive search.
    Enumeration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyBound {
    pub keys: usize,
    pub source: BoundSource,
}

/// Minimum number of pairwise key bits for sender anonymity among `n`
/// players resisting `t` colluders.
pub fn key_lower_bound(n: usize, t: usize) -> Result<KeyBound> {
    ensure!(n >= 3, "key bound needs n ≥ 3, got {n}");
    ensure!(t + 2 <= n, "t = {t} out of range 0..={}", n - 2);
    if t == 0 {
        return Ok(KeyBound {
            keys: n,
            source: BoundSource::Corollary,
        });
    }
    if t == n - 2 {
        return Ok(KeyBound {
            keys: n * (n - 1) / 2,
            source: BoundSource::Corollary,
        });
    }
    let keys = min_edges_for_tolerance(n, t as i64)?;
    Ok(KeyBound {
        keys,
        source: BoundSource::Enumeration,
    })
}

/// Fewest edges among all graphs on `n ≤ 6` nodes with tolerance `≥ t`.
pub fn min_edges_for_tolerance(n: usize, t: i64) -> Result<usize> {
    if n > GRAPH_ENUMERATION_LIMIT {
        return Err(Error::TooLarge(format!(
            "graph search is limited to n ≤ {GRAPH_ENUMERATION_LIMIT}, got {n}"
        )));
    }
    all_graphs(n)
        .filter(|g| tolerance_by_enumeration(g) >= t)
        .map(|g| g.edge_count())
        .min()
        .ok_or_else(|| Error::invalid(format!("no graph on {n} nodes has tolerance {t}")))
}

/// Every labeled graph on `n` nodes (`2^(n(n−1)/2)` of them).
pub fn all_graphs(n: usize) -> impl Iterator<Item = KeySharingGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    assert!(pairs.len() < 64, "too many node pairs to enumerate");
    (0u64..1 << pairs.len()).map(move |mask| KeySharingGraph {
        n,
        edges: pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, e)| *e)
            .collect(),
    })
}

/// Lexicographic `k`-subsets of `0..n`.
pub struct Subsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Subsets {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
