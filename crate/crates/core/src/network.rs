//! Undirected communication graphs and their generators.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};
use std::fmt;
use std::io::{self, BufRead};
use std::num::NonZeroUsize;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};

/// Whose statistics a node averages: its neighbors only (`Open`) or its
/// neighbors and itself (`Closed`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Neighborhood {
    #[default]
    Closed,
    Open,
}

impl FromStr for Neighborhood {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Neighborhood::Closed),
            "open" => Ok(Neighborhood::Open),
            _ => Err(Error::InvalidArgument(format!("unknown neighborhood mode {s:?}"))),
        }
    }
}

impl fmt::Display for Neighborhood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Neighborhood::Closed => "closed",
            Neighborhood::Open => "open",
        })
    }
}

/// Simple undirected graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Rejects self-loops, duplicate edges (in either orientation) and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Graph(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            if u == v {
                return Err(Error::Graph(format!("self-loop at node {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::Graph(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Self::from_set(n, set))
    }

    fn from_set(n: usize, edges: BTreeSet<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for a in &mut adjacency {
            a.sort_unstable();
        }
        Self { n, edges, adjacency }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Fraction of the `n(n−1)/2` possible edges present; 0 for `n < 2`.
    pub fn sparseness(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.edges.len() as f64 / (self.n * (self.n - 1) / 2) as f64
    }

    pub fn neighbors(&self, v: usize, mode: Neighborhood) -> Result<Vec<usize>> {
        if v >= self.n {
            return Err(Error::Graph(format!("node {v} outside 0..{}", self.n)));
        }
        let mut out = self.adjacency[v].clone();
        if mode == Neighborhood::Closed {
            let pos = out.partition_point(|&u| u < v);
            out.insert(pos, v);
        }
        Ok(out)
    }

    fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued nodes have a distance");
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.distances_from(0).iter().all(Option::is_some)
    }

    /// Longest shortest path, `None` when disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for s in 0..self.n {
            for d in self.distances_from(s) {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    /// One `u v` line per edge with 1-based ids, preceded by a `# nodes n` line.
    pub fn write_edge_list(&self, mut w: impl io::Write) -> io::Result<()> {
        writeln!(w, "# nodes {}", self.n)?;
        for (u, v) in self.edges() {
            writeln!(w, "{} {}", u + 1, v + 1)?;
        }
        Ok(())
    }

    /// Reads an edge list with 1-based ids. Without a `# nodes n` line the
    /// node count is the largest id seen.
    pub fn read_edge_list(r: impl BufRead) -> Result<Self> {
        let mut declared = None;
        let mut edges = Vec::new();
        for (n, line) in r.lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: "<edge list>".into(),
                source,
            })?;
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(count) = rest.trim().strip_prefix("nodes") {
                    declared = Some(count.trim().parse::<usize>().map_err(|e| Error::Parse {
                        line: n + 1,
                        message: e.to_string(),
                    })?);
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let ids: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: n + 1,
                    message: e.to_string(),
                })?;
            match ids[..] {
                [u, v] if u >= 1 && v >= 1 => edges.push((u - 1, v - 1)),
                _ => {
                    return Err(Error::Parse {
                        line: n + 1,
                        message: "expected two 1-based node ids".into(),
                    })
                }
            }
        }
        let n = declared.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
        Graph::from_edges(n, edges)
    }
}

fn require_nodes(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Graph(format!("need at least {min} nodes, got {n}")));
    }
    Ok(())
}

/// Decodes a Prüfer sequence over `0..seq.len() + 2` into tree edges.
pub fn prufer_decode(seq: &[usize]) -> Result<Graph> {
    let n = seq.len() + 2;
    if let Some(&bad) = seq.iter().find(|&&a| a >= n) {
        return Err(Error::Graph(format!("Prüfer entry {bad} outside 0..{n}")));
    }
    let mut degree = vec![1usize; n];
    for &a in seq {
        degree[a] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| degree[i] == 1).map(Reverse).collect();
    let mut edges = BTreeSet::new();
    for &a in seq {
        let Reverse(leaf) = leaves.pop().expect("a tree always has a leaf");
        edges.insert((leaf.min(a), leaf.max(a)));
        degree[a] -= 1;
        if degree[a] == 1 {
            leaves.push(Reverse(a));
        }
    }
    let Reverse(u) = leaves.pop().expect("two nodes remain");
    let Reverse(v) = leaves.pop().expect("two nodes remain");
    edges.insert((u.min(v), u.max(v)));
    Ok(Graph::from_set(n, edges))
}

/// Uniformly random labeled tree on `n ≥ 2` nodes.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> Result<Graph> {
    require_nodes(n, 2)?;
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    prufer_decode(&seq)
}

pub fn chain(n: usize) -> Result<Graph> {
    require_nodes(n, 2)?;
    Ok(Graph::from_set(n, (0..n - 1).map(|i| (i, i + 1)).collect()))
}

pub fn full_graph(n: usize) -> Result<Graph> {
    require_nodes(n, 1)?;
    Ok(Graph::from_set(
        n,
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect(),
    ))
}

/// Adds `k` distinct absent edges chosen uniformly at random.
pub fn add_random_edges(graph: &Graph, k: usize, rng: &mut impl Rng) -> Result<Graph> {
    let n = graph.n;
    let absent: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|e| !graph.edges.contains(e))
        .collect();
    if k > absent.len() {
        return Err(Error::Graph(format!(
            "cannot add {k} edges, only {} are absent",
            absent.len()
        )));
    }
    let mut edges = graph.edges.clone();
    for i in index::sample(rng, absent.len(), k) {
        edges.insert(absent[i]);
    }
    Ok(Graph::from_set(n, edges))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Topology {
    #[default]
    Tree,
    Chain,
    /// Random tree plus `k` random extra edges.
    TreePlus(usize),
    Full,
}

impl Topology {
    pub fn generate(&self, n: usize, rng: &mut impl Rng) -> Result<Graph> {
        match *self {
            Topology::Tree => random_tree(n, rng),
            Topology::Chain => chain(n),
            Topology::TreePlus(k) => add_random_edges(&random_tree(n, rng)?, k, rng),
            Topology::Full => full_graph(n),
        }
    }

    /// Smallest node count the generator accepts.
    pub fn min_nodes(&self) -> usize {
        match self {
            Topology::Full => 1,
            _ => 2,
        }
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree" => Ok(Topology::Tree),
            "chain" => Ok(Topology::Chain),
            "full" => Ok(Topology::Full),
            _ => {
                let k = s
                    .strip_prefix("tree+")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown topology {s:?}")))?;
                Ok(Topology::TreePlus(k))
            }
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Tree => f.write_str("tree"),
            Topology::Chain => f.write_str("chain"),
            Topology::TreePlus(k) => write!(f, "tree+{k}"),
            Topology::Full => f.write_str("full"),
        }
    }
}

/// How often the graph is regenerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Period {
    #[default]
    Infinite,
    Every(NonZeroUsize),
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinite" | "∞" => Ok(Period::Infinite),
            _ => s
                .parse::<NonZeroUsize>()
                .map(Period::Every)
                .map_err(|_| Error::InvalidArgument(format!("invalid period {s:?}"))),
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Period::Infinite => f.write_str("inf"),
            Period::Every(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RewireSchedule {
    pub period: Period,
    pub topology: Topology,
}

impl RewireSchedule {
    pub fn fixed(topology: Topology) -> Self {
        Self {
            period: Period::Infinite,
            topology,
        }
    }

    pub fn changes_at(&self, round: usize) -> bool {
        match self.period {
            Period::Infinite => false,
            Period::Every(d) => round.is_multiple_of(d.get()),
        }
    }

    /// Graph for round `round ≥ 1`: a fresh draw of the base topology when
    /// the period divides the round, `current` otherwise.
    pub fn rewire(&self, round: usize, current: &Graph, rng: &mut impl Rng) -> Result<Graph> {
        if self.changes_at(round) {
            self.topology.generate(current.n(), rng)
        } else {
            Ok(current.clone())
        }
    }
}
