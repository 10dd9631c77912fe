//! Weighted undirected networks, their Laplacians, generators and the
//! edge-list file format.
//!
//! Edge-list format: the first non-comment line holds the node count `N`;
//! each following line is `i j w` with 0-based indices and a positive
//! decimal weight. Lines starting with `#` and blank lines are ignored.
//! Every undirected edge is listed once.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Maximum number of regenerations before a connected sample is declared unreachable.
pub const MAX_CONNECTIVITY_RETRIES: usize = 1000;

/// Weighted undirected graph with a dense symmetric adjacency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    weights: Vec<f64>,
}

impl Graph {
    /// Edgeless graph on `n ≥ 2` nodes.
    pub fn empty(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("a network needs at least 2 nodes, got {n}")));
        }
        Ok(Self {
            n,
            weights: vec![0.0; n * n],
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(i, j, w) in edges {
            g.set_edge(i, j, w)?;
        }
        Ok(g)
    }

    /// Inserts or overwrites the undirected edge `(i, j)`.
    pub fn set_edge(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidParameter(format!(
                "edge ({i}, {j}) out of range for {} nodes",
                self.n
            )));
        }
        if i == j {
            return Err(Error::InvalidParameter(format!("self-loop at node {i}")));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "edge weight must be positive, got {w}"
            )));
        }
        self.weights[i * self.n + j] = w;
        self.weights[j * self.n + i] = w;
        Ok(())
    }

    fn remove_edge(&mut self, i: usize, j: usize) {
        self.weights[i * self.n + j] = 0.0;
        self.weights[j * self.n + i] = 0.0;
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.weight(i, j) > 0.0
    }

    /// Edges `(i, j, w)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (i + 1..self.n).filter_map(move |j| {
                let w = self.weight(i, j);
                (w > 0.0).then_some((i, j, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let row = &self.weights[i * self.n..(i + 1) * self.n];
        row.iter().enumerate().filter_map(|(j, &w)| (w > 0.0).then_some((j, w)))
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.weights[i * self.n..(i + 1) * self.n].iter().sum()
    }

    /// Breadth-first reachability from node 0.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for (v, _) in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Sparse adjacency lists, used by the simulator.
    pub fn adjacency_lists(&self) -> Vec<Vec<(usize, f64)>> {
        (0..self.n).map(|i| self.neighbors(i).collect()).collect()
    }

    pub fn laplacian(&self) -> Laplacian {
        laplacian(self)
    }
}

/// Graph Laplacian `L = D - A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian(DenseMatrix);

impl Laplacian {
    /// Wraps an arbitrary matrix; symmetry is checked by the eigensolver.
    pub fn from_matrix(m: DenseMatrix) -> Self {
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.0
    }
}

pub fn laplacian(g: &Graph) -> Laplacian {
    let n = g.n;
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let mut d = 0.0;
        for (j, w) in g.neighbors(i) {
            m[(i, j)] = -w;
            d += w;
        }
        m[(i, i)] = d;
    }
    Laplacian(m)
}

/// Hub node 0 joined to every other node with unit weight.
pub fn star_graph(n: usize) -> Result<Graph> {
    let mut g = Graph::empty(n)?;
    for leaf in 1..n {
        g.set_edge(0, leaf, 1.0)?;
    }
    Ok(g)
}

pub fn path_graph(n: usize) -> Result<Graph> {
    let mut g = Graph::empty(n)?;
    for i in 1..n {
        g.set_edge(i - 1, i, 1.0)?;
    }
    Ok(g)
}

pub fn complete_graph(n: usize) -> Result<Graph> {
    let mut g = Graph::empty(n)?;
    for i in 0..n {
        for j in i + 1..n {
            g.set_edge(i, j, 1.0)?;
        }
    }
    Ok(g)
}

/// Ring of `n` nodes, each joined to its `k/2` nearest neighbours on either side.
pub fn ring_lattice(n: usize, k: usize) -> Result<Graph> {
    check_lattice_size(n, k)?;
    let mut g = Graph::empty(n)?;
    for u in 0..n {
        for j in 1..=k / 2 {
            g.set_edge(u, (u + j) % n, 1.0)?;
        }
    }
    Ok(g)
}

fn check_lattice_size(n: usize, k: usize) -> Result<()> {
    if k < 2 || !k.is_multiple_of(2) || n <= k {
        return Err(Error::InvalidSize(format!(
            "ring lattice needs an even k >= 2 and n > k, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

fn check_probability(name: &str, p: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero {
        (0.0..=1.0).contains(&p)
    } else {
        p > 0.0 && p <= 1.0
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} = {p} is not a valid probability"
        )))
    }
}

/// Erdős–Rényi sample `G(n, p)` with unit weights, resampled until connected.
pub fn random_connected_graph(n: usize, edge_prob: f64, seed: u64) -> Result<Graph> {
    check_probability("edge_prob", edge_prob, false)?;
    Graph::empty(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_CONNECTIVITY_RETRIES {
        let mut g = Graph::empty(n)?;
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(edge_prob) {
                    g.set_edge(i, j, 1.0)?;
                }
            }
        }
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Generation(format!(
        "no connected G({n}, {edge_prob}) sample in {MAX_CONNECTIVITY_RETRIES} attempts"
    )))
}

/// Watts–Strogatz small-world graph, resampled until connected.
///
/// Starts from [`ring_lattice`]; each lattice edge `(u, u + j)` is, with
/// probability `rewire_prob`, replaced by `(u, w)` for a uniformly drawn `w`
/// that is neither `u` nor already adjacent to it.
pub fn small_world_graph(n: usize, k: usize, rewire_prob: f64, seed: u64) -> Result<Graph> {
    check_lattice_size(n, k)?;
    check_probability("rewire_prob", rewire_prob, true)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_CONNECTIVITY_RETRIES {
        let mut g = ring_lattice(n, k)?;
        for j in 1..=k / 2 {
            for u in 0..n {
                let v = (u + j) % n;
                if !rng.gen_bool(rewire_prob) || !g.has_edge(u, v) {
                    continue;
                }
                if g.neighbors(u).count() >= n - 1 {
                    continue;
                }
                let mut w = rng.gen_range(0..n);
                while w == u || g.has_edge(u, w) {
                    w = rng.gen_range(0..n);
                }
                g.remove_edge(u, v);
                g.set_edge(u, w, 1.0)?;
            }
        }
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Generation(format!(
        "no connected small-world sample (n = {n}, k = {k}, p = {rewire_prob}) in {MAX_CONNECTIVITY_RETRIES} attempts"
    )))
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut graph: Option<Graph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: line_no, message };
        let Some(g) = graph.as_mut() else {
            let n: usize = line
                .parse()
                .map_err(|_| parse_err(format!("expected node count, found {line:?}")))?;
            graph = Some(Graph::empty(n).map_err(|e| parse_err(e.to_string()))?);
            continue;
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(format!("expected `i j w`, found {line:?}")));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(format!("bad node index {:?}", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(format!("bad node index {:?}", fields[1])))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(format!("bad weight {:?}", fields[2])))?;
        if i == j {
            return Err(parse_err(format!("self-loop at node {i}")));
        }
        if i >= g.n || j >= g.n {
            return Err(parse_err(format!("edge ({i}, {j}) out of range for {} nodes", g.n)));
        }
        let existing = g.weight(i, j);
        if existing > 0.0 && existing != w {
            return Err(parse_err(format!(
                "edge ({i}, {j}) listed twice with weights {existing} and {w}"
            )));
        }
        g.set_edge(i, j, w).map_err(|e| parse_err(e.to_string()))?;
    }
    graph.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        message: "missing node count".into(),
    })
}

/// Serialises with shortest round-trip float formatting, so
/// `parse_edge_list(&write_edge_list(g)) == g`.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{}\n", g.n);
    for (i, j, w) in g.edges() {
        let _ = writeln!(out, "{i} {j} {w:?}");
    }
    out
}
