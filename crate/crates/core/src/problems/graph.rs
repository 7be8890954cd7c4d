use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use petgraph::graph::UnGraph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph; edges are stored as sorted `(u, v)` with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::domain(format!("self-loop on vertex {u}")));
            }
            if u >= n_vertices || v >= n_vertices {
                return Err(Error::domain(format!(
                    "edge ({u}, {v}) out of range for {n_vertices} vertices"
                )));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::domain(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Graph {
            n_vertices,
            edges: set.into_iter().collect(),
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn cycle(n: usize) -> Result<Self> {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn complete(n: usize) -> Result<Self> {
        Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    /// Uniform random `degree`-regular graph from the configuration model,
    /// rejecting pairings with self-loops or multi-edges.
    pub fn random_regular<R: Rng + ?Sized>(n: usize, degree: usize, rng: &mut R) -> Result<Self> {
        if degree >= n || (n * degree) % 2 != 0 {
            return Err(Error::domain(format!(
                "no {degree}-regular graph on {n} vertices"
            )));
        }
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(degree)).collect();
        for _ in 0..100_000 {
            stubs.shuffle(rng);
            let pairs: Vec<(usize, usize)> = stubs.chunks_exact(2).map(|p| (p[0], p[1])).collect();
            if let Ok(g) = Graph::new(n, pairs) {
                return Ok(g);
            }
        }
        Err(Error::Numerical(format!(
            "configuration model failed to produce a simple {degree}-regular graph on {n} vertices"
        )))
    }

    /// `count` pairwise non-isomorphic random regular graphs, deterministic in `seed`.
    pub fn random_regular_set(n: usize, degree: usize, count: usize, seed: u64) -> Result<Vec<Self>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out: Vec<Graph> = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count {
            attempts += 1;
            if attempts > 10_000 * count.max(1) {
                return Err(Error::domain(format!(
                    "could not find {count} non-isomorphic {degree}-regular graphs on {n} vertices"
                )));
            }
            let g = Graph::random_regular(n, degree, &mut rng)?;
            if out.iter().all(|h| !g.is_isomorphic(h)) {
                out.push(g);
            }
        }
        Ok(out)
    }

    fn to_petgraph(&self) -> UnGraph<(), ()> {
        let mut g = UnGraph::<(), ()>::with_capacity(self.n_vertices, self.edges.len());
        let nodes: Vec<_> = (0..self.n_vertices).map(|_| g.add_node(())).collect();
        for &(u, v) in &self.edges {
            g.add_edge(nodes[u], nodes[v], ());
        }
        g
    }

    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        self.n_vertices == other.n_vertices
            && self.n_edges() == other.n_edges()
            && petgraph::algo::is_isomorphic(&self.to_petgraph(), &other.to_petgraph())
    }

    /// Edge-list text: a vertex-count line followed by one `u v` pair per
    /// line. Blank lines and `#` comments are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::domain("edge list is empty; expected a vertex count"))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::domain(format!("bad vertex-count header {header:?}")))?;
        let mut edges = Vec::new();
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::domain(format!("bad vertex index {s:?} in line {line:?}")))
            };
            match parts.as_slice() {
                [u, v] => edges.push((parse(u)?, parse(v)?)),
                _ => return Err(Error::domain(format!("expected `u v`, got {line:?}"))),
            }
        }
        Graph::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{}\n", self.n_vertices);
        for (u, v) in &self.edges {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub fn read_edge_list(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Graph::parse_edge_list(&text)
    }
}
