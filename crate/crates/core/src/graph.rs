//! Small labeled simple graphs (at most 62 vertices, bitset adjacency).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub const MAX_VERTICES: usize = 62;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_VERTICES, "graphs are limited to {MAX_VERTICES} vertices");
        Graph { n, adj: vec![0; n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::empty(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    /// `rim` cycle plus one vertex adjacent to every rim vertex (labelled `rim`).
    pub fn wheel_over(rim: usize) -> Self {
        let mut g = Graph::cycle(rim).with_vertex();
        for i in 0..rim {
            g.add_edge(i, rim);
        }
        g
    }

    /// Bitmask over the upper triangle, pair order as in [`Graph::pairs`].
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut g = Graph::empty(n);
        for (bit, (i, j)) in Graph::pairs(n).enumerate() {
            if mask >> bit & 1 == 1 {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn mask(&self) -> u64 {
        Graph::pairs(self.n)
            .enumerate()
            .filter(|(_, (i, j))| self.has_edge(*i, *j))
            .fold(0, |m, (bit, _)| m | 1 << bit)
    }

    /// All unordered pairs `i < j`, ordered by `j` then `i`.
    pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
        (1..n).flat_map(|j| (0..j).map(move |i| (i, j)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b && a < self.n && b < self.n, "bad edge {a}-{b}");
        self.adj[a] |= 1 << b;
        self.adj[b] |= 1 << a;
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.adj[a] &= !(1 << b);
        self.adj[b] &= !(1 << a);
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.adj[a] >> b & 1 == 1
    }

    pub fn neighbors_mask(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.has_edge(v, u))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        Graph::pairs(self.n).filter(|&(i, j)| self.has_edge(i, j)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for (i, j) in Graph::pairs(self.n) {
            if !self.has_edge(i, j) {
                g.add_edge(i, j);
            }
        }
        g
    }

    /// Appends an isolated vertex with label `n`.
    pub fn with_vertex(&self) -> Graph {
        let mut adj = self.adj.clone();
        adj.push(0);
        Graph { n: self.n + 1, adj }
    }

    /// Induced subgraph on `keep`, relabelled `0..keep.len()` in the given order.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut g = Graph::empty(keep.len());
        for (a, &u) in keep.iter().enumerate() {
            for (b, &v) in keep.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    pub fn without_vertex(&self, v: usize) -> Graph {
        let keep: Vec<usize> = (0..self.n).filter(|&u| u != v).collect();
        self.induced(&keep)
    }

    /// Graph with vertex `perm[i]` playing the role of old vertex `i`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::empty(self.n);
        for (i, j) in self.edges() {
            g.add_edge(perm[i], perm[j]);
        }
        g
    }

    /// Disjoint union followed by all edges across (the graph join).
    pub fn join(&self, other: &Graph) -> Graph {
        let n = self.n + other.n;
        let mut g = Graph::empty(n);
        for (i, j) in self.edges() {
            g.add_edge(i, j);
        }
        for (i, j) in other.edges() {
            g.add_edge(self.n + i, self.n + j);
        }
        for i in 0..self.n {
            for j in 0..other.n {
                g.add_edge(i, self.n + j);
            }
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let full = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = self.adj[v] & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        seen == full
    }

    pub fn dominating_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.degree(v) + 1 == self.n).collect()
    }

    /// Lexicographically smallest edge mask over all relabellings (n <= 8).
    pub fn canonical_mask(&self) -> u64 {
        let mut best = u64::MAX;
        let mut perm: Vec<usize> = (0..self.n).collect();
        permutations(&mut perm, 0, &mut |p| {
            let m = self.permuted(p).mask();
            if m < best {
                best = m;
            }
        });
        best
    }

    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        self.n == other.n
            && self.edge_count() == other.edge_count()
            && self.canonical_mask() == other.canonical_mask()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphRepr { n: self.n, edges: self.edges() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = GraphRepr::deserialize(d)?;
        if r.n > MAX_VERTICES {
            return Err(D::Error::custom("too many vertices"));
        }
        let mut g = Graph::empty(r.n);
        for (a, b) in r.edges {
            if a == b || a >= r.n || b >= r.n {
                return Err(D::Error::custom(format!("bad edge {a}-{b}")));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }
}

/// Heap-free permutation walk calling `f` on every ordering of `items[k..]`.
pub fn permutations(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, f);
        items.swap(k, i);
    }
}

/// One representative per isomorphism class of graphs on `n` vertices,
/// grown vertex by vertex from the classes on `n - 1` vertices.
pub fn isomorphism_classes(n: usize) -> Vec<Graph> {
    assert!(n <= 7, "class enumeration is meant for desk-scale n");
    let mut classes = vec![Graph::empty(0)];
    for m in 1..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for g in &classes {
            for nbrs in 0u64..(1 << (m - 1)) {
                let mut h = g.with_vertex();
                for u in 0..m - 1 {
                    if nbrs >> u & 1 == 1 {
                        h.add_edge(u, m - 1);
                    }
                }
                let c = h.canonical_mask();
                if seen.insert(c) {
                    next.push(Graph::from_mask(m, c));
                }
            }
        }
        classes = next;
    }
    classes
}
