//! Labelled 3-uniform hypergraphs on the vertex set `[n] = {1, …, n}`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 3-uniform hypergraph with vertices `1..=n`.
///
/// Edges are stored as strictly increasing triples in ascending lexicographic
/// order without duplicates, so `==` is structural equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawHypergraph", into = "RawHypergraph")]
pub struct Hypergraph3 {
    n: usize,
    edges: Vec<[usize; 3]>,
}

#[derive(Serialize, Deserialize)]
struct RawHypergraph {
    n: usize,
    edges: Vec<[usize; 3]>,
}

impl TryFrom<RawHypergraph> for Hypergraph3 {
    type Error = Error;

    fn try_from(raw: RawHypergraph) -> Result<Self> {
        for e in &raw.edges {
            if !(e[0] < e[1] && e[1] < e[2]) {
                return Err(Error::invalid(format!(
                    "edge {e:?} is not a strictly increasing triple"
                )));
            }
        }
        Hypergraph3::new(raw.n, raw.edges)
    }
}

impl From<Hypergraph3> for RawHypergraph {
    fn from(h: Hypergraph3) -> Self {
        RawHypergraph {
            n: h.n,
            edges: h.edges,
        }
    }
}

impl Hypergraph3 {
    /// Builds a hypergraph from arbitrary triples. Each triple is sorted;
    /// repeated triples collapse to one edge.
    pub fn new(n: usize, edges: impl IntoIterator<Item = [usize; 3]>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a hypergraph needs at least one vertex"));
        }
        let mut set = BTreeSet::new();
        for mut e in edges {
            e.sort_unstable();
            if e[0] == 0 || e[2] > n {
                return Err(Error::invalid(format!("edge {e:?} leaves the vertex set [{n}]")));
            }
            if e[0] == e[1] || e[1] == e[2] {
                return Err(Error::invalid(format!("edge {e:?} repeats a vertex")));
            }
            set.insert(e);
        }
        Ok(Hypergraph3 {
            n,
            edges: set.into_iter().collect(),
        })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    /// All `C(n, 3)` triples.
    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, triples(n))
    }

    /// The tight cycle `C_ℓ^{(3)}`: edges `{i, i+1, i+2}` with indices taken mod `ℓ`.
    pub fn tight_cycle(len: usize) -> Result<Self> {
        if len < 4 {
            return Err(Error::invalid(format!(
                "a tight cycle needs length at least 4, got {len}"
            )));
        }
        Self::new(len, (0..len).map(|i| [i + 1, (i + 1) % len + 1, (i + 2) % len + 1]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[[usize; 3]] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Membership test for an (unordered) triple.
    pub fn has_edge(&self, mut e: [usize; 3]) -> bool {
        e.sort_unstable();
        self.edges.binary_search(&e).is_ok()
    }

    /// Number of edges containing `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(&v)).count()
    }

    /// `|E| / C(n, 3)`.
    pub fn edge_density(&self) -> Result<f64> {
        if self.n < 3 {
            return Err(Error::invalid(format!(
                "edge density needs at least 3 vertices, got {}",
                self.n
            )));
        }
        Ok(self.edges.len() as f64 / binomial3(self.n) as f64)
    }

    /// Returns a copy with one more edge.
    pub fn with_edge(&self, e: [usize; 3]) -> Result<Self> {
        Self::new(self.n, self.edges.iter().copied().chain([e]))
    }

    /// Whether `map` (pattern vertex `i` ↦ `map[i-1]`) is an injective map
    /// sending every edge of `pattern` to an edge of `self`.
    pub fn is_copy(&self, pattern: &Hypergraph3, map: &[usize]) -> bool {
        if map.len() != pattern.n || map.iter().any(|&v| v == 0 || v > self.n) {
            return false;
        }
        let distinct: BTreeSet<_> = map.iter().collect();
        distinct.len() == map.len()
            && pattern
                .edges
                .iter()
                .all(|e| self.has_edge([map[e[0] - 1], map[e[1] - 1], map[e[2] - 1]]))
    }

    /// Finds a copy of `pattern` in `self`.
    ///
    /// Returns the lexicographically first injective vertex map (pattern
    /// vertex `i` ↦ `map[i-1]`) under which every pattern edge is a host edge.
    pub fn contains_copy(&self, pattern: &Hypergraph3) -> Option<Vec<usize>> {
        ContainmentSearch::new(self, pattern).run()
    }
}

/// Backtracking over images of pattern vertices `1, 2, …` in order, trying
/// host vertices in ascending order. A candidate image must have at least
/// the pattern vertex's degree; every pattern edge is checked as soon as its
/// largest vertex is placed.
struct ContainmentSearch<'a> {
    host: &'a Hypergraph3,
    adjacency: Vec<bool>,
    host_degree: Vec<usize>,
    pattern_degree: Vec<usize>,
    // pattern edges grouped by their largest vertex (0-based)
    closing: Vec<Vec<[usize; 2]>>,
    map: Vec<usize>,
    used: Vec<bool>,
}

impl<'a> ContainmentSearch<'a> {
    fn new(host: &'a Hypergraph3, pattern: &Hypergraph3) -> Self {
        let n = host.n;
        let mut adjacency = vec![false; n * n * n];
        for e in &host.edges {
            let [a, b, c] = [e[0] - 1, e[1] - 1, e[2] - 1];
            for [x, y, z] in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                adjacency[(x * n + y) * n + z] = true;
            }
        }
        let mut host_degree = vec![0; n];
        for e in &host.edges {
            for &v in e {
                host_degree[v - 1] += 1;
            }
        }
        let mut pattern_degree = vec![0; pattern.n];
        let mut closing = vec![Vec::new(); pattern.n];
        for e in &pattern.edges {
            for &v in e {
                pattern_degree[v - 1] += 1;
            }
            closing[e[2] - 1].push([e[0] - 1, e[1] - 1]);
        }
        ContainmentSearch {
            host,
            adjacency,
            host_degree,
            pattern_degree,
            closing,
            map: Vec::with_capacity(pattern.n),
            used: vec![false; n],
        }
    }

    fn run(mut self) -> Option<Vec<usize>> {
        if self.pattern_degree.len() > self.host.n {
            return None;
        }
        if self.extend() {
            Some(self.map.iter().map(|v| v + 1).collect())
        } else {
            None
        }
    }

    fn extend(&mut self) -> bool {
        let p = self.map.len();
        if p == self.pattern_degree.len() {
            return true;
        }
        let n = self.host.n;
        for h in 0..n {
            if self.used[h] || self.host_degree[h] < self.pattern_degree[p] {
                continue;
            }
            let fits = self.closing[p].iter().all(|&[a, b]| {
                let (x, y) = (self.map[a], self.map[b]);
                self.adjacency[(x * n + y) * n + h]
            });
            if !fits {
                continue;
            }
            self.map.push(h);
            self.used[h] = true;
            if self.extend() {
                return true;
            }
            self.used[h] = false;
            self.map.pop();
        }
        false
    }
}

/// All strictly increasing triples over `[n]` in lexicographic order.
pub fn triples(n: usize) -> impl Iterator<Item = [usize; 3]> {
    (1..=n).flat_map(move |a| {
        (a + 1..=n).flat_map(move |b| (b + 1..=n).map(move |c| [a, b, c]))
    })
}

/// All pairs `a < b` over `[n]` in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = [usize; 2]> {
    (1..=n).flat_map(move |a| (a + 1..=n).map(move |b| [a, b]))
}

pub(crate) fn binomial3(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}
