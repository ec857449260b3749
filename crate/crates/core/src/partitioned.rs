//! `n`-partitioned hypergraphs.
//!
//! The vertex set is split into parts `V_ij`, `1 ≤ i < j ≤ n`, and every edge
//! lies in some `(i,j,k)`-triad: one vertex in each of `V_ij` (left),
//! `V_jk` (right) and `V_ik` (top). Vertices are identified by their part and
//! a 1-based local id; an edge of a triad is stored as `[left, right, top]`.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph3;
use crate::rng;

/// Default node budget for [`PartitionedHypergraph::find_embedding`], per
/// choice of the first index.
pub const DEFAULT_EMBED_BUDGET: u64 = 10_000_000;

/// Role of a part within a triad `i < j < k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// `V_ij`
    Left,
    /// `V_jk`
    Right,
    /// `V_ik`
    Top,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Left, Role::Right, Role::Top];

    /// Position of this role in a stored edge `[left, right, top]`.
    fn slot(self) -> usize {
        match self {
            Role::Left => 0,
            Role::Right => 1,
            Role::Top => 2,
        }
    }

    /// The part of the triad `(i, j, k)` playing this role.
    pub fn part(self, [i, j, k]: [usize; 3]) -> (usize, usize) {
        match self {
            Role::Left => (i, j),
            Role::Right => (j, k),
            Role::Top => (i, k),
        }
    }

    fn of_pair(triad: [usize; 3], pair: (usize, usize)) -> Option<Role> {
        Role::ALL.into_iter().find(|r| r.part(triad) == pair)
    }
}

/// A vertex given by its part `V_{pair}` and local id `1..=|V_pair|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PartVertex {
    pub pair: (usize, usize),
    pub id: usize,
}

impl PartVertex {
    pub fn new(pair: (usize, usize), id: usize) -> Self {
        PartVertex { pair, id }
    }
}

/// The twelve normalized degree notions of a triad.
///
/// * `Vertex(r)` – edges through the vertex divided by the product of the
///   other two part sizes (`d_{ij→k}`, `d_{jk→i}`, `d_{ik→j}`).
/// * `Codegree(r, s)` – edges through both vertices divided by the size of
///   the remaining part (`d_{ij|ik}` and friends).
/// * `Side { of, toward }` – neighbours of the vertex in part `toward`
///   divided by that part's size (`d_{ik→ij}` is `Side { of: Top, toward: Left }`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeKind {
    Vertex(Role),
    Codegree(Role, Role),
    Side { of: Role, toward: Role },
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Triad {
    // sizes of the left, right and top parts
    dims: [usize; 3],
    present: Vec<bool>,
    count: usize,
}

impl Triad {
    fn new(dims: [usize; 3]) -> Self {
        Triad {
            dims,
            present: vec![false; dims.iter().product()],
            count: 0,
        }
    }

    fn offset(&self, [a, b, c]: [usize; 3]) -> usize {
        ((a - 1) * self.dims[1] + (b - 1)) * self.dims[2] + (c - 1)
    }

    fn contains(&self, e: [usize; 3]) -> bool {
        self.present[self.offset(e)]
    }

    fn set(&mut self, e: [usize; 3], on: bool) -> bool {
        let o = self.offset(e);
        let changed = self.present[o] != on;
        if changed {
            self.present[o] = on;
            if on {
                self.count += 1;
            } else {
                self.count -= 1;
            }
        }
        changed
    }

    fn edges(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let [_, r, t] = self.dims;
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(move |(o, _)| [o / (r * t) + 1, (o / t) % r + 1, o % t + 1])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPartitioned", into = "RawPartitioned")]
pub struct PartitionedHypergraph {
    n: usize,
    // part sizes, lexicographic pair order
    sizes: Vec<usize>,
    // lexicographic triad order
    triads: Vec<Triad>,
}

#[derive(Serialize, Deserialize)]
struct RawPartitioned {
    n: usize,
    sizes: BTreeMap<String, usize>,
    #[serde(default)]
    triads: BTreeMap<String, Vec<[usize; 3]>>,
}

fn parse_indices<const K: usize>(key: &str) -> Result<[usize; K]> {
    let parts: Vec<usize> = key
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::invalid(format!("cannot parse index key \"{key}\"")))?;
    parts
        .try_into()
        .map_err(|_| Error::invalid(format!("key \"{key}\" needs {K} indices")))
}

impl TryFrom<RawPartitioned> for PartitionedHypergraph {
    type Error = Error;

    fn try_from(raw: RawPartitioned) -> Result<Self> {
        let mut sizes = BTreeMap::new();
        for (key, s) in raw.sizes {
            let [i, j] = parse_indices::<2>(&key)?;
            sizes.insert((i, j), s);
        }
        let mut h = PartitionedHypergraph::new(raw.n, |i, j| sizes.get(&(i, j)).copied().unwrap_or(0))?;
        if sizes.len() != raw.n * (raw.n - 1) / 2 {
            return Err(Error::invalid("sizes must list exactly the pairs i < j ≤ n"));
        }
        for (key, edges) in raw.triads {
            let [i, j, k] = parse_indices::<3>(&key)?;
            for e in edges {
                if !h.add_edge([i, j, k], e)? {
                    return Err(Error::invalid(format!("edge {e:?} listed twice in triad {key}")));
                }
            }
        }
        Ok(h)
    }
}

impl From<PartitionedHypergraph> for RawPartitioned {
    fn from(h: PartitionedHypergraph) -> Self {
        let sizes = h
            .pairs()
            .map(|(i, j)| (format!("{i},{j}"), h.size(i, j)))
            .collect();
        let triads = h
            .triad_list()
            .filter(|&t| h.triad(t).count > 0)
            .map(|t| (format!("{},{},{}", t[0], t[1], t[2]), h.edges(t).collect()))
            .collect();
        RawPartitioned {
            n: h.n,
            sizes,
            triads,
        }
    }
}

impl PartitionedHypergraph {
    /// An edgeless `n`-partitioned hypergraph with `|V_ij| = size(i, j) ≥ 1`.
    pub fn new(n: usize, size: impl Fn(usize, usize) -> usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("need at least 2 indices, got {n}")));
        }
        let mut sizes = Vec::with_capacity(n * (n - 1) / 2);
        for i in 1..=n {
            for j in i + 1..=n {
                let s = size(i, j);
                if s == 0 {
                    return Err(Error::invalid(format!("part V_{i},{j} must be non-empty")));
                }
                sizes.push(s);
            }
        }
        let mut h = PartitionedHypergraph {
            n,
            sizes,
            triads: Vec::new(),
        };
        h.triads = h
            .triad_list()
            .map(|t| Triad::new(Role::ALL.map(|r| h.part_size(r.part(t)))))
            .collect();
        Ok(h)
    }

    /// Every triad complete.
    pub fn complete(n: usize, size: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let mut h = Self::new(n, size)?;
        for t in &mut h.triads {
            t.present.iter_mut().for_each(|p| *p = true);
            t.count = t.present.len();
        }
        Ok(h)
    }

    /// Each potential triad edge present independently with probability `density`.
    pub fn random(
        n: usize,
        size: impl Fn(usize, usize) -> usize,
        density: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::invalid(format!("density {density} outside [0, 1]")));
        }
        let mut h = Self::new(n, size)?;
        let mut r = rng::seeded(seed);
        for t in &mut h.triads {
            for p in t.present.iter_mut() {
                *p = r.random_bool(density);
            }
            t.count = t.present.iter().filter(|&&p| p).count();
        }
        Ok(h)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn pair_slot(&self, i: usize, j: usize) -> usize {
        (i - 1) * (2 * self.n - i) / 2 + (j - i - 1)
    }

    fn triad_slot(&self, [i, j, k]: [usize; 3]) -> usize {
        // triads before first index i, then pairs (j, k) of the remaining indices
        let n = self.n;
        let before: usize = (1..i).map(|a| (n - a) * (n - a - 1) / 2).sum();
        let m = n - i;
        let (jj, kk) = (j - i, k - i);
        before + (jj - 1) * (2 * m - jj) / 2 + (kk - jj - 1)
    }

    fn part_size(&self, (i, j): (usize, usize)) -> usize {
        self.sizes[self.pair_slot(i, j)]
    }

    /// `|V_ij|` for `i < j`.
    pub fn size(&self, i: usize, j: usize) -> usize {
        self.part_size((i, j))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
    }

    /// All triads `i < j < k` in lexicographic order.
    pub fn triad_list(&self) -> impl Iterator<Item = [usize; 3]> {
        crate::hypergraph::triples(self.n)
    }

    fn check_triad(&self, [i, j, k]: [usize; 3]) -> Result<()> {
        if !(1 <= i && i < j && j < k && k <= self.n) {
            return Err(Error::invalid(format!(
                "({i},{j},{k}) is not an increasing triad within [{}]",
                self.n
            )));
        }
        Ok(())
    }

    fn triad(&self, t: [usize; 3]) -> &Triad {
        &self.triads[self.triad_slot(t)]
    }

    fn check_edge(&self, t: [usize; 3], e: [usize; 3]) -> Result<()> {
        self.check_triad(t)?;
        let dims = self.triad(t).dims;
        if (0..3).any(|s| e[s] == 0 || e[s] > dims[s]) {
            return Err(Error::invalid(format!(
                "edge {e:?} does not fit the parts of triad {t:?} (sizes {dims:?})"
            )));
        }
        Ok(())
    }

    /// Adds `[left, right, top]` to the triad; returns whether it was new.
    pub fn add_edge(&mut self, t: [usize; 3], e: [usize; 3]) -> Result<bool> {
        self.check_edge(t, e)?;
        let slot = self.triad_slot(t);
        Ok(self.triads[slot].set(e, true))
    }

    /// Removes an edge; returns whether it was present.
    pub fn remove_edge(&mut self, t: [usize; 3], e: [usize; 3]) -> Result<bool> {
        self.check_edge(t, e)?;
        let slot = self.triad_slot(t);
        Ok(self.triads[slot].set(e, false))
    }

    pub fn has_edge(&self, t: [usize; 3], e: [usize; 3]) -> bool {
        self.check_edge(t, e).is_ok() && self.triad(t).contains(e)
    }

    /// Edges of a triad as `[left, right, top]`, in lexicographic order.
    pub fn edges(&self, t: [usize; 3]) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.triad(t).edges()
    }

    pub fn edge_count(&self, t: [usize; 3]) -> usize {
        self.triad(t).count
    }

    /// Edges of the triad divided by `|V_ij|·|V_ik|·|V_jk|`.
    pub fn triad_density(&self, t: [usize; 3]) -> Result<f64> {
        self.check_triad(t)?;
        let tr = self.triad(t);
        Ok(tr.count as f64 / tr.present.len() as f64)
    }

    /// Minimum triad density.
    pub fn density(&self) -> Result<f64> {
        if self.n < 3 {
            return Err(Error::invalid(format!("density needs n ≥ 3, got {}", self.n)));
        }
        Ok(self
            .triads
            .iter()
            .map(|tr| tr.count as f64 / tr.present.len() as f64)
            .fold(f64::INFINITY, f64::min))
    }

    /// One of the twelve degree notions of the triad `t`. `vertices` holds one
    /// vertex (two for codegrees), each of which must lie in the part of the
    /// role the kind assigns it.
    pub fn degree(&self, t: [usize; 3], kind: DegreeKind, vertices: &[PartVertex]) -> Result<f64> {
        self.check_triad(t)?;
        let roles: Vec<Role> = match kind {
            DegreeKind::Vertex(r) => vec![r],
            DegreeKind::Codegree(r, s) | DegreeKind::Side { of: r, toward: s } => {
                if r == s {
                    return Err(Error::invalid(format!("{kind:?} needs two different roles")));
                }
                match kind {
                    DegreeKind::Codegree(..) => vec![r, s],
                    _ => vec![r],
                }
            }
        };
        if vertices.len() != roles.len() {
            return Err(Error::invalid(format!(
                "{kind:?} takes {} vertices, got {}",
                roles.len(),
                vertices.len()
            )));
        }
        for (v, r) in vertices.iter().zip(&roles) {
            let part = r.part(t);
            if v.pair != part {
                return Err(Error::invalid(format!(
                    "vertex {v:?} is not in V_{},{} ({r:?} part of triad {t:?})",
                    part.0, part.1
                )));
            }
            if v.id == 0 || v.id > self.part_size(part) {
                return Err(Error::invalid(format!("vertex {v:?} exceeds its part size")));
            }
        }
        let tr = self.triad(t);
        let dims = tr.dims;
        let matches = |e: &[usize; 3]| vertices.iter().zip(&roles).all(|(v, r)| e[r.slot()] == v.id);
        Ok(match kind {
            DegreeKind::Vertex(r) => {
                let others: usize = Role::ALL.iter().filter(|&&o| o != r).map(|o| dims[o.slot()]).product();
                tr.edges().filter(matches).count() as f64 / others as f64
            }
            DegreeKind::Codegree(r, s) => {
                let third = Role::ALL.into_iter().find(|&o| o != r && o != s).expect("three roles");
                tr.edges().filter(matches).count() as f64 / dims[third.slot()] as f64
            }
            DegreeKind::Side { toward, .. } => {
                let mut seen = vec![false; dims[toward.slot()]];
                for e in tr.edges().filter(matches) {
                    seen[e[toward.slot()] - 1] = true;
                }
                seen.iter().filter(|&&s| s).count() as f64 / dims[toward.slot()] as f64
            }
        })
    }

    /// The subhypergraph induced by the increasing index list `indices`,
    /// relabelled to `1..=|indices|`.
    pub fn induced(&self, indices: &[usize]) -> Result<Self> {
        if indices.len() < 3 {
            return Err(Error::invalid(format!(
                "an induced subhypergraph needs at least 3 indices, got {}",
                indices.len()
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) || indices[0] == 0 || indices[indices.len() - 1] > self.n {
            return Err(Error::invalid(format!(
                "{indices:?} is not an increasing list within [{}]",
                self.n
            )));
        }
        let mut h = Self::new(indices.len(), |i, j| self.size(indices[i - 1], indices[j - 1]))?;
        let list: Vec<_> = h.triad_list().collect();
        for (slot, [i, j, k]) in list.into_iter().enumerate() {
            h.triads[slot] = self.triad([indices[i - 1], indices[j - 1], indices[k - 1]]).clone();
        }
        Ok(h)
    }

    /// The same hypergraph with index order reversed, `i ↦ n+1−i`. Part
    /// `V_ij` becomes `V_{n+1−j, n+1−i}`; left and right parts of a triad swap.
    pub fn reversed(&self) -> Self {
        let n = self.n;
        let mut h = Self::new(n, |i, j| self.size(n + 1 - j, n + 1 - i)).expect("sizes already valid");
        let list: Vec<_> = h.triad_list().collect();
        for (slot, [i, j, k]) in list.into_iter().enumerate() {
            let src = self.triad([n + 1 - k, n + 1 - j, n + 1 - i]);
            let mut tr = Triad::new(h.triads[slot].dims);
            for [l, r, t] in src.edges() {
                tr.set([r, l, t], true);
            }
            h.triads[slot] = tr;
        }
        h
    }

    /// Checks an embedding of `pattern`: `indices[i-1] = a_i` distinct, and
    /// for every pattern edge `{i,j,k}` the vertices `v_ij, v_ik, v_jk` form an
    /// edge of the triad on the sorted indices `{a_i, a_j, a_k}`.
    pub fn is_embedding(&self, pattern: &Hypergraph3, emb: &Embedding) -> bool {
        let a = &emb.indices;
        if a.len() != pattern.n() || a.iter().any(|&x| x == 0 || x > self.n) {
            return false;
        }
        let mut sorted = a.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        pattern.edges().iter().all(|&[i, j, k]| {
            let mut t = [a[i - 1], a[j - 1], a[k - 1]];
            t.sort_unstable();
            let mut e = [0; 3];
            for (x, y) in [(i, j), (i, k), (j, k)] {
                let host_pair = (a[x - 1].min(a[y - 1]), a[x - 1].max(a[y - 1]));
                let Some(&v) = emb.vertices.get(&(x, y)) else { return false };
                if v == 0 || v > self.part_size(host_pair) {
                    return false;
                }
                let role = Role::of_pair(t, host_pair).expect("pair of the triad");
                e[role.slot()] = v;
            }
            self.triad(t).contains(e)
        })
    }

    /// Searches for an embedding of `pattern`.
    ///
    /// Index maps `i ↦ a_i` are tried in lexicographic order over all
    /// injections (not only monotone ones); for each, vertices are chosen by
    /// backtracking with forward checking. Pattern pairs in no edge get
    /// vertex 1. `budget` caps search nodes per choice of `a_1`.
    pub fn find_embedding(&self, pattern: &Hypergraph3, budget: u64) -> Result<Option<Embedding>> {
        let k = pattern.n();
        if k > self.n {
            return Ok(None);
        }
        let plan = EmbedPlan::new(pattern);
        let outcome = (1..=self.n)
            .into_par_iter()
            .map(|first| {
                let mut s = EmbedSearch::new(self, &plan, budget);
                s.indices.push(first);
                s.used[first] = true;
                s.extend_indices()
                    .map(|found| found.then(|| s.embedding()))
            })
            .find_first(|r| !matches!(r, Ok(None)));
        match outcome {
            Some(r) => r,
            None => Ok(None),
        }
    }
}

/// `indices[i-1] = a_i`; `vertices[(i, j)] = v_ij` (local id in `V_{a_i a_j}`,
/// with the pair taken sorted).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "RawEmbedding")]
pub struct Embedding {
    pub indices: Vec<usize>,
    pub vertices: BTreeMap<(usize, usize), usize>,
}

#[derive(Serialize)]
struct RawEmbedding {
    indices: Vec<usize>,
    vertices: BTreeMap<String, usize>,
}

impl From<Embedding> for RawEmbedding {
    fn from(e: Embedding) -> Self {
        RawEmbedding {
            indices: e.indices,
            vertices: e
                .vertices
                .into_iter()
                .map(|((i, j), v)| (format!("{i},{j}"), v))
                .collect(),
        }
    }
}

struct EmbedPlan {
    k: usize,
    edges: Vec<[usize; 3]>,
    // pattern pairs (i, j), i < j, appearing in edges, in first-appearance order
    pairs: Vec<(usize, usize)>,
    // for each pattern pair: the edges (by index) through it
    pair_edges: BTreeMap<(usize, usize), Vec<usize>>,
    // edges grouped by their largest pattern vertex (for index pruning)
    closing: Vec<Vec<usize>>,
}

impl EmbedPlan {
    fn new(pattern: &Hypergraph3) -> Self {
        let k = pattern.n();
        let edges = pattern.edges().to_vec();
        let mut pairs = Vec::new();
        let mut pair_edges: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        let mut closing = vec![Vec::new(); k + 1];
        for (idx, &[i, j, l]) in edges.iter().enumerate() {
            closing[l].push(idx);
            for p in [(i, j), (i, l), (j, l)] {
                let list = pair_edges.entry(p).or_default();
                if list.is_empty() {
                    pairs.push(p);
                }
                list.push(idx);
            }
        }
        EmbedPlan {
            k,
            edges,
            pairs,
            pair_edges,
            closing,
        }
    }
}

struct EmbedSearch<'a> {
    host: &'a PartitionedHypergraph,
    plan: &'a EmbedPlan,
    budget: u64,
    nodes: u64,
    indices: Vec<usize>,
    used: Vec<bool>,
    chosen: BTreeMap<(usize, usize), usize>,
}

impl<'a> EmbedSearch<'a> {
    fn new(host: &'a PartitionedHypergraph, plan: &'a EmbedPlan, budget: u64) -> Self {
        EmbedSearch {
            host,
            plan,
            budget,
            nodes: 0,
            indices: Vec::with_capacity(plan.k),
            used: vec![false; host.n + 1],
            chosen: BTreeMap::new(),
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::budget("embedding search", None, self.budget as u128));
        }
        Ok(())
    }

    fn embedding(&self) -> Embedding {
        let mut vertices = BTreeMap::new();
        for i in 1..=self.plan.k {
            for j in i + 1..=self.plan.k {
                vertices.insert((i, j), self.chosen.get(&(i, j)).copied().unwrap_or(1));
            }
        }
        Embedding {
            indices: self.indices.clone(),
            vertices,
        }
    }

    /// Host triad and the host part of a pattern pair under the current indices.
    fn host_triad(&self, edge: [usize; 3]) -> [usize; 3] {
        let mut t = edge.map(|x| self.indices[x - 1]);
        t.sort_unstable();
        t
    }

    fn host_pair(&self, (x, y): (usize, usize)) -> (usize, usize) {
        let (a, b) = (self.indices[x - 1], self.indices[y - 1]);
        (a.min(b), a.max(b))
    }

    fn extend_indices(&mut self) -> Result<bool> {
        if self.indices.len() == self.plan.k {
            // the closing edges of the last vertex were checked on placement
            return self.extend_vertices(0);
        }
        for a in 1..=self.host.n {
            if self.used[a] {
                continue;
            }
            self.tick()?;
            self.indices.push(a);
            let p = self.indices.len();
            let viable = self.plan.closing[p]
                .iter()
                .all(|&e| self.host.triad(self.host_triad(self.plan.edges[e])).count > 0);
            if viable {
                self.used[a] = true;
                if self.extend_indices()? {
                    return Ok(true);
                }
                self.used[a] = false;
            }
            self.indices.pop();
        }
        Ok(false)
    }

    /// Role-ordered edge `[left, right, top]` for pattern edge `e`, with
    /// `None` for unassigned pairs.
    fn partial_edge(&self, e: [usize; 3], extra: Option<((usize, usize), usize)>) -> ([usize; 3], [Option<usize>; 3]) {
        let t = self.host_triad(e);
        let [i, j, l] = e;
        let mut out = [None; 3];
        for p in [(i, j), (i, l), (j, l)] {
            let role = Role::of_pair(t, self.host_pair(p)).expect("pair of the triad");
            let v = match extra {
                Some((q, v)) if q == p => Some(v),
                _ => self.chosen.get(&p).copied(),
            };
            out[role.slot()] = v;
        }
        (t, out)
    }

    fn edge_can_complete(&self, t: [usize; 3], partial: [Option<usize>; 3]) -> bool {
        let tr = self.host.triad(t);
        let missing: Vec<usize> = (0..3).filter(|&s| partial[s].is_none()).collect();
        match missing.as_slice() {
            [] => tr.contains(partial.map(|v| v.expect("assigned"))),
            [s] => (1..=tr.dims[*s]).any(|v| {
                let mut e = partial.map(|x| x.unwrap_or(0));
                e[*s] = v;
                tr.contains(e)
            }),
            _ => true,
        }
    }

    fn extend_vertices(&mut self, idx: usize) -> Result<bool> {
        let Some(&pair) = self.plan.pairs.get(idx) else {
            return Ok(true);
        };
        let size = self.host.part_size(self.host_pair(pair));
        for v in 1..=size {
            self.tick()?;
            let consistent = self.plan.pair_edges[&pair].iter().all(|&ei| {
                let (t, partial) = self.partial_edge(self.plan.edges[ei], Some((pair, v)));
                self.edge_can_complete(t, partial)
            });
            if consistent {
                self.chosen.insert(pair, v);
                if self.extend_vertices(idx + 1)? {
                    return Ok(true);
                }
                self.chosen.remove(&pair);
            }
        }
        Ok(false)
    }
}
