//! Witness search for common representatives of candidate-set families.
//!
//! A [`SelectionInstance`] attaches a candidate subset of one part to each
//! increasing index tuple of a fixed [`Shape`]. A solution is an index set
//! `I` together with one vertex `w_pq` per pair `p < q` of `I` that lies in
//! the candidate set of every tuple drawn from `I` which governs `(p, q)`.
//! Once `I` is fixed the pairs are independent, so the engine enumerates `I`
//! in lexicographic order and takes the smallest vertex of each intersection.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitioned::{DegreeKind, PartVertex, PartitionedHypergraph, Role};

/// Default cap on candidate-set evaluations.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Which positions of an increasing index tuple name the governed part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `W_{j i j' k j''} ⊆ V_ik`
    FiveIndex,
    /// `C_ijk ⊆ V_ik`
    ThreeTop,
    /// `A_ijk ⊆ V_ij`
    ThreeLeft,
    /// `B_ijk ⊆ V_jk`
    ThreeRight,
    /// `C_ijkl ⊆ V_ik`
    FourTop,
    /// `X_ijkl ⊆ V_jk`
    FourMiddle,
    /// `C_ijkl ⊆ V_jl`
    FourTopReversed,
}

impl Shape {
    pub const ALL: [Shape; 7] = [
        Shape::FiveIndex,
        Shape::ThreeTop,
        Shape::ThreeLeft,
        Shape::ThreeRight,
        Shape::FourTop,
        Shape::FourMiddle,
        Shape::FourTopReversed,
    ];

    pub fn arity(self) -> usize {
        match self {
            Shape::FiveIndex => 5,
            Shape::ThreeTop | Shape::ThreeLeft | Shape::ThreeRight => 3,
            Shape::FourTop | Shape::FourMiddle | Shape::FourTopReversed => 4,
        }
    }

    /// Zero-based tuple positions `(p, q)` of the governed part `V_{t_p t_q}`.
    pub fn governed(self) -> (usize, usize) {
        match self {
            Shape::FiveIndex => (1, 3),
            Shape::ThreeTop => (0, 2),
            Shape::ThreeLeft => (0, 1),
            Shape::ThreeRight => (1, 2),
            Shape::FourTop => (0, 2),
            Shape::FourMiddle => (1, 2),
            Shape::FourTopReversed => (1, 3),
        }
    }

    /// The shape obtained after reversing the index order.
    pub fn reversed(self) -> Shape {
        match self {
            Shape::ThreeLeft => Shape::ThreeRight,
            Shape::ThreeRight => Shape::ThreeLeft,
            Shape::FourTop => Shape::FourTopReversed,
            Shape::FourTopReversed => Shape::FourTop,
            s => s,
        }
    }
}

fn tuple_key(t: &[usize]) -> String {
    t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_tuple(key: &str) -> Result<Vec<usize>> {
    key.split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::invalid(format!("cannot parse tuple key \"{key}\"")))
}

/// Candidate sets for one [`Shape`]. Tuples without an entry impose no
/// constraint (their candidate set is the whole governed part).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct SelectionInstance {
    host: PartitionedHypergraph,
    shape: Shape,
    candidates: BTreeMap<Vec<usize>, BTreeSet<usize>>,
    target: usize,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    host: PartitionedHypergraph,
    shape: Shape,
    target: usize,
    #[serde(default)]
    candidates: BTreeMap<String, BTreeSet<usize>>,
}

impl TryFrom<RawInstance> for SelectionInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        let candidates = raw
            .candidates
            .into_iter()
            .map(|(k, v)| Ok((parse_tuple(&k)?, v)))
            .collect::<Result<_>>()?;
        SelectionInstance::new(raw.host, raw.shape, candidates, raw.target)
    }
}

impl From<SelectionInstance> for RawInstance {
    fn from(inst: SelectionInstance) -> Self {
        RawInstance {
            host: inst.host,
            shape: inst.shape,
            target: inst.target,
            candidates: inst
                .candidates
                .into_iter()
                .map(|(k, v)| (tuple_key(&k), v))
                .collect(),
        }
    }
}

/// An index set and one witness per pair of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(into = "RawSelection")]
pub struct Selection {
    pub indices: Vec<usize>,
    pub witnesses: BTreeMap<(usize, usize), usize>,
}

#[derive(Serialize)]
struct RawSelection {
    indices: Vec<usize>,
    witnesses: BTreeMap<String, usize>,
}

impl From<Selection> for RawSelection {
    fn from(s: Selection) -> Self {
        RawSelection {
            indices: s.indices,
            witnesses: s
                .witnesses
                .into_iter()
                .map(|((i, j), v)| (format!("{i},{j}"), v))
                .collect(),
        }
    }
}

impl SelectionInstance {
    pub fn new(
        host: PartitionedHypergraph,
        shape: Shape,
        candidates: BTreeMap<Vec<usize>, BTreeSet<usize>>,
        target: usize,
    ) -> Result<Self> {
        if target == 0 {
            return Err(Error::invalid("target must be positive"));
        }
        let n = host.n();
        for (t, set) in &candidates {
            if t.len() != shape.arity() {
                return Err(Error::invalid(format!(
                    "tuple {t:?} has arity {}, shape {shape:?} needs {}",
                    t.len(),
                    shape.arity()
                )));
            }
            if t[0] == 0 || t[t.len() - 1] > n || t.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!("tuple {t:?} is not increasing within [{n}]")));
            }
            let (p, q) = shape.governed();
            let size = host.size(t[p], t[q]);
            if let Some(&v) = set.iter().find(|&&v| v == 0 || v > size) {
                return Err(Error::invalid(format!(
                    "candidate {v} for tuple {t:?} is outside V_{},{} (size {size})",
                    t[p], t[q]
                )));
            }
        }
        Ok(SelectionInstance {
            host,
            shape,
            candidates,
            target,
        })
    }

    /// Builds the candidate map by evaluating `candidate` on every tuple of
    /// the shape; `None` leaves the tuple unconstrained.
    pub fn from_fn(
        host: PartitionedHypergraph,
        shape: Shape,
        target: usize,
        mut candidate: impl FnMut(&[usize]) -> Option<BTreeSet<usize>>,
    ) -> Result<Self> {
        let mut candidates = BTreeMap::new();
        for t in Combinations::new(host.n(), shape.arity()) {
            if let Some(set) = candidate(&t) {
                candidates.insert(t, set);
            }
        }
        Self::new(host, shape, candidates, target)
    }

    pub fn host(&self) -> &PartitionedHypergraph {
        &self.host
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn candidates(&self) -> &BTreeMap<Vec<usize>, BTreeSet<usize>> {
        &self.candidates
    }

    /// Candidate set of a tuple, or `None` when unconstrained.
    pub fn candidate(&self, tuple: &[usize]) -> Option<&BTreeSet<usize>> {
        self.candidates.get(tuple)
    }

    /// The instance with index order reversed (`i ↦ n+1−i`). Solutions map
    /// back through [`Selection::reversed`].
    pub fn reversed(&self) -> Self {
        let n = self.host.n();
        let candidates = self
            .candidates
            .iter()
            .map(|(t, s)| (t.iter().rev().map(|&x| n + 1 - x).collect(), s.clone()))
            .collect();
        SelectionInstance {
            host: self.host.reversed(),
            shape: self.shape.reversed(),
            candidates,
            target: self.target,
        }
    }

    /// Re-checks every instantiated membership constraint of `sel`.
    pub fn verify(&self, sel: &Selection) -> bool {
        let n = self.host.n();
        let idx = &sel.indices;
        if idx.len() != self.target || idx.windows(2).any(|w| w[0] >= w[1]) || idx.iter().any(|&x| x == 0 || x > n) {
            return false;
        }
        for a in 0..idx.len() {
            for b in a + 1..idx.len() {
                match sel.witnesses.get(&(idx[a], idx[b])) {
                    Some(&v) if v >= 1 && v <= self.host.size(idx[a], idx[b]) => {}
                    _ => return false,
                }
            }
        }
        let (p, q) = self.shape.governed();
        Combinations::new(idx.len(), self.shape.arity()).all(|pos| {
            let t: Vec<usize> = pos.iter().map(|&x| idx[x - 1]).collect();
            match self.candidates.get(&t) {
                None => true,
                Some(set) => set.contains(&sel.witnesses[&(t[p], t[q])]),
            }
        })
    }

    /// Cost in candidate-set evaluations of the full search.
    pub fn search_cost(&self) -> u128 {
        binomial(self.host.n() as u128, self.target as u128)
            .saturating_mul(binomial(self.target as u128, self.shape.arity() as u128).max(1))
    }
}

impl Selection {
    /// Maps a solution of the reversed instance back (or vice versa).
    pub fn reversed(&self, n: usize) -> Selection {
        let mut indices: Vec<usize> = self.indices.iter().map(|&x| n + 1 - x).collect();
        indices.reverse();
        let witnesses = self
            .witnesses
            .iter()
            .map(|(&(i, j), &v)| ((n + 1 - j, n + 1 - i), v))
            .collect();
        Selection { indices, witnesses }
    }
}

/// Lexicographically first solution of the instance, or `None`.
///
/// Fails with a budget error when `C(n, target) · C(target, arity)` exceeds
/// `budget`. Index sets are searched in parallel and merged in lexicographic
/// order, so the answer does not depend on the thread count.
pub fn find_common_selection(inst: &SelectionInstance, budget: u128) -> Result<Option<Selection>> {
    let n = inst.host.n();
    if inst.target > n {
        return Ok(None);
    }
    let cost = inst.search_cost();
    if cost > budget {
        return Err(Error::budget("common selection search", Some(cost), budget));
    }
    let arity = inst.shape.arity();
    let (p, q) = inst.shape.governed();
    // bitsets per candidate tuple
    let sets: BTreeMap<&[usize], Vec<u64>> = inst
        .candidates
        .iter()
        .map(|(t, s)| {
            let size = inst.host.size(t[p], t[q]);
            let mut bits = vec![0u64; size.div_ceil(64)];
            for &v in s {
                bits[(v - 1) / 64] |= 1 << ((v - 1) % 64);
            }
            (t.as_slice(), bits)
        })
        .collect();
    let total = binomial(n as u128, inst.target as u128) as usize;
    let found = (0..total).into_par_iter().find_map_first(|rank| {
        let idx = unrank_combination(n, inst.target, rank as u128);
        let mut acc: BTreeMap<(usize, usize), Vec<u64>> = BTreeMap::new();
        for pos in Combinations::new(idx.len(), arity) {
            let t: Vec<usize> = pos.iter().map(|&x| idx[x - 1]).collect();
            if let Some(bits) = sets.get(t.as_slice()) {
                let key = (t[p], t[q]);
                match acc.get_mut(&key) {
                    Some(cur) => cur.iter_mut().zip(bits).for_each(|(c, b)| *c &= b),
                    None => {
                        acc.insert(key, bits.clone());
                    }
                }
                if acc[&key].iter().all(|&w| w == 0) {
                    return None;
                }
            }
        }
        let mut witnesses = BTreeMap::new();
        for a in 0..idx.len() {
            for b in a + 1..idx.len() {
                let key = (idx[a], idx[b]);
                let w = match acc.get(&key) {
                    None => 1,
                    Some(bits) => lowest_bit(bits).expect("non-empty intersection"),
                };
                witnesses.insert(key, w);
            }
        }
        Some(Selection {
            indices: idx,
            witnesses,
        })
    });
    Ok(found)
}

fn lowest_bit(bits: &[u64]) -> Option<usize> {
    bits.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize + 1)
}

/// `C(n, k)`, saturating.
pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = match r.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    r
}

/// The `rank`-th `k`-subset of `[n]` in lexicographic order.
fn unrank_combination(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 1;
    for pos in 0..k {
        let mut c = next;
        loop {
            let count = binomial((n - c) as u128, (k - pos - 1) as u128);
            if rank < count {
                break;
            }
            rank -= count;
            c += 1;
        }
        out.push(c);
        next = c + 1;
    }
    out
}

/// Increasing `k`-subsets of `[n]` in lexicographic order.
pub(crate) struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            cur: (k <= n).then(|| (1..=k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let k = out.len();
        let mut c = out.clone();
        let mut pos = k;
        loop {
            if pos == 0 {
                self.cur = None;
                break;
            }
            pos -= 1;
            if c[pos] < self.n - (k - 1 - pos) {
                c[pos] += 1;
                for p in pos + 1..k {
                    c[p] = c[p - 1] + 1;
                }
                self.cur = Some(c);
                break;
            }
        }
        Some(out)
    }
}

/// Witness of [`tripartite_common_element`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripartiteWitness {
    pub x: usize,
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub k: Vec<usize>,
}

/// Finds `x ∈ [x_count]` and `n`-subsets `I' ⊆ is`, `J' ⊆ js`, `K' ⊆ ks`
/// with `member(x, i, j, k)` for all of `I' × J' × K'`.
///
/// Elements `x` are tried in increasing order; for each, `I'` and then `J'`
/// grow in lexicographic order while the set of `k` compatible with every
/// chosen `(i, j)` stays at least `n` large, and `K'` is its first `n`
/// elements. `budget` caps search nodes per element `x`.
pub fn tripartite_common_element(
    x_count: usize,
    is: &[usize],
    js: &[usize],
    ks: &[usize],
    member: impl Fn(usize, usize, usize, usize) -> bool + Sync,
    n: usize,
    budget: u64,
) -> Result<Option<TripartiteWitness>> {
    if n == 0 {
        return Err(Error::invalid("subset size must be positive"));
    }
    if is.len() < n || js.len() < n || ks.len() < n {
        return Ok(None);
    }
    let cells = (is.len() * js.len() * ks.len()) as u128;
    if cells > budget as u128 {
        return Err(Error::budget("tripartite table", Some(cells), budget as u128));
    }
    let outcome = (1..=x_count)
        .into_par_iter()
        .map(|x| {
            // table[a][b] = bitmask over positions of ks
            let table: Vec<Vec<Vec<bool>>> = is
                .iter()
                .map(|&i| {
                    js.iter()
                        .map(|&j| ks.iter().map(|&k| member(x, i, j, k)).collect())
                        .collect()
                })
                .collect();
            let mut s = Biclique {
                table: &table,
                n,
                budget,
                nodes: 0,
                chosen_i: Vec::new(),
                chosen_j: Vec::new(),
            };
            let all_j: Vec<Vec<bool>> = vec![vec![true; ks.len()]; js.len()];
            s.grow_i(0, all_j).map(|r| {
                r.map(|kpos| TripartiteWitness {
                    x,
                    i: s.chosen_i.iter().map(|&a| is[a]).collect(),
                    j: s.chosen_j.iter().map(|&b| js[b]).collect(),
                    k: kpos.into_iter().map(|c| ks[c]).collect(),
                })
            })
        })
        .find_first(|r| !matches!(r, Ok(None)));
    outcome.unwrap_or(Ok(None))
}

struct Biclique<'a> {
    table: &'a [Vec<Vec<bool>>],
    n: usize,
    budget: u64,
    nodes: u64,
    chosen_i: Vec<usize>,
    chosen_j: Vec<usize>,
}

impl Biclique<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::budget("tripartite search", None, self.budget as u128));
        }
        Ok(())
    }

    /// `allowed[b][c]`: k-position `c` compatible with j-position `b` and every chosen i.
    fn grow_i(&mut self, from: usize, allowed: Vec<Vec<bool>>) -> Result<Option<Vec<usize>>> {
        if self.chosen_i.len() == self.n {
            let all_k = vec![true; allowed.first().map_or(0, Vec::len)];
            return self.grow_j(0, &allowed, all_k);
        }
        let remaining = self.n - self.chosen_i.len();
        for a in from..self.table.len() {
            if self.table.len() - a < remaining {
                break;
            }
            self.tick()?;
            let next: Vec<Vec<bool>> = allowed
                .iter()
                .zip(&self.table[a])
                .map(|(al, row)| al.iter().zip(row).map(|(&x, &y)| x && y).collect())
                .collect();
            // at least n values of j must keep at least n values of k
            let viable = next.iter().filter(|r| r.iter().filter(|&&v| v).count() >= self.n).count();
            if viable < self.n {
                continue;
            }
            self.chosen_i.push(a);
            if let Some(k) = self.grow_i(a + 1, next)? {
                return Ok(Some(k));
            }
            self.chosen_i.pop();
        }
        Ok(None)
    }

    fn grow_j(&mut self, from: usize, allowed: &[Vec<bool>], ks: Vec<bool>) -> Result<Option<Vec<usize>>> {
        if self.chosen_j.len() == self.n {
            return Ok(Some(
                ks.iter().enumerate().filter(|(_, &v)| v).map(|(c, _)| c).take(self.n).collect(),
            ));
        }
        let remaining = self.n - self.chosen_j.len();
        for b in from..allowed.len() {
            if allowed.len() - b < remaining {
                break;
            }
            self.tick()?;
            let next: Vec<bool> = ks.iter().zip(&allowed[b]).map(|(&x, &y)| x && y).collect();
            if next.iter().filter(|&&v| v).count() < self.n {
                continue;
            }
            self.chosen_j.push(b);
            if let Some(k) = self.grow_j(b + 1, allowed, next)? {
                return Ok(Some(k));
            }
            self.chosen_j.pop();
        }
        Ok(None)
    }
}

/// How [`chained_edge_selection`] found its answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainMethod {
    /// Codegree-threshold sets for `α`, then edge sets for `β`.
    TwoPhase,
    /// Backtracking over index sets and all `α`, `β`.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainedSelection {
    pub indices: Vec<usize>,
    #[serde(serialize_with = "pair_map")]
    pub alpha: BTreeMap<(usize, usize), usize>,
    #[serde(serialize_with = "pair_map")]
    pub beta: BTreeMap<(usize, usize), usize>,
    pub method: ChainMethod,
}

fn pair_map<S: serde::Serializer>(m: &BTreeMap<(usize, usize), usize>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for ((i, j), v) in m {
        map.serialize_entry(&format!("{i},{j}"), v)?;
    }
    map.end()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainedReport {
    pub selection: Option<ChainedSelection>,
    /// Triads where the degree precondition on `γ` fails.
    pub warnings: Vec<String>,
}

impl ChainedSelection {
    /// Whether `{α_ij, β_jk, γ_ik}` is an edge of every triad on the indices.
    pub fn verify(&self, h: &PartitionedHypergraph, gamma: &BTreeMap<(usize, usize), usize>) -> bool {
        let idx = &self.indices;
        Combinations::new(idx.len(), 3).all(|p| {
            let (i, j, k) = (idx[p[0] - 1], idx[p[1] - 1], idx[p[2] - 1]);
            match (self.alpha.get(&(i, j)), self.beta.get(&(j, k)), gamma.get(&(i, k))) {
                (Some(&a), Some(&b), Some(&c)) => h.has_edge([i, j, k], [a, b, c]),
                _ => false,
            }
        })
    }
}

/// Finds `I` of size `n` with vertices `α_ij ∈ V_ij`, `β_jk ∈ V_jk` such
/// that `{α_ij, β_jk, γ_ik}` is an edge of every `(i,j,k)`-triad on `I`.
///
/// `gamma` must give a top vertex for every pair `i < k` with `k ≥ i + 2`.
/// Tries the two-phase construction first (`α_ij` in every
/// `A_ijk = {w : d_{ij|ik}(w, γ_ik) ≥ δ/2}`, then `β_jk` completing the
/// edges), then falls back to exhaustive search, so a `None` answer is
/// definitive. Degrees of `γ` below `δ` are reported as warnings.
pub fn chained_edge_selection(
    h: &PartitionedHypergraph,
    gamma: &BTreeMap<(usize, usize), usize>,
    n: usize,
    delta: f64,
    budget: u128,
) -> Result<ChainedReport> {
    let nn = h.n();
    if n == 0 {
        return Err(Error::invalid("index set size must be positive"));
    }
    for i in 1..=nn {
        for k in i + 2..=nn {
            match gamma.get(&(i, k)) {
                Some(&v) if v >= 1 && v <= h.size(i, k) => {}
                Some(&v) => return Err(Error::invalid(format!("γ_{i},{k} = {v} outside V_{i},{k}"))),
                None => return Err(Error::invalid(format!("γ_{i},{k} missing"))),
            }
        }
    }
    let mut warnings = Vec::new();
    if nn >= 3 {
        for t @ [i, _, k] in h.triad_list() {
            let g = PartVertex::new((i, k), gamma[&(i, k)]);
            let d = h.degree(t, DegreeKind::Vertex(Role::Top), &[g])?;
            if d < delta {
                warnings.push(format!("γ_{i},{k} has degree {d:.6} < {delta} in triad {t:?}"));
            }
        }
    }
    if n > nn {
        return Ok(ChainedReport { selection: None, warnings });
    }
    let selection = match two_phase(h, gamma, n, delta, budget)? {
        Some(s) => Some(s),
        None => exhaustive_chain(h, gamma, n, budget)?,
    };
    Ok(ChainedReport { selection, warnings })
}

fn unconstrained_chain(idx: Vec<usize>, method: ChainMethod) -> ChainedSelection {
    let mut alpha = BTreeMap::new();
    let mut beta = BTreeMap::new();
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            alpha.insert((idx[a], idx[b]), 1);
            beta.insert((idx[a], idx[b]), 1);
        }
    }
    ChainedSelection {
        indices: idx,
        alpha,
        beta,
        method,
    }
}

fn two_phase(
    h: &PartitionedHypergraph,
    gamma: &BTreeMap<(usize, usize), usize>,
    n: usize,
    delta: f64,
    budget: u128,
) -> Result<Option<ChainedSelection>> {
    if n < 3 || h.n() < 3 {
        return Ok(Some(unconstrained_chain((1..=n).collect(), ChainMethod::TwoPhase)));
    }
    let a_sets = SelectionInstance::from_fn(h.clone(), Shape::ThreeLeft, n, |t| {
        let (i, j, k) = (t[0], t[1], t[2]);
        let g = PartVertex::new((i, k), gamma[&(i, k)]);
        let set = (1..=h.size(i, j))
            .filter(|&w| {
                h.degree([i, j, k], DegreeKind::Codegree(Role::Left, Role::Top), &[PartVertex::new((i, j), w), g])
                    .map(|d| d >= delta / 2.0)
                    .unwrap_or(false)
            })
            .collect();
        Some(set)
    })?;
    let Some(first) = find_common_selection(&a_sets, budget)? else {
        return Ok(None);
    };
    let idx = first.indices;
    let sub = h.induced(&idx)?;
    let b_sets = SelectionInstance::from_fn(sub, Shape::ThreeRight, n, |t| {
        let (i, j, k) = (idx[t[0] - 1], idx[t[1] - 1], idx[t[2] - 1]);
        let (a, c) = (first.witnesses[&(i, j)], gamma[&(i, k)]);
        Some((1..=h.size(j, k)).filter(|&w| h.has_edge([i, j, k], [a, w, c])).collect())
    })?;
    let Some(second) = find_common_selection(&b_sets, budget)? else {
        return Ok(None);
    };
    let beta = second
        .witnesses
        .iter()
        .map(|(&(p, q), &v)| ((idx[p - 1], idx[q - 1]), v))
        .collect();
    Ok(Some(ChainedSelection {
        indices: idx,
        alpha: first.witnesses,
        beta,
        method: ChainMethod::TwoPhase,
    }))
}

fn exhaustive_chain(
    h: &PartitionedHypergraph,
    gamma: &BTreeMap<(usize, usize), usize>,
    n: usize,
    budget: u128,
) -> Result<Option<ChainedSelection>> {
    let total = binomial(h.n() as u128, n as u128) as usize;
    let outcome = (0..total)
        .into_par_iter()
        .map(|rank| {
            let idx = unrank_combination(h.n(), n, rank as u128);
            let mut s = ChainSearch::new(h, gamma, &idx, budget);
            s.run(0).map(|found| found.then(|| s.selection(idx.clone())))
        })
        .find_first(|r| !matches!(r, Ok(None)));
    outcome.unwrap_or(Ok(None))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ChainVar {
    Alpha(usize, usize),
    Beta(usize, usize),
}

struct ChainSearch<'a> {
    h: &'a PartitionedHypergraph,
    gamma: &'a BTreeMap<(usize, usize), usize>,
    vars: Vec<ChainVar>,
    // triples (i, j, k) that become checkable once var `v` is assigned
    checks: Vec<Vec<[usize; 3]>>,
    alpha: BTreeMap<(usize, usize), usize>,
    beta: BTreeMap<(usize, usize), usize>,
    budget: u128,
    nodes: u128,
}

impl<'a> ChainSearch<'a> {
    fn new(
        h: &'a PartitionedHypergraph,
        gamma: &'a BTreeMap<(usize, usize), usize>,
        idx: &[usize],
        budget: u128,
    ) -> Self {
        let mut vars = Vec::new();
        let mut checks: Vec<Vec<[usize; 3]>> = Vec::new();
        for p in Combinations::new(idx.len(), 3) {
            let (i, j, k) = (idx[p[0] - 1], idx[p[1] - 1], idx[p[2] - 1]);
            for v in [ChainVar::Alpha(i, j), ChainVar::Beta(j, k)] {
                if !vars.contains(&v) {
                    vars.push(v);
                    checks.push(Vec::new());
                }
            }
            let last = vars
                .iter()
                .rposition(|&v| v == ChainVar::Alpha(i, j) || v == ChainVar::Beta(j, k))
                .expect("just added");
            checks[last].push([i, j, k]);
        }
        ChainSearch {
            h,
            gamma,
            vars,
            checks,
            alpha: BTreeMap::new(),
            beta: BTreeMap::new(),
            budget,
            nodes: 0,
        }
    }

    fn run(&mut self, pos: usize) -> Result<bool> {
        let Some(&var) = self.vars.get(pos) else {
            return Ok(true);
        };
        let (pair, size) = match var {
            ChainVar::Alpha(i, j) | ChainVar::Beta(i, j) => ((i, j), self.h.size(i, j)),
        };
        for v in 1..=size {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::budget("chained edge search", None, self.budget));
            }
            match var {
                ChainVar::Alpha(..) => self.alpha.insert(pair, v),
                ChainVar::Beta(..) => self.beta.insert(pair, v),
            };
            let ok = self.checks[pos].iter().all(|&[i, j, k]| {
                self.h
                    .has_edge([i, j, k], [self.alpha[&(i, j)], self.beta[&(j, k)], self.gamma[&(i, k)]])
            });
            if ok && self.run(pos + 1)? {
                return Ok(true);
            }
        }
        match var {
            ChainVar::Alpha(..) => self.alpha.remove(&pair),
            ChainVar::Beta(..) => self.beta.remove(&pair),
        };
        Ok(false)
    }

    fn selection(&self, idx: Vec<usize>) -> ChainedSelection {
        let mut sel = unconstrained_chain(idx, ChainMethod::Exhaustive);
        sel.alpha.extend(&self.alpha);
        sel.beta.extend(&self.beta);
        sel
    }
}
