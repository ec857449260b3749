//! Brute-force oracles and random instance generators shared by the
//! integration tests. Every oracle enumerates the full search space in
//! lexicographic order without pruning.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::Rng;
use tcl_core::intersection::{SelectionInstance, Shape};
use tcl_core::partitioned::PartitionedHypergraph;
use tcl_core::rng::{self, SeededRng};
use tcl_core::Hypergraph3;

/// All increasing `k`-subsets of `items`, in lexicographic order.
pub fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// All injective sequences of length `k` over `[n]`, in lexicographic order.
pub fn injections(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 1..=n {
            if !cur.contains(&v) {
                cur.push(v);
                go(n, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, k, &mut Vec::new(), &mut out);
    out
}

/// Calls `f` on every assignment `v[i] ∈ 1..=sizes[i]` in lexicographic
/// order until it returns true; returns that assignment.
pub fn first_assignment(sizes: &[usize], mut f: impl FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
    let mut v = vec![1; sizes.len()];
    loop {
        if f(&v) {
            return Some(v);
        }
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            if v[pos] < sizes[pos] {
                v[pos] += 1;
                break;
            }
            v[pos] = 1;
        }
    }
}

pub fn random_sizes(r: &mut SeededRng, n: usize, max_part: usize) -> BTreeMap<(usize, usize), usize> {
    let mut sizes = BTreeMap::new();
    for i in 1..=n {
        for j in i + 1..=n {
            sizes.insert((i, j), r.random_range(1..=max_part));
        }
    }
    sizes
}

pub fn random_host(r: &mut SeededRng, n: usize, max_part: usize, density: f64) -> PartitionedHypergraph {
    let sizes = random_sizes(r, n, max_part);
    let seed = r.random();
    PartitionedHypergraph::random(n, |i, j| sizes[&(i, j)], density, seed).unwrap()
}

/// Whether `v_xy` (pattern pairs, host parts of the sorted images) put
/// every pattern edge on a host edge.
fn embeds(host: &PartitionedHypergraph, pattern: &Hypergraph3, a: &[usize], v: &BTreeMap<(usize, usize), usize>) -> bool {
    pattern.edges().iter().all(|&[i, j, k]| {
        let mut t = [a[i - 1], a[j - 1], a[k - 1]];
        t.sort_unstable();
        let at = |p: usize, q: usize| -> Option<usize> {
            // the pattern pair whose images are {p, q}
            [(i, j), (i, k), (j, k)].into_iter().find_map(|(x, y)| {
                let (s, u) = (a[x - 1], a[y - 1]);
                ((s.min(u), s.max(u)) == (p, q)).then(|| v[&(x, y)])
            })
        };
        let left = at(t[0], t[1]).unwrap();
        let right = at(t[1], t[2]).unwrap();
        let top = at(t[0], t[2]).unwrap();
        host.has_edge(t, [left, right, top])
    })
}

/// First injection (lexicographic) admitting vertices that embed `pattern`,
/// with the first such vertex assignment over pattern pairs in edges.
pub fn oracle_embedding(
    host: &PartitionedHypergraph,
    pattern: &Hypergraph3,
) -> Option<(Vec<usize>, BTreeMap<(usize, usize), usize>)> {
    let pairs: Vec<(usize, usize)> = pattern
        .edges()
        .iter()
        .flat_map(|&[i, j, k]| [(i, j), (i, k), (j, k)])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    for a in injections(host.n(), pattern.n()) {
        let sizes: Vec<usize> = pairs
            .iter()
            .map(|&(x, y)| {
                let (s, u) = (a[x - 1], a[y - 1]);
                host.size(s.min(u), s.max(u))
            })
            .collect();
        let hit = first_assignment(&sizes, |vals| {
            let v = pairs.iter().copied().zip(vals.iter().copied()).collect();
            embeds(host, pattern, &a, &v)
        });
        if let Some(vals) = hit {
            return Some((a, pairs.into_iter().zip(vals).collect()));
        }
    }
    None
}

/// Independent check of an embedding's vertices on the pairs in edges.
pub fn check_embedding(
    host: &PartitionedHypergraph,
    pattern: &Hypergraph3,
    a: &[usize],
    v: &BTreeMap<(usize, usize), usize>,
) -> bool {
    let mut distinct = a.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    distinct.len() == a.len() && a.len() == pattern.n() && embeds(host, pattern, a, v)
}

pub fn random_pattern(r: &mut SeededRng) -> Hypergraph3 {
    loop {
        let k = *[3, 4, 4, 5].choose(r).unwrap();
        let all: Vec<[usize; 3]> = tcl_core::hypergraph::triples(k).collect();
        let max_edges = if k == 5 { 2 } else { all.len() };
        let edges: Vec<[usize; 3]> = all.into_iter().filter(|_| r.random_bool(0.5)).take(max_edges).collect();
        if !edges.is_empty() {
            return Hypergraph3::new(k, edges).unwrap();
        }
    }
}

pub struct EmbeddingCase {
    pub host: PartitionedHypergraph,
    pub pattern: Hypergraph3,
}

pub fn embedding_case(seed: u64) -> EmbeddingCase {
    let mut r = rng::seeded(seed);
    let pattern = random_pattern(&mut r);
    let max_n = if pattern.n() == 5 { 6 } else { 7 };
    let n = r.random_range(pattern.n().max(3)..=max_n);
    let density = r.random_range(0.01..0.3);
    EmbeddingCase {
        host: random_host(&mut r, n, 3, density),
        pattern,
    }
}

/// Lexicographically first `(I, witnesses)`: index sets in lexicographic
/// order, and for each the first assignment over the pairs of `I`.
pub fn oracle_selection(inst: &SelectionInstance) -> Option<(Vec<usize>, BTreeMap<(usize, usize), usize>)> {
    let host = inst.host();
    let (p, q) = inst.shape().governed();
    let all: Vec<usize> = (1..=host.n()).collect();
    for idx in subsets(&all, inst.target()) {
        let pairs: Vec<(usize, usize)> = subsets(&idx, 2).into_iter().map(|s| (s[0], s[1])).collect();
        let sizes: Vec<usize> = pairs.iter().map(|&(i, j)| host.size(i, j)).collect();
        let tuples = subsets(&idx, inst.shape().arity());
        let hit = first_assignment(&sizes, |vals| {
            tuples.iter().all(|t| match inst.candidate(t) {
                None => true,
                Some(set) => {
                    let pos = pairs.iter().position(|&pr| pr == (t[p], t[q])).unwrap();
                    set.contains(&vals[pos])
                }
            })
        });
        if let Some(vals) = hit {
            return Some((idx, pairs.into_iter().zip(vals).collect()));
        }
    }
    None
}

pub fn selection_case(seed: u64) -> SelectionInstance {
    let mut r = rng::seeded(seed);
    let shape = *Shape::ALL.choose(&mut r).unwrap();
    let (n, target) = if shape == Shape::FiveIndex {
        (r.random_range(5..=6), 5)
    } else {
        let lo = shape.arity().max(3);
        let n = r.random_range(lo..=7);
        (n, r.random_range(lo..=4.min(n)))
    };
    let host = random_host(&mut r, n, 3, 0.5);
    let (p, q) = shape.governed();
    let absent = r.random_range(0.0..0.4);
    let keep = r.random_range(0.02..0.7);
    let sizes: BTreeMap<(usize, usize), usize> = host.pairs().map(|(i, j)| ((i, j), host.size(i, j))).collect();
    SelectionInstance::from_fn(host, shape, target, |t| {
        if r.random_bool(absent) {
            return None;
        }
        let size = sizes[&(t[p], t[q])];
        Some((1..=size).filter(|_| r.random_bool(keep)).collect())
    })
    .unwrap()
}

pub struct TripartiteCase {
    pub x_count: usize,
    pub is: Vec<usize>,
    pub js: Vec<usize>,
    pub ks: Vec<usize>,
    pub n: usize,
    pub sets: BTreeMap<(usize, usize, usize), BTreeSet<usize>>,
}

impl TripartiteCase {
    pub fn member(&self, x: usize, i: usize, j: usize, k: usize) -> bool {
        self.sets.get(&(i, j, k)).is_some_and(|s| s.contains(&x))
    }
}

pub fn tripartite_case(seed: u64) -> TripartiteCase {
    let mut r = rng::seeded(seed);
    let x_count = r.random_range(1..=5);
    let pick = |r: &mut SeededRng| {
        let len = r.random_range(2..=4);
        let mut v: Vec<usize> = (1..=7).collect::<Vec<_>>().choose_multiple(r, len).copied().collect();
        v.sort_unstable();
        v
    };
    let (is, js, ks) = (pick(&mut r), pick(&mut r), pick(&mut r));
    let n = r.random_range(1..=2);
    let keep = r.random_range(0.4..0.95);
    let mut sets = BTreeMap::new();
    for &i in &is {
        for &j in &js {
            for &k in &ks {
                sets.insert((i, j, k), (1..=x_count).filter(|_| r.random_bool(keep)).collect());
            }
        }
    }
    TripartiteCase {
        x_count,
        is,
        js,
        ks,
        n,
        sets,
    }
}

/// First `(x, I', J', K')` with `x` outermost, then `I'`, `J'`, `K'` in
/// lexicographic order.
pub fn oracle_tripartite(c: &TripartiteCase) -> Option<(usize, Vec<usize>, Vec<usize>, Vec<usize>)> {
    for x in 1..=c.x_count {
        for i in subsets(&c.is, c.n) {
            for j in subsets(&c.js, c.n) {
                for k in subsets(&c.ks, c.n) {
                    let ok = i
                        .iter()
                        .all(|&a| j.iter().all(|&b| k.iter().all(|&d| c.member(x, a, b, d))));
                    if ok {
                        return Some((x, i, j, k));
                    }
                }
            }
        }
    }
    None
}

pub struct ChainedCase {
    pub host: PartitionedHypergraph,
    pub gamma: BTreeMap<(usize, usize), usize>,
    pub n: usize,
    pub delta: f64,
}

pub fn chained_case(seed: u64) -> ChainedCase {
    let mut r = rng::seeded(seed);
    let hn = r.random_range(3..=6);
    let density = r.random_range(0.05..0.8);
    let host = random_host(&mut r, hn, 3, density);
    let mut gamma = BTreeMap::new();
    for i in 1..=hn {
        for k in i + 2..=hn {
            gamma.insert((i, k), r.random_range(1..=host.size(i, k)));
        }
    }
    ChainedCase {
        n: r.random_range(3..=4.min(hn)),
        delta: r.random_range(0.0..0.5),
        host,
        gamma,
    }
}

/// Whether some `I`, `α`, `β` make `{α_ij, β_jk, γ_ik}` an edge of every
/// triad on `I`.
pub fn oracle_chained(c: &ChainedCase) -> bool {
    let all: Vec<usize> = (1..=c.host.n()).collect();
    subsets(&all, c.n).into_iter().any(|idx| {
        let triples = subsets(&idx, 3);
        let alpha: Vec<(usize, usize)> = triples.iter().map(|t| (t[0], t[1])).collect::<BTreeSet<_>>().into_iter().collect();
        let beta: Vec<(usize, usize)> = triples.iter().map(|t| (t[1], t[2])).collect::<BTreeSet<_>>().into_iter().collect();
        let sizes: Vec<usize> = alpha.iter().chain(&beta).map(|&(i, j)| c.host.size(i, j)).collect();
        first_assignment(&sizes, |vals| {
            triples.iter().all(|t| {
                let a = vals[alpha.iter().position(|&p| p == (t[0], t[1])).unwrap()];
                let b = vals[alpha.len() + beta.iter().position(|&p| p == (t[1], t[2])).unwrap()];
                c.host.has_edge([t[0], t[1], t[2]], [a, b, c.gamma[&(t[0], t[2])]])
            })
        })
        .is_some()
    })
}

/// Independent check of a chained selection.
pub fn check_chained(
    c: &ChainedCase,
    idx: &[usize],
    alpha: &BTreeMap<(usize, usize), usize>,
    beta: &BTreeMap<(usize, usize), usize>,
) -> bool {
    idx.len() == c.n
        && idx.windows(2).all(|w| w[0] < w[1])
        && subsets(idx, 3).iter().all(|t| {
            match (alpha.get(&(t[0], t[1])), beta.get(&(t[1], t[2]))) {
                (Some(&a), Some(&b)) => c.host.has_edge([t[0], t[1], t[2]], [a, b, c.gamma[&(t[0], t[2])]]),
                _ => false,
            }
        })
}
