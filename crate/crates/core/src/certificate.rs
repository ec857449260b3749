//! Zero uniform Turán density certificates.
//!
//! A 3-graph `H` has uniform Turán density zero iff its vertices can be
//! ordered `v_1, …, v_n` and the pairs of positions coloured red, green and
//! blue so that for every edge `{v_i, v_j, v_k}` with `i < j < k` the pair
//! `ij` is red, `ik` is green and `jk` is blue.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph3;
use crate::palette::parse_pair;

/// Default largest `n` accepted by [`search_certificate`] (`9! = 362880` orderings).
pub const DEFAULT_MAX_VERTICES: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairColor {
    Red,
    Green,
    Blue,
}

impl fmt::Display for PairColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairColor::Red => "red",
            PairColor::Green => "green",
            PairColor::Blue => "blue",
        })
    }
}

/// An ordering of the vertices plus a (possibly partial) colouring of pairs
/// of positions. `ordering[p - 1]` is the vertex at position `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCertificate", into = "RawCertificate")]
pub struct Certificate {
    ordering: Vec<usize>,
    coloring: BTreeMap<(usize, usize), PairColor>,
}

#[derive(Serialize, Deserialize)]
struct RawCertificate {
    ordering: Vec<usize>,
    coloring: BTreeMap<String, PairColor>,
}

impl TryFrom<RawCertificate> for Certificate {
    type Error = Error;

    fn try_from(raw: RawCertificate) -> Result<Self> {
        let mut coloring = BTreeMap::new();
        for (key, color) in raw.coloring {
            let [i, j] = parse_pair(&key)?;
            let pair = (i.min(j), i.max(j));
            if coloring.insert(pair, color).is_some() {
                return Err(Error::invalid(format!("pair {i},{j} is coloured twice")));
            }
        }
        Certificate::new(raw.ordering, coloring)
    }
}

impl From<Certificate> for RawCertificate {
    fn from(c: Certificate) -> Self {
        RawCertificate {
            ordering: c.ordering,
            coloring: c
                .coloring
                .into_iter()
                .map(|((i, j), col)| (format!("{i},{j}"), col))
                .collect(),
        }
    }
}

impl Certificate {
    /// `ordering` must be a permutation of `[n]`; colouring keys are position
    /// pairs `(i, j)` with `1 ≤ i < j ≤ n`.
    pub fn new(ordering: Vec<usize>, coloring: BTreeMap<(usize, usize), PairColor>) -> Result<Self> {
        let n = ordering.len();
        let mut seen = vec![false; n + 1];
        for &v in &ordering {
            if v == 0 || v > n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::invalid(format!(
                    "ordering {ordering:?} is not a permutation of [{n}]"
                )));
            }
        }
        if let Some(&(i, j)) = coloring.keys().find(|&&(i, j)| !(1 <= i && i < j && j <= n)) {
            return Err(Error::invalid(format!(
                "coloured pair {i},{j} is not a position pair within [{n}]"
            )));
        }
        Ok(Certificate { ordering, coloring })
    }

    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }

    pub fn coloring(&self) -> &BTreeMap<(usize, usize), PairColor> {
        &self.coloring
    }

    pub fn color(&self, i: usize, j: usize) -> Option<PairColor> {
        self.coloring.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn set_color(&mut self, i: usize, j: usize, color: PairColor) {
        self.coloring.insert((i.min(j), i.max(j)), color);
    }
}

/// Position (1-based) of each vertex under `ordering`.
fn positions(ordering: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; ordering.len() + 1];
    for (p, &v) in ordering.iter().enumerate() {
        pos[v] = p + 1;
    }
    pos
}

/// The three colours an edge forces once its positions are known.
fn forced(mut p: [usize; 3]) -> [((usize, usize), PairColor); 3] {
    p.sort_unstable();
    let [i, j, k] = p;
    [
        ((i, j), PairColor::Red),
        ((i, k), PairColor::Green),
        ((j, k), PairColor::Blue),
    ]
}

/// Checks that every edge of `h` receives red/green/blue on its three
/// position pairs. Pairs not touched by any edge may be left uncoloured.
pub fn verify_certificate(h: &Hypergraph3, cert: &Certificate) -> Result<bool> {
    if cert.ordering.len() != h.n() {
        return Err(Error::invalid(format!(
            "ordering has {} vertices, hypergraph has {}",
            cert.ordering.len(),
            h.n()
        )));
    }
    let pos = positions(&cert.ordering);
    Ok(h.edges().iter().all(|e| {
        forced([pos[e[0]], pos[e[1]], pos[e[2]]])
            .iter()
            .all(|&(pair, color)| cert.coloring.get(&pair) == Some(&color))
    }))
}

/// Colours forced on position pairs by `ordering`, or `None` if some pair is
/// forced to two different colours.
pub fn forced_coloring(
    h: &Hypergraph3,
    ordering: &[usize],
) -> Option<BTreeMap<(usize, usize), PairColor>> {
    let pos = positions(ordering);
    let mut coloring = BTreeMap::new();
    for e in h.edges() {
        for (pair, color) in forced([pos[e[0]], pos[e[1]], pos[e[2]]]) {
            if *coloring.entry(pair).or_insert(color) != color {
                return None;
            }
        }
    }
    Some(coloring)
}

/// Searches orderings in lexicographic order and returns the first one whose
/// forced colours are consistent, together with that forced partial colouring.
///
/// Orderings are built position by position; as soon as all three vertices of
/// an edge are placed its colours are forced, and a conflicting prefix is
/// abandoned, since extending it cannot remove the conflict. The result is
/// therefore the same as checking all `n!` orderings in order. The first
/// position is split across the rayon pool and merged by minimum.
pub fn search_certificate(h: &Hypergraph3, max_vertices: usize) -> Result<Option<Certificate>> {
    let n = h.n();
    if n > max_vertices {
        return Err(Error::budget(
            format!("certificate search over {n}! orderings (n = {n} > {max_vertices})"),
            Some((1..=n as u128).product()),
            (1..=max_vertices as u128).product(),
        ));
    }
    // edges grouped by vertex, for the "closing" check when a vertex is placed
    let mut incident = vec![Vec::new(); n + 1];
    for e in h.edges() {
        for &v in e {
            incident[v].push(*e);
        }
    }
    let found = (1..=n)
        .into_par_iter()
        .map(|first| {
            let mut search = OrderingSearch {
                n,
                incident: &incident,
                ordering: Vec::with_capacity(n),
                pos: vec![0; n + 1],
                colors: vec![None; (n + 1) * (n + 1)],
                trail: Vec::new(),
            };
            if search.place(first) && search.extend() {
                Some(search.ordering)
            } else {
                None
            }
        })
        .find_first(Option::is_some)
        .flatten();
    Ok(found.map(|ordering| {
        let coloring = forced_coloring(h, &ordering).expect("search returns consistent orderings");
        Certificate { ordering, coloring }
    }))
}

struct OrderingSearch<'a> {
    n: usize,
    incident: &'a [Vec<[usize; 3]>],
    ordering: Vec<usize>,
    pos: Vec<usize>,
    colors: Vec<Option<PairColor>>,
    trail: Vec<usize>,
}

impl OrderingSearch<'_> {
    /// Places `v` at the next position; on conflict the state is restored
    /// and `false` returned.
    fn place(&mut self, v: usize) -> bool {
        let p = self.ordering.len() + 1;
        self.ordering.push(v);
        self.pos[v] = p;
        let mark = self.trail.len();
        for e in &self.incident[v] {
            let ps = [self.pos[e[0]], self.pos[e[1]], self.pos[e[2]]];
            if ps.contains(&0) {
                continue;
            }
            for ((i, j), color) in forced(ps) {
                let slot = i * (self.n + 1) + j;
                match self.colors[slot] {
                    None => {
                        self.colors[slot] = Some(color);
                        self.trail.push(slot);
                    }
                    Some(c) if c == color => {}
                    Some(_) => {
                        self.unplace(mark);
                        return false;
                    }
                }
            }
        }
        true
    }

    fn unplace(&mut self, mark: usize) {
        for slot in self.trail.drain(mark..) {
            self.colors[slot] = None;
        }
        let v = self.ordering.pop().expect("a placed vertex");
        self.pos[v] = 0;
    }

    fn extend(&mut self) -> bool {
        if self.ordering.len() == self.n {
            return true;
        }
        for v in 1..=self.n {
            if self.pos[v] != 0 {
                continue;
            }
            let mark = self.trail.len();
            if self.place(v) {
                if self.extend() {
                    return true;
                }
                self.unplace(mark);
            }
        }
        false
    }
}

/// The explicit certificate for `C_{3m}^{(3)}` with cycle vertices
/// `w_1, …, w_{3m}`: order them `w_1, w_4, …, w_{3m-2}, w_2, w_5, …, w_{3m-1},
/// w_3, w_6, …, w_{3m}` and colour position pairs between the first and
/// second third red, first and last third green, second and last third blue.
pub fn divisible_cycle_certificate(m: usize) -> Result<(Hypergraph3, Certificate)> {
    if m < 2 {
        return Err(Error::invalid(format!(
            "m = {m}: the cycle C_{{3m}} needs length at least 4"
        )));
    }
    let cycle = Hypergraph3::tight_cycle(3 * m)?;
    let ordering: Vec<usize> = (1..=3)
        .flat_map(|r| (0..m).map(move |t| 3 * t + r))
        .collect();
    let mut coloring = BTreeMap::new();
    for i in 1..=3 * m {
        for j in i + 1..=3 * m {
            let color = match ((i - 1) / m, (j - 1) / m) {
                (0, 1) => PairColor::Red,
                (0, 2) => PairColor::Green,
                (1, 2) => PairColor::Blue,
                _ => continue,
            };
            coloring.insert((i, j), color);
        }
    }
    Ok((cycle, Certificate::new(ordering, coloring)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge_cert() -> Certificate {
        let mut cert = Certificate::new(vec![1, 2, 3], BTreeMap::new()).unwrap();
        cert.set_color(1, 2, PairColor::Red);
        cert.set_color(1, 3, PairColor::Green);
        cert.set_color(2, 3, PairColor::Blue);
        cert
    }

    #[test]
    fn single_edge() {
        let h = Hypergraph3::new(3, [[1, 2, 3]]).unwrap();
        let mut cert = single_edge_cert();
        assert!(verify_certificate(&h, &cert).unwrap());
        cert.set_color(1, 2, PairColor::Blue);
        assert!(!verify_certificate(&h, &cert).unwrap());
    }

    #[test]
    fn c6_explicit_certificate() {
        let (c6, cert) = divisible_cycle_certificate(2).unwrap();
        assert_eq!(cert.ordering(), &[1, 4, 2, 5, 3, 6]);
        assert!(verify_certificate(&c6, &cert).unwrap());
        let mut broken = cert.clone();
        broken.set_color(1, 3, PairColor::Blue);
        assert!(!verify_certificate(&c6, &broken).unwrap());
    }

    #[test]
    fn c9_explicit_certificate() {
        let (c9, cert) = divisible_cycle_certificate(3).unwrap();
        assert_eq!(cert.ordering(), &[1, 4, 7, 2, 5, 8, 3, 6, 9]);
        assert!(verify_certificate(&c9, &cert).unwrap());
    }

    #[test]
    fn explicit_certificates_verify_for_larger_m() {
        for m in 2..=20 {
            let (c, cert) = divisible_cycle_certificate(m).unwrap();
            assert!(verify_certificate(&c, &cert).unwrap(), "m = {m}");
        }
    }

    #[test]
    fn m_one_rejected() {
        assert!(matches!(divisible_cycle_certificate(1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn length_mismatch() {
        let h = Hypergraph3::tight_cycle(5).unwrap();
        assert!(verify_certificate(&h, &single_edge_cert()).is_err());
    }

    #[test]
    fn bad_ordering_rejected() {
        assert!(Certificate::new(vec![1, 1, 3], BTreeMap::new()).is_err());
        assert!(Certificate::new(vec![1, 2, 4], BTreeMap::new()).is_err());
    }

    #[test]
    fn search_c6_agrees_with_construction() {
        let (c6, _) = divisible_cycle_certificate(2).unwrap();
        let found = search_certificate(&c6, DEFAULT_MAX_VERTICES).unwrap().unwrap();
        assert!(verify_certificate(&c6, &found).unwrap());
    }

    #[test]
    fn search_k4_minus_fails() {
        let k4m = Hypergraph3::new(4, [[1, 2, 3], [1, 2, 4], [1, 3, 4]]).unwrap();
        assert_eq!(search_certificate(&k4m, DEFAULT_MAX_VERTICES).unwrap(), None);
    }

    #[test]
    fn search_bound() {
        let c10 = Hypergraph3::tight_cycle(10).unwrap();
        assert!(search_certificate(&c10, DEFAULT_MAX_VERTICES).unwrap_err().is_budget());
    }

    #[test]
    fn certificate_json() {
        let cert = single_edge_cert();
        let s = serde_json::to_string(&cert).unwrap();
        assert_eq!(
            s,
            r#"{"ordering":[1,2,3],"coloring":{"1,2":"red","1,3":"green","2,3":"blue"}}"#
        );
        assert_eq!(serde_json::from_str::<Certificate>(&s).unwrap(), cert);
    }
}
